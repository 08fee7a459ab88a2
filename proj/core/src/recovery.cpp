#include "appsplit/recovery.hpp"

#include <algorithm>
#include <sstream>

#include "appsplit/errors.hpp"
#include "appsplit/graphs.hpp"

namespace appsplit {

std::string to_string(const Action& action) {
  switch (action.kind) {
    case Action::Kind::Launch: return "LAUNCH";
    case Action::Kind::Tap: return "TAP " + action.method;
    case Action::Kind::Navigate: return "NAV " + std::to_string(action.index);
    case Action::Kind::Back: return "BACK";
  }
  return "?";
}

BundleSet bundle_set(const DecompositionPlan& plan) {
  return BundleSet{plan.base, plan.features};
}

namespace {

/// One script run: availability starts at the base bundle and grows when
/// navigation reaches an activity whose feature bundle is installed.
class Replay {
 public:
  Replay(const AppPackage& app, const BundleSet& installed)
      : app_(app), installed_(installed) {
    loaded_classes_ = installed.base.classes;
    loaded_resources_ = installed.base.resources;
    env_.find_class = [this](const std::string& name) -> const ClassUnit* {
      return loaded_classes_.count(name) != 0 ? app_.find_class(name) : nullptr;
    };
    env_.find_resource = [this](const std::string& id) -> const ResourceItem* {
      return loaded_resources_.count(id) != 0 ? app_.find_resource(id) : nullptr;
    };
  }

  RunTrace run(const ReplayScript& script) {
    if (!app_.is_activity(script.target_activity))
      throw InvalidScript("script targets unknown activity '" + script.target_activity + "'");

    RunTrace trace;
    bool launched = false;
    for (std::size_t i = 0; i < script.actions.size(); ++i) {
      const Action& action = script.actions[i];
      if (action.kind != Action::Kind::Launch && !launched)
        throw InvalidScript("action before LAUNCH");
      switch (action.kind) {
        case Action::Kind::Launch: {
          if (launched || i != 0)
            throw InvalidScript("LAUNCH must be the first and only launch action");
          launched = true;
          if (!do_launch(script, trace)) return trace;
          break;
        }
        case Action::Kind::Tap: {
          if (!do_tap(action, trace)) return trace;
          break;
        }
        case Action::Kind::Navigate: {
          if (!do_navigate(action, script, trace)) return trace;
          break;
        }
        case Action::Kind::Back: {
          if (stack_.empty()) throw InvalidScript("BACK on an empty activity stack");
          trace.executed.emplace_back(action, "left " + stack_.back());
          stack_.pop_back();
          break;
        }
      }
    }
    return trace;
  }

 private:

  /// Loads the feature bundle for `activity` if one is installed and not yet
  /// loaded. Mirrors on-demand installation: availability only ever grows.
  void load_feature(const std::string& activity, RunTrace& trace) {
    if (loaded_feature_set_.count(activity) != 0) return;
    auto it = installed_.features.find(activity);
    if (it == installed_.features.end()) return;
    loaded_feature_set_.insert(activity);
    trace.loaded_features.push_back(activity);
    loaded_classes_.insert(it->second.classes.begin(), it->second.classes.end());
    loaded_resources_.insert(it->second.resources.begin(), it->second.resources.end());
  }

  bool enter(const std::string& activity, const std::string& context,
             const ReplayScript& script, RunTrace& trace) {
    load_feature(activity, trace);
    if (auto missing = enter_activity(env_, activity, memo_, context)) {
      trace.fault = missing;
      return false;
    }
    stack_.push_back(activity);
    if (activity == script.target_activity) trace.reached_target = true;
    return true;
  }

  bool do_launch(const ReplayScript& script, RunTrace& trace) {
    const std::string& launcher = app_.manifest.launcher_activity;
    if (!enter(launcher, "app.launch", script, trace)) return false;
    trace.executed.emplace_back(Action{Action::Kind::Launch, "", 0}, "entered " + launcher);
    for (const ActivityDecl& a : app_.manifest.activities) {
      if (!a.welcome || a.class_name == launcher) continue;
      if (!enter(a.class_name, "app.launch", script, trace)) return false;
      trace.executed.emplace_back(Action{Action::Kind::Launch, "", 0},
                                  "entered " + a.class_name);
    }
    return true;
  }

  bool do_tap(const Action& action, RunTrace& trace) {
    if (stack_.empty()) throw InvalidScript("TAP with no running activity");
    const std::string& current = stack_.back();
    auto [class_name, method_name] = split_method_id(action.method);
    if (class_name != current)
      throw InvalidScript("TAP targets '" + class_name + "' but '" + current +
                          "' is in the foreground");
    if (app_.find_method(action.method) == nullptr)
      throw InvalidScript("TAP targets unknown method '" + action.method + "'");
    if (auto missing = walk_method(env_, action.method, memo_)) {
      trace.fault = missing;
      return false;
    }
    trace.executed.emplace_back(action, "ran " + action.method);
    return true;
  }

  bool do_navigate(const Action& action, const ReplayScript& script, RunTrace& trace) {
    if (stack_.empty()) throw InvalidScript("NAV with no running activity");
    const std::string& current = stack_.back();
    const ClassUnit* cls = app_.find_class(current);
    auto sites = launch_sites_of(*cls);
    if (action.index < 0 || static_cast<std::size_t>(action.index) >= sites.size())
      throw InvalidScript("NAV index " + std::to_string(action.index) + " out of range for '" +
                          current + "'");
    const auto& [method_id, site] = sites[static_cast<std::size_t>(action.index)];

    std::string target;
    if (site.kind == LaunchSite::Kind::Explicit) {
      target = site.target_activity;
    } else {
      auto matches = matching_activities(app_.manifest, site.action, site.categories);
      if (matches.empty())
        throw InvalidScript("no activity accepts action '" + site.action + "'");
      target = matches.front();
    }
    if (!enter(target, method_id, script, trace)) return false;
    trace.executed.emplace_back(action, "entered " + target);
    return true;
  }

  const AppPackage& app_;
  const BundleSet& installed_;
  ExecEnv env_;
  WalkMemo memo_;
  std::set<std::string> loaded_classes_;
  std::set<std::string> loaded_resources_;
  std::set<std::string> loaded_feature_set_;
  std::vector<std::string> stack_;
};

}  // namespace

RunTrace execute_script(const AppPackage& app, const BundleSet& installed,
                        const ReplayScript& script) {
  Replay replay(app, installed);
  return replay.run(script);
}

namespace {

void add_to_base(DecompositionPlan& plan, const MissingItem& item) {
  if (item.kind == MissingItem::Kind::Class) {
    plan.base.classes.insert(item.name);
    for (auto& [activity, fb] : plan.features) fb.classes.erase(item.name);
  } else {
    plan.base.resources.insert(item.name);
    for (auto& [activity, fb] : plan.features) fb.resources.erase(item.name);
  }
}

void add_to_feature(FeatureBundle& fb, const MissingItem& item) {
  if (item.kind == MissingItem::Kind::Class) {
    fb.classes.insert(item.name);
  } else {
    fb.resources.insert(item.name);
  }
}

void refresh_sizes(DecompositionPlan& plan, const AppPackage& app) {
  auto class_sum = [&app](const std::set<std::string>& names) {
    std::uint64_t sum = 0;
    for (const std::string& n : names) sum += app.find_class(n)->size_bytes;
    return sum;
  };
  auto res_sum = [&app](const std::set<std::string>& ids) {
    std::uint64_t sum = 0;
    for (const std::string& id : ids) sum += app.find_resource(id)->size_bytes;
    return sum;
  };
  std::uint64_t fixed = 0;
  for (const AssetItem& a : app.assets) fixed += a.size_bytes;
  for (const OtherPayload& o : app.other) fixed += o.size_bytes;
  plan.base.size_bytes = class_sum(plan.base.classes) + res_sum(plan.base.resources) + fixed;
  for (auto& [activity, fb] : plan.features)
    fb.size_bytes = class_sum(fb.classes) + res_sum(fb.resources);
}

}  // namespace

std::pair<DecompositionPlan, RecoveryReport> recover(const AppPackage& app,
                                                     DecompositionPlan plan,
                                                     const std::vector<ReplayScript>& scripts) {
  RecoveryReport report;
  std::set<std::string> base_activities(plan.base_activities.begin(),
                                        plan.base_activities.end());
  // Within one script's repair loop an added item can never fault again (it
  // lands in a bundle the script has loaded), so more additions than the
  // package has items means attribution is not converging.
  std::size_t limit = app.classes.size() + app.resources.size();

  for (const ReplayScript& script : scripts) {
    std::size_t additions = 0;
    while (true) {
      RunTrace trace = execute_script(app, bundle_set(plan), script);
      if (!trace.fault.has_value()) break;

      if (++additions > limit)
        throw NonTermination("recovery exceeded " + std::to_string(limit) +
                             " additions; item attribution is not converging");

      const MissingItem& item = *trace.fault;
      bool target_is_base = base_activities.count(script.target_activity) != 0;
      bool target_loaded =
          std::find(trace.loaded_features.begin(), trace.loaded_features.end(),
                    script.target_activity) != trace.loaded_features.end();
      std::string bundle = "base";
      if (!target_is_base && target_loaded) bundle = script.target_activity;

      if (bundle == "base") {
        add_to_base(plan, item);
      } else {
        add_to_feature(plan.features.at(bundle), item);
      }
      refresh_sizes(plan, app);

      int iteration = ++report.iterations[bundle];
      report.added.push_back({bundle, item, script.name, iteration});
      ++report.total_iterations;
    }
  }
  return {std::move(plan), report};
}

namespace {

std::string trim(const std::string& s) {
  std::size_t begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  std::size_t end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

}  // namespace

ReplayScript parse_script(const std::string& text, const std::string& name) {
  ReplayScript script;
  script.name = name;
  bool have_target = false;

  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = trim(raw);
    if (line.empty() || line[0] == '#') continue;
    std::string where = "line " + std::to_string(line_no);

    std::istringstream words(line);
    std::string op;
    words >> op;
    std::string arg;
    std::getline(words, arg);
    arg = trim(arg);

    if (op == "TARGET") {
      if (have_target) throw MalformedScript(where + ": duplicate TARGET");
      if (!script.actions.empty()) throw MalformedScript(where + ": TARGET after actions");
      if (arg.empty()) throw MalformedScript(where + ": TARGET needs an activity");
      script.target_activity = arg;
      have_target = true;
      continue;
    }
    if (!have_target) throw MalformedScript(where + ": expected TARGET first");

    if (op == "LAUNCH") {
      if (!arg.empty()) throw MalformedScript(where + ": LAUNCH takes no argument");
      script.actions.push_back({Action::Kind::Launch, "", 0});
    } else if (op == "TAP") {
      if (arg.empty()) throw MalformedScript(where + ": TAP needs a qualified method");
      try {
        split_method_id(arg);
      } catch (const SchemaViolation&) {
        throw MalformedScript(where + ": TAP argument is not 'Class.method'");
      }
      script.actions.push_back({Action::Kind::Tap, arg, 0});
    } else if (op == "NAV") {
      std::size_t used = 0;
      int index = 0;
      try {
        index = std::stoi(arg, &used);
      } catch (const std::exception&) {
        throw MalformedScript(where + ": NAV needs an index");
      }
      if (used != arg.size() || index < 0)
        throw MalformedScript(where + ": NAV index must be a non-negative integer");
      script.actions.push_back({Action::Kind::Navigate, "", index});
    } else if (op == "BACK") {
      if (!arg.empty()) throw MalformedScript(where + ": BACK takes no argument");
      script.actions.push_back({Action::Kind::Back, "", 0});
    } else {
      throw MalformedScript(where + ": unknown action '" + op + "'");
    }
  }
  if (!have_target) throw MalformedScript("script has no TARGET line");
  return script;
}

std::string serialize_script(const ReplayScript& script) {
  std::ostringstream out;
  out << "TARGET " << script.target_activity << "\n";
  for (const Action& a : script.actions) out << to_string(a) << "\n";
  return out.str();
}

}  // namespace appsplit
