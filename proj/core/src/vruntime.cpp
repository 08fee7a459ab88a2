#include "appsplit/vruntime.hpp"

#include "appsplit/errors.hpp"
#include "appsplit/graphs.hpp"
#include "digest.hpp"
#include "json_codec.hpp"

namespace appsplit {

std::string to_string(LifecycleCallback cb) {
  switch (cb) {
    case LifecycleCallback::Create: return "create";
    case LifecycleCallback::Start: return "start";
    case LifecycleCallback::Resume: return "resume";
    case LifecycleCallback::Pause: return "pause";
    case LifecycleCallback::Destroy: return "destroy";
  }
  return "?";
}

std::uint64_t RunMetrics::bytes_fetched() const {
  std::uint64_t sum = 0;
  for (const auto& [activity, bytes] : fetches) sum += bytes;
  return sum;
}

std::vector<std::pair<std::string, std::string>> callback_sequence(const RunMetrics& m) {
  std::vector<std::pair<std::string, std::string>> out;
  out.reserve(m.lifecycle_events.size());
  for (const LifecycleEvent& ev : m.lifecycle_events)
    out.emplace_back(to_string(ev.callback), ev.activity);
  return out;
}

std::string resolve_intent(const Manifest& registry, const IntentObj& intent) {
  if (intent.kind == IntentObj::Kind::Explicit) {
    for (const ActivityDecl& a : registry.activities) {
      if (a.class_name == intent.target) return intent.target;
    }
    throw UnknownActivity("explicit intent names undeclared activity '" + intent.target + "'");
  }
  auto matches = matching_activities(registry, intent.action, intent.categories);
  if (matches.empty())
    throw NoMatchingActivity("no activity accepts action '" + intent.action + "'");
  return matches.front();
}

std::uint64_t digest_class(const ClassUnit& c) {
  json j = c;
  return detail::fnv1a64(j.dump());
}

std::uint64_t digest_resource(const ResourceItem& r) {
  json j = r;
  return detail::fnv1a64(j.dump());
}

namespace {

void check_merge(const InstallState& state, const BundleArchive& bundle) {
  for (const ResourceItem& r : bundle.resource_items) {
    auto it = state.resource_digests.find(r.id);
    if (it != state.resource_digests.end() && it->second != digest_resource(r))
      throw MergeConflict("resource '" + r.id + "' already merged with different content");
  }
}

void check_load(const InstallState& state, const BundleArchive& bundle) {
  for (const ClassUnit& c : bundle.class_units) {
    auto it = state.class_digests.find(c.name);
    if (it != state.class_digests.end() && it->second != digest_class(c))
      throw LoadConflict("class '" + c.name + "' already loaded with different content");
  }
}

}  // namespace

void merge_resources(InstallState& state, const BundleArchive& bundle) {
  check_merge(state, bundle);
  for (const ResourceItem& r : bundle.resource_items) {
    state.resource_digests.emplace(r.id, digest_resource(r));
    state.resource_items.emplace(r.id, r);
  }
}

void load_code(InstallState& state, const BundleArchive& bundle) {
  check_load(state, bundle);
  for (const ClassUnit& c : bundle.class_units) {
    state.class_digests.emplace(c.name, digest_class(c));
    state.class_units.emplace(c.name, c);
  }
}

VirtualDevice::VirtualDevice(int stub_pool_size) {
  if (stub_pool_size < 1) throw InvalidSelection("stub pool needs at least one slot");
  stub_pool_.resize(static_cast<std::size_t>(stub_pool_size));
}

const InstallState* VirtualDevice::install_state(const std::string& app_id) const {
  auto it = installed_.find(app_id);
  return it == installed_.end() ? nullptr : &it->second;
}

InstallState* VirtualDevice::install_state(const std::string& app_id) {
  auto it = installed_.find(app_id);
  return it == installed_.end() ? nullptr : &it->second;
}

int VirtualDevice::stubs_in_use() const {
  int n = 0;
  for (const StubSlot& slot : stub_pool_) n += slot.occupied ? 1 : 0;
  return n;
}

InstallState& VirtualDevice::install_base(BundleStore& store, const std::string& app_id) {
  if (installed_.count(app_id) != 0)
    throw AlreadyInstalled("'" + app_id + "' is already installed");

  Bytes bytes = store.get_base(app_id);
  BundleArchive archive = unpack_bundle(bytes);
  if (archive.kind != BundleArchive::Kind::Base)
    throw MalformedArchive("expected a base bundle for '" + app_id + "'");
  if (archive.app_id != app_id)
    throw MalformedArchive("base bundle is for '" + archive.app_id + "', not '" + app_id + "'");

  InstallState state;
  state.app_id = app_id;
  state.version = archive.version;
  state.manifest = *archive.manifest;
  state.base_classes = archive.base.classes;
  state.base_resources = archive.base.resources;
  for (const ClassUnit& c : archive.class_units) {
    state.class_units.emplace(c.name, c);
    state.class_digests.emplace(c.name, digest_class(c));
  }
  for (const ResourceItem& r : archive.resource_items) {
    state.resource_items.emplace(r.id, r);
    state.resource_digests.emplace(r.id, digest_resource(r));
  }
  for (const AssetItem& a : archive.asset_items) state.assets.insert(a.path);

  memos_[app_id] = WalkMemo{};
  return installed_.emplace(app_id, std::move(state)).first->second;
}

namespace {

ExecEnv env_of(const InstallState& state) {
  ExecEnv env;
  env.find_class = [&state](const std::string& name) -> const ClassUnit* {
    auto it = state.class_units.find(name);
    return it == state.class_units.end() ? nullptr : &it->second;
  };
  env.find_resource = [&state](const std::string& id) -> const ResourceItem* {
    auto it = state.resource_items.find(id);
    return it == state.resource_items.end() ? nullptr : &it->second;
  };
  return env;
}

}  // namespace

void VirtualDevice::record(const LifecycleEvent& ev, RunMetrics* session) {
  metrics_.lifecycle_events.push_back(ev);
  if (session != nullptr) session->lifecycle_events.push_back(ev);
}

int VirtualDevice::acquire_stub() {
  for (std::size_t i = 0; i < stub_pool_.size(); ++i) {
    if (!stub_pool_[i].occupied) {
      stub_pool_[i].occupied = true;
      return static_cast<int>(i);
    }
  }
  throw StubPoolExhausted("all " + std::to_string(stub_pool_.size()) +
                          " stub slots are running activities");
}

void VirtualDevice::release_stub(int slot) {
  stub_pool_[static_cast<std::size_t>(slot)].occupied = false;
}

void VirtualDevice::push_activity(const std::string& app_id, const std::string& activity,
                                  RunMetrics* session) {
  int slot = acquire_stub();
  if (!stack_.empty() && stack_.back().app_id == app_id) {
    const StackFrame& top = stack_.back();
    record({LifecycleCallback::Pause, top.activity, top.stub_slot}, session);
  }
  stack_.push_back({app_id, activity, slot});
  record({LifecycleCallback::Create, activity, slot}, session);
  record({LifecycleCallback::Start, activity, slot}, session);
  record({LifecycleCallback::Resume, activity, slot}, session);
}

void VirtualDevice::enter_or_fault(InstallState& state, const std::string& activity) {
  ExecEnv env = env_of(state);
  if (auto missing = enter_activity(env, activity, memos_[state.app_id], "vruntime.start"))
    throw MissingAtRuntime(to_string(*missing));
}

void VirtualDevice::launch_app(const std::string& app_id) {
  InstallState* state = install_state(app_id);
  if (state == nullptr) throw NotInstalled("'" + app_id + "' is not installed");
  const std::string& launcher = state->manifest.launcher_activity;

  enter_or_fault(*state, launcher);
  push_activity(app_id, launcher, nullptr);
  ++metrics_.warm_starts;
  for (const ActivityDecl& a : state->manifest.activities) {
    if (!a.welcome || a.class_name == launcher) continue;
    enter_or_fault(*state, a.class_name);
    push_activity(app_id, a.class_name, nullptr);
    ++metrics_.warm_starts;
  }
}

NavResult VirtualDevice::start_resolved(BundleStore& store, InstallState& state,
                                        const std::string& activity, RunMetrics* session) {
  NavResult result;
  result.activity = activity;
  // Claim a stub slot before spending on a fetch, so an exhausted pool fails
  // the start without touching metrics or install state.
  if (stubs_in_use() >= stub_pool_size())
    throw StubPoolExhausted("all " + std::to_string(stub_pool_.size()) +
                            " stub slots are running activities");
  if (!state.activity_available(activity) && !state.feature_loaded(activity)) {
    Bytes bytes = store.get_feature(state.app_id, activity);
    BundleArchive archive = unpack_bundle(bytes);
    if (archive.kind != BundleArchive::Kind::Feature)
      throw MalformedArchive("expected a feature bundle for '" + activity + "'");
    if (archive.app_id != state.app_id || archive.feature.activity != activity)
      throw MalformedArchive("feature bundle mismatch: got '" + archive.feature.activity +
                             "' of '" + archive.app_id + "'");
    check_merge(state, archive);
    check_load(state, archive);
    merge_resources(state, archive);
    load_code(state, archive);
    state.loaded_features.insert(activity);

    result.kind = NavResult::Kind::Cold;
    result.bytes_fetched = archive.size_bytes;
    metrics_.fetches.emplace_back(activity, archive.size_bytes);
    ++metrics_.cold_starts;
    if (session != nullptr) {
      session->fetches.emplace_back(activity, archive.size_bytes);
      ++session->cold_starts;
    }
  } else {
    result.kind = NavResult::Kind::Warm;
    ++metrics_.warm_starts;
    if (session != nullptr) ++session->warm_starts;
  }

  enter_or_fault(state, activity);
  push_activity(state.app_id, activity, session);
  return result;
}

NavResult VirtualDevice::navigate(BundleStore& store, const std::string& app_id,
                                  const IntentObj& intent) {
  InstallState* state = install_state(app_id);
  if (state == nullptr) throw NotInstalled("'" + app_id + "' is not installed");
  std::string target = resolve_intent(state->manifest, intent);
  return start_resolved(store, *state, target, nullptr);
}

void VirtualDevice::back(const std::string& app_id) {
  if (stack_.empty()) throw InvalidScript("BACK on an empty activity stack");
  StackFrame top = stack_.back();
  if (top.app_id != app_id)
    throw InvalidScript("foreground activity belongs to '" + top.app_id + "'");
  record({LifecycleCallback::Pause, top.activity, top.stub_slot}, nullptr);
  record({LifecycleCallback::Destroy, top.activity, top.stub_slot}, nullptr);
  release_stub(top.stub_slot);
  stack_.pop_back();
  if (!stack_.empty() && stack_.back().app_id == app_id) {
    const StackFrame& revealed = stack_.back();
    record({LifecycleCallback::Resume, revealed.activity, revealed.stub_slot}, nullptr);
  }
}

void VirtualDevice::prefetch(BundleStore& store, const std::string& app_id,
                             const std::vector<std::string>& activities) {
  InstallState* state = install_state(app_id);
  if (state == nullptr) throw NotInstalled("'" + app_id + "' is not installed");
  for (const std::string& activity : activities) {
    resolve_intent(state->manifest, IntentObj::explicit_to(activity));
    if (state->activity_available(activity) || state->feature_loaded(activity)) continue;
    Bytes bytes = store.get_feature(app_id, activity);
    BundleArchive archive = unpack_bundle(bytes);
    if (archive.kind != BundleArchive::Kind::Feature || archive.feature.activity != activity)
      throw MalformedArchive("feature bundle mismatch for '" + activity + "'");
    check_merge(*state, archive);
    check_load(*state, archive);
    merge_resources(*state, archive);
    load_code(*state, archive);
    state->loaded_features.insert(activity);
    metrics_.fetches.emplace_back(activity, archive.size_bytes);
    ++metrics_.cold_starts;
  }
}

void VirtualDevice::restore_features(BundleStore& store, const std::string& app_id,
                                     const std::vector<std::string>& activities) {
  InstallState* state = install_state(app_id);
  if (state == nullptr) throw NotInstalled("'" + app_id + "' is not installed");
  for (const std::string& activity : activities) {
    if (state->feature_loaded(activity)) continue;
    Bytes bytes = store.get_feature(app_id, activity);
    BundleArchive archive = unpack_bundle(bytes);
    if (archive.kind != BundleArchive::Kind::Feature || archive.feature.activity != activity)
      throw MalformedArchive("feature bundle mismatch for '" + activity + "'");
    check_merge(*state, archive);
    check_load(*state, archive);
    merge_resources(*state, archive);
    load_code(*state, archive);
    state->loaded_features.insert(activity);
  }
}

RunMetrics VirtualDevice::run_session(BundleStore& store, const std::string& app_id,
                                      const ReplayScript& script) {
  InstallState* state = install_state(app_id);
  if (state == nullptr) throw NotInstalled("'" + app_id + "' is not installed");

  // A session is a fresh task: leftover frames of this app are dropped the
  // way a cleared task would be, silently and with their stubs released.
  for (auto it = stack_.begin(); it != stack_.end();) {
    if (it->app_id == app_id) {
      release_stub(it->stub_slot);
      it = stack_.erase(it);
    } else {
      ++it;
    }
  }

  RunMetrics session;
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
        const std::string& launcher = state->manifest.launcher_activity;
        enter_or_fault(*state, launcher);
        push_activity(app_id, launcher, &session);
        ++metrics_.warm_starts;
        ++session.warm_starts;
        for (const ActivityDecl& a : state->manifest.activities) {
          if (!a.welcome || a.class_name == launcher) continue;
          enter_or_fault(*state, a.class_name);
          push_activity(app_id, a.class_name, &session);
          ++metrics_.warm_starts;
          ++session.warm_starts;
        }
        break;
      }
      case Action::Kind::Tap: {
        const std::string& current = foreground_of(app_id);
        auto [class_name, method_name] = split_method_id(action.method);
        if (class_name != current)
          throw InvalidScript("TAP targets '" + class_name + "' but '" + current +
                              "' is in the foreground");
        ExecEnv env = env_of(*state);
        if (auto missing = walk_method(env, action.method, memos_[app_id]))
          throw MissingAtRuntime(to_string(*missing));
        break;
      }
      case Action::Kind::Navigate: {
        const std::string& current = foreground_of(app_id);
        auto cls = state->class_units.find(current);
        if (cls == state->class_units.end())
          throw MissingAtRuntime("foreground class '" + current + "' is not loaded");
        auto sites = launch_sites_of(cls->second);
        if (action.index < 0 || static_cast<std::size_t>(action.index) >= sites.size())
          throw InvalidScript("NAV index " + std::to_string(action.index) +
                              " out of range for '" + current + "'");
        const LaunchSite& site = sites[static_cast<std::size_t>(action.index)].second;

        IntentObj intent;
        if (site.kind == LaunchSite::Kind::Explicit) {
          intent = IntentObj::explicit_to(site.target_activity);
          if (!site.hooked && !state->activity_available(site.target_activity))
            throw MissingAtRuntime("activity '" + site.target_activity +
                                   "' started through an unhooked site but is not loaded");
        } else {
          intent = IntentObj::implicit(site.action, site.categories);
        }
        std::string target = resolve_intent(state->manifest, intent);
        start_resolved(store, *state, target, &session);
        break;
      }
      case Action::Kind::Back: {
        // Session-scoped back: route through the device but mirror events.
        std::size_t before = metrics_.lifecycle_events.size();
        back(app_id);
        for (std::size_t e = before; e < metrics_.lifecycle_events.size(); ++e)
          session.lifecycle_events.push_back(metrics_.lifecycle_events[e]);
        break;
      }
    }
  }
  return session;
}

const std::string& VirtualDevice::foreground_of(const std::string& app_id) const {
  if (stack_.empty() || stack_.back().app_id != app_id)
    throw InvalidScript("'" + app_id + "' has no foreground activity");
  return stack_.back().activity;
}

namespace {

/// Plain-stack interpreter over the intact package. Kept separate from the
/// virtual device on purpose: it is the reference the device is compared to.
class DirectRun {
 public:
  explicit DirectRun(const AppPackage& app) : app_(app) {
    env_.find_class = [this](const std::string& name) { return app_.find_class(name); };
    env_.find_resource = [this](const std::string& id) { return app_.find_resource(id); };
  }

  RunMetrics run(const ReplayScript& script) {
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
          const std::string& launcher = app_.manifest.launcher_activity;
          enter(launcher);
          for (const ActivityDecl& a : app_.manifest.activities) {
            if (!a.welcome || a.class_name == launcher) continue;
            enter(a.class_name);
          }
          break;
        }
        case Action::Kind::Tap: {
          const std::string& current = foreground();
          auto [class_name, method_name] = split_method_id(action.method);
          if (class_name != current)
            throw InvalidScript("TAP targets '" + class_name + "' but '" + current +
                                "' is in the foreground");
          if (app_.find_method(action.method) == nullptr)
            throw InvalidScript("TAP targets unknown method '" + action.method + "'");
          if (auto missing = walk_method(env_, action.method, memo_))
            throw MissingAtRuntime(to_string(*missing));
          break;
        }
        case Action::Kind::Navigate: {
          const std::string& current = foreground();
          auto sites = launch_sites_of(*app_.find_class(current));
          if (action.index < 0 || static_cast<std::size_t>(action.index) >= sites.size())
            throw InvalidScript("NAV index " + std::to_string(action.index) +
                                " out of range for '" + current + "'");
          const LaunchSite& site = sites[static_cast<std::size_t>(action.index)].second;
          std::string target;
          if (site.kind == LaunchSite::Kind::Explicit) {
            target = site.target_activity;
          } else {
            auto matches = matching_activities(app_.manifest, site.action, site.categories);
            if (matches.empty())
              throw NoMatchingActivity("no activity accepts action '" + site.action + "'");
            target = matches.front();
          }
          enter(target);
          break;
        }
        case Action::Kind::Back: {
          if (stack_.empty()) throw InvalidScript("BACK on an empty activity stack");
          std::string top = stack_.back();
          record(LifecycleCallback::Pause, top);
          record(LifecycleCallback::Destroy, top);
          stack_.pop_back();
          if (!stack_.empty()) record(LifecycleCallback::Resume, stack_.back());
          break;
        }
      }
    }
    return metrics_;
  }

 private:
  void enter(const std::string& activity) {
    if (auto missing = enter_activity(env_, activity, memo_, "direct.start"))
      throw MissingAtRuntime(to_string(*missing));
    if (!stack_.empty()) record(LifecycleCallback::Pause, stack_.back());
    stack_.push_back(activity);
    record(LifecycleCallback::Create, activity);
    record(LifecycleCallback::Start, activity);
    record(LifecycleCallback::Resume, activity);
    ++metrics_.warm_starts;
  }

  const std::string& foreground() const {
    if (stack_.empty()) throw InvalidScript("no foreground activity");
    return stack_.back();
  }

  void record(LifecycleCallback cb, const std::string& activity) {
    metrics_.lifecycle_events.push_back({cb, activity, -1});
  }

  const AppPackage& app_;
  ExecEnv env_;
  WalkMemo memo_;
  std::vector<std::string> stack_;
  RunMetrics metrics_;
};

}  // namespace

RunMetrics run_direct(const AppPackage& app, const ReplayScript& script) {
  DirectRun run(app);
  return run.run(script);
}

}  // namespace appsplit
