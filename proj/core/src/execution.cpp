#include "appsplit/execution.hpp"

#include "appsplit/errors.hpp"

namespace appsplit {

std::string to_string(const MissingItem& item) {
  return std::string(item.kind == MissingItem::Kind::Class ? "class '" : "resource '") +
         item.name + "' missing (raised by " + item.raising_context + ")";
}

namespace {

// Depth-first pull of one resource and everything it transitively refers to.
std::optional<MissingItem> pull_resource(const ExecEnv& env, const std::string& id,
                                         const std::string& context, WalkMemo& memo,
                                         std::set<std::string>& visiting) {
  if (memo.resources.count(id) != 0 || visiting.count(id) != 0) return std::nullopt;
  const ResourceItem* res = env.find_resource(id);
  if (res == nullptr) return MissingItem{MissingItem::Kind::Resource, id, context};
  visiting.insert(id);
  for (const std::string& ref : res->refs) {
    if (auto missing = pull_resource(env, ref, id, memo, visiting)) return missing;
  }
  visiting.erase(id);
  memo.resources.insert(id);
  return std::nullopt;
}

std::optional<MissingItem> walk(const ExecEnv& env, const std::string& qualified,
                                const std::string& context, WalkMemo& memo,
                                std::set<std::string>& visiting) {
  if (memo.methods.count(qualified) != 0 || visiting.count(qualified) != 0)
    return std::nullopt;

  auto [class_name, method_name] = split_method_id(qualified);
  const ClassUnit* cls = env.find_class(class_name);
  if (cls == nullptr) return MissingItem{MissingItem::Kind::Class, class_name, context};

  const MethodDef* method = nullptr;
  for (const MethodDef& m : cls->methods) {
    if (m.name == method_name) {
      method = &m;
      break;
    }
  }
  if (method == nullptr)
    throw InvalidScript("no method '" + method_name + "' on loaded class '" + class_name + "'");

  visiting.insert(qualified);
  std::set<std::string> res_visiting;
  for (const std::string& ref : method->resource_refs) {
    if (auto missing = pull_resource(env, ref, qualified, memo, res_visiting))
      return missing;
  }
  for (const CallSite& call : method->calls) {
    if (auto missing = walk(env, call.target_method, qualified, memo, visiting))
      return missing;
  }
  visiting.erase(qualified);
  memo.methods.insert(qualified);
  return std::nullopt;
}

}  // namespace

std::optional<MissingItem> walk_method(const ExecEnv& env, const std::string& qualified,
                                       WalkMemo& memo) {
  std::set<std::string> visiting;
  return walk(env, qualified, qualified, memo, visiting);
}

const MethodDef* entry_method(const ClassUnit& cls) {
  if (cls.methods.empty()) return nullptr;
  for (const MethodDef& m : cls.methods) {
    if (m.name == "onCreate") return &m;
  }
  return &cls.methods.front();
}

std::optional<MissingItem> enter_activity(const ExecEnv& env, const std::string& activity,
                                          WalkMemo& memo, const std::string& context) {
  const ClassUnit* cls = env.find_class(activity);
  if (cls == nullptr) return MissingItem{MissingItem::Kind::Class, activity, context};
  const MethodDef* entry = entry_method(*cls);
  if (entry == nullptr) return std::nullopt;
  std::set<std::string> visiting;
  return walk(env, activity + "." + entry->name, context, memo, visiting);
}

std::vector<std::pair<std::string, LaunchSite>> launch_sites_of(const ClassUnit& cls) {
  std::vector<std::pair<std::string, LaunchSite>> out;
  for (const MethodDef& m : cls.methods) {
    for (const LaunchSite& site : m.launches) out.emplace_back(cls.name + "." + m.name, site);
  }
  return out;
}

}  // namespace appsplit
