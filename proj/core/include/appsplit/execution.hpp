#pragma once

#include <functional>
#include <optional>
#include <set>
#include <string>

#include "appsplit/app_model.hpp"

namespace appsplit {

/// A class or resource referenced at run time but absent from the loaded
/// bundle set. `raising_context` is the method id (or resource id, for a
/// transitive resource pull) that raised the reference.
struct MissingItem {
  enum class Kind { Class, Resource };

  Kind kind = Kind::Class;
  std::string name;
  std::string raising_context;

  bool operator==(const MissingItem&) const = default;
};

std::string to_string(const MissingItem& item);

/// What the walker executes against: structure and availability in one
/// lookup. A null result means the entity is not loaded; the walker reports
/// it as missing. Recovery backs this with the original app gated by bundle
/// membership, the virtual runtime with its loaded records.
struct ExecEnv {
  std::function<const ClassUnit*(const std::string&)> find_class;
  std::function<const ResourceItem*(const std::string&)> find_resource;
};

/// Per-run memo of completed walks. Availability only grows during a run, so
/// a method or resource that once walked clean never needs re-walking.
struct WalkMemo {
  std::set<std::string> methods;
  std::set<std::string> resources;
};

/// Simulates executing one method: resource lookups first, then calls, each
/// in declaration order, depth first. Dynamic call edges are followed — this
/// is the runtime view. Returns the first missing reference, if any.
std::optional<MissingItem> walk_method(const ExecEnv& env, const std::string& qualified,
                                       WalkMemo& memo);

/// Returns the method that runs when an activity starts: `onCreate` when the
/// class has one, otherwise its first method, or null for a method-less class.
const MethodDef* entry_method(const ClassUnit& cls);

/// Checks the activity class is loaded, then walks its entry method.
/// `context` names the method (or pseudo-site) that triggered the entry.
std::optional<MissingItem> enter_activity(const ExecEnv& env, const std::string& activity,
                                          WalkMemo& memo, const std::string& context);

/// Flattened launch sites of a class: methods in stored order, sites in
/// declaration order. Script `NAV <index>` indexes into this list.
std::vector<std::pair<std::string, LaunchSite>> launch_sites_of(const ClassUnit& cls);

}  // namespace appsplit
