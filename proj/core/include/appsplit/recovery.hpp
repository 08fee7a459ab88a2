#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "appsplit/app_model.hpp"
#include "appsplit/decomposer.hpp"
#include "appsplit/execution.hpp"

namespace appsplit {

struct Action {
  enum class Kind { Launch, Tap, Navigate, Back };

  Kind kind = Kind::Launch;
  std::string method;  // Tap: qualified method id
  int index = 0;       // Navigate: launch-site index in the current activity

  bool operator==(const Action&) const = default;
};

std::string to_string(const Action& action);

struct ReplayScript {
  std::string name;
  std::string target_activity;
  std::vector<Action> actions;

  bool operator==(const ReplayScript&) const = default;
};

struct RunTrace {
  std::vector<std::pair<Action, std::string>> executed;
  std::optional<MissingItem> fault;
  bool reached_target = false;
  /// Feature bundles that were loaded during the run (navigation reached
  /// their activity), in load order. Decides fault attribution.
  std::vector<std::string> loaded_features;
};

/// The bundle inventory available to the simulated device. The base bundle is
/// always loaded; feature bundles load when navigation first reaches their
/// activity, mirroring on-demand installation.
struct BundleSet {
  BaseBundle base;
  std::map<std::string, FeatureBundle> features;
};

BundleSet bundle_set(const DecompositionPlan& plan);

/// Replays a script against the app with availability gated by `installed`.
/// Dynamic call edges are followed. Execution stops at the first reference to
/// an unloaded class or resource and records it as the trace's fault.
RunTrace execute_script(const AppPackage& app, const BundleSet& installed,
                        const ReplayScript& script);

struct RecoveryReport {
  struct Addition {
    std::string bundle;  // "base" or the feature activity
    MissingItem item;
    std::string script;
    int iteration = 0;
  };

  std::map<std::string, int> iterations;  // per-bundle counts
  std::vector<Addition> added;
  int total_iterations = 0;
};

/// Iterative back-complementary recovery: replays each script, adds the one
/// missing item per failing run to the targeted bundle, and repeats until
/// every script runs clean. Scripts targeting base activities repair the base
/// bundle; feature-script faults raised before the target activity is reached
/// also go to base. Base additions are removed from every feature bundle to
/// keep the partition disjoint.
std::pair<DecompositionPlan, RecoveryReport> recover(const AppPackage& app,
                                                     DecompositionPlan plan,
                                                     const std::vector<ReplayScript>& scripts);

/// Line-oriented script format: `TARGET <activity>` first, then one action
/// per line (`LAUNCH`, `TAP <class>.<method>`, `NAV <index>`, `BACK`).
/// `#` starts a comment.
ReplayScript parse_script(const std::string& text, const std::string& name = "");
std::string serialize_script(const ReplayScript& script);

}  // namespace appsplit
