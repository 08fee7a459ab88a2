#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "appsplit/app_model.hpp"
#include "appsplit/decomposer.hpp"
#include "appsplit/recovery.hpp"
#include "appsplit/vruntime.hpp"

namespace appsplit {

/// Canonical layout of a plan directory:
///   plan.json                      decomposition summary (whitelist, sizes)
///   app.apkg                       the rewritten package the plan was cut from
///   base.abundle
///   features/<activity>.abundle
///   recovery-report.json           present once `recover` has run
struct PlanPaths {
  std::filesystem::path dir;

  std::filesystem::path plan_json() const { return dir / "plan.json"; }
  std::filesystem::path app_package() const { return dir / "app.apkg"; }
  std::filesystem::path base_bundle() const { return dir / "base.abundle"; }
  std::filesystem::path features_dir() const { return dir / "features"; }
  std::filesystem::path feature_bundle(const std::string& activity) const {
    return features_dir() / (activity + ".abundle");
  }
  std::filesystem::path recovery_report() const { return dir / "recovery-report.json"; }
};

struct LoadedPlan {
  DecompositionPlan plan;
  AppPackage app;  // launch-site-rewritten package
};

/// Writes the full plan directory: summary, rewritten package, and all bundle
/// archives. Overwrites stale feature bundles from a previous write.
void write_plan_dir(const std::filesystem::path& dir, const DecompositionPlan& plan,
                    const AppPackage& rewritten_app);

LoadedPlan load_plan_dir(const std::filesystem::path& dir);

std::string plan_to_json(const DecompositionPlan& plan);
DecompositionPlan plan_from_json(const std::string& text, const AppPackage& app);

/// Standalone whitelist files share the shape of the "whitelist" object inside
/// plan.json: {"classes": [...], "resources": [...], "scope": {name: {...}}}.
std::string whitelist_to_json(const WhiteList& wl);
WhiteList whitelist_from_json_text(const std::string& text);

std::string recovery_report_to_json(const RecoveryReport& report);
std::string metrics_to_json(const RunMetrics& metrics);

/// Persisted device-side install state: which feature bundles an app already
/// has, so a later session can restore them without recounting the fetches.
struct DeviceState {
  std::string app_id;
  std::vector<std::string> loaded_features;  // sorted
};

std::string device_state_to_json(const DeviceState& state);
DeviceState device_state_from_json(const std::string& text);

Bytes read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const Bytes& data);
void write_file(const std::filesystem::path& path, const std::string& data);

}  // namespace appsplit
