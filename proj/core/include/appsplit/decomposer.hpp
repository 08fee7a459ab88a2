#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "appsplit/app_model.hpp"

namespace appsplit {

struct BundleScope {
  enum class Kind { Base, Feature };
  Kind kind = Kind::Base;
  std::string activity;  // Feature only

  bool operator==(const BundleScope&) const = default;
};

/// Developer-supplied entries forced into a bundle. Entries without an
/// explicit scope default to the base bundle.
struct WhiteList {
  std::set<std::string> classes;
  std::set<std::string> resources;
  std::map<std::string, BundleScope> scope;

  BundleScope scope_of(const std::string& entry) const;
  bool empty() const { return classes.empty() && resources.empty(); }

  bool operator==(const WhiteList&) const = default;
};

struct BaseBundle {
  std::set<std::string> classes;
  std::set<std::string> resources;
  std::set<std::string> assets;  // always every asset path
  std::set<std::string> other;   // always every payload name
  std::uint64_t size_bytes = 0;

  bool operator==(const BaseBundle&) const = default;
};

struct FeatureBundle {
  std::string activity;
  std::set<std::string> classes;
  std::set<std::string> resources;
  std::uint64_t size_bytes = 0;

  bool operator==(const FeatureBundle&) const = default;
};

struct DecompositionPlan {
  std::string app_id;
  std::uint64_t version = 1;
  std::vector<std::string> base_activities;  // SEL, sorted
  WhiteList whitelist;
  BaseBundle base;
  std::map<std::string, FeatureBundle> features;  // keyed by activity
  std::uint64_t original_size_bytes = 0;

  bool operator==(const DecompositionPlan&) const = default;

  /// 1 - base.size_bytes / original_size_bytes.
  double saving_ratio() const;
};

/// Base bundle per the closure rules: union of activity-related classes over
/// the selection, plus components and their class closure, plus whitelisted
/// base classes; resources are the class-related closure of all of those plus
/// closure-expanded whitelisted resources. Assets and other payloads always
/// land here.
BaseBundle compute_base_bundle(const AppPackage& app,
                               const std::set<std::string>& sel,
                               const WhiteList& whitelist);

/// Feature bundle for one activity: its class closure minus the base classes,
/// and those classes' resource closure minus the base resources.
FeatureBundle compute_feature_bundle(const AppPackage& app,
                                     const BaseBundle& base,
                                     const std::string& activity);

DecompositionPlan decompose(const AppPackage& app,
                            const std::set<std::string>& sel,
                            const WhiteList& whitelist);

/// Marks every explicit launch site whose target is not a base activity as
/// hooked. Everything else is preserved bit-exact.
AppPackage rewrite_launch_sites(const AppPackage& app, const DecompositionPlan& plan);

/// Parsed form of a `.abundle` archive: the bundle membership plus the full
/// records of its members, so a runtime can execute without the original app.
struct BundleArchive {
  enum class Kind { Base, Feature };

  Kind kind = Kind::Base;
  std::string app_id;
  std::uint64_t version = 1;
  BaseBundle base;                       // Kind::Base
  FeatureBundle feature;                 // Kind::Feature
  std::vector<ClassUnit> class_units;    // records of member classes
  std::vector<ResourceItem> resource_items;
  std::vector<AssetItem> asset_items;    // base only
  std::vector<OtherPayload> other_payloads;  // base only
  std::optional<Manifest> manifest;      // base only
  std::uint64_t size_bytes = 0;
};

Bytes pack_bundle(const BaseBundle& bundle, const AppPackage& app);
Bytes pack_bundle(const FeatureBundle& bundle, const AppPackage& app);
BundleArchive unpack_bundle(const Bytes& bytes);

}  // namespace appsplit
