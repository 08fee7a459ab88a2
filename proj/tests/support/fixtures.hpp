#pragma once

// Hand-built packages and in-memory plumbing shared across the test binaries.

#include <filesystem>
#include <map>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "appsplit/app_model.hpp"
#include "appsplit/bundle_store.hpp"
#include "appsplit/decomposer.hpp"
#include "appsplit/errors.hpp"
#include "appsplit/recovery.hpp"

namespace testsupport {

// Small worked-example package:
//   A1 (launcher)  onCreate: refs layout/R1, calls C0.m, dynamic call to
//                  C2.run, explicit launch site for A3
//   A2             onCreate: refs drawable/R2
//   A3             onCreate: calls C0.m, refs drawable/R2 and layout/R4
//   C0             plain helper shared by A1 and A3
//   C2             plain helper reachable only through the dynamic call
//   S1             service with one method
//   layout/R1 -> drawable/R3 resource reference
//
// Sizes sum to 3900. Decomposing with base activities {A1, A2} yields a
// 2700-byte base bundle {A1,A2,C0,S1} / {R1,R2,R3} and one 1000-byte feature
// {A3} / {R4}; C2 stays out until replay recovery finds the dynamic call.
inline appsplit::AppPackage demo_app() {
  using namespace appsplit;
  AppPackage app;
  app.app_id = "demo";
  app.version = 1;
  app.manifest.launcher_activity = "A1";
  app.manifest.activities = {
      ActivityDecl{"A1", {}, false},
      ActivityDecl{"A2", {}, false},
      ActivityDecl{"A3", {}, false},
  };
  app.manifest.other_components = {ComponentDecl{"S1", ComponentKind::Service}};

  app.classes = {
      ClassUnit{"A1",
                ClassKind::Activity,
                500,
                {MethodDef{"onCreate",
                           {CallSite{"C0.m", false}, CallSite{"C2.run", true}},
                           {"layout/R1"},
                           {LaunchSite{LaunchSite::Kind::Explicit, "A3", "", {}, false}}}}},
      ClassUnit{"A2", ClassKind::Activity, 500,
                {MethodDef{"onCreate", {}, {"drawable/R2"}, {}}}},
      ClassUnit{"A3", ClassKind::Activity, 600,
                {MethodDef{"onCreate",
                           {CallSite{"C0.m", false}},
                           {"drawable/R2", "layout/R4"},
                           {}}}},
      ClassUnit{"C0", ClassKind::Pojo, 300, {MethodDef{"m", {}, {}, {}}}},
      ClassUnit{"C2", ClassKind::Pojo, 200, {MethodDef{"run", {}, {}, {}}}},
      ClassUnit{"S1", ClassKind::Service, 400, {MethodDef{"tick", {}, {}, {}}}},
  };
  app.resources = {
      ResourceItem{"layout/R1", 300, {"drawable/R3"}},
      ResourceItem{"drawable/R2", 300, {}},
      ResourceItem{"drawable/R3", 400, {}},
      ResourceItem{"layout/R4", 400, {}},
  };
  canonicalize(app);
  validate_package(app);
  return app;
}

inline std::set<std::string> demo_selection() { return {"A1", "A2"}; }

inline appsplit::ReplayScript demo_launch_script() {
  appsplit::ReplayScript s;
  s.name = "visit-A1";
  s.target_activity = "A1";
  s.actions = {appsplit::Action{appsplit::Action::Kind::Launch, "", 0}};
  return s;
}

inline appsplit::ReplayScript demo_visit_a3_script() {
  appsplit::ReplayScript s;
  s.name = "visit-A3";
  s.target_activity = "A3";
  s.actions = {appsplit::Action{appsplit::Action::Kind::Launch, "", 0},
               appsplit::Action{appsplit::Action::Kind::Navigate, "", 0}};
  return s;
}

// Bundle store over in-memory archives; what a plan directory would hold,
// minus the disk.
class MemoryStore : public appsplit::BundleStore {
 public:
  void put_plan(const appsplit::DecompositionPlan& plan, const appsplit::AppPackage& app) {
    base_[plan.app_id] = pack_bundle(plan.base, app);
    for (const auto& [activity, fb] : plan.features)
      features_[{plan.app_id, activity}] = pack_bundle(fb, app);
  }

  appsplit::Bytes get_base(const std::string& app_id) override {
    auto it = base_.find(app_id);
    if (it == base_.end())
      throw appsplit::StoreUnavailable("no base bundle for '" + app_id + "'");
    return it->second;
  }

  appsplit::Bytes get_feature(const std::string& app_id,
                              const std::string& activity) override {
    auto it = features_.find({app_id, activity});
    if (it == features_.end())
      throw appsplit::StoreUnavailable("no feature bundle '" + activity + "' for '" +
                                       app_id + "'");
    return it->second;
  }

 private:
  std::map<std::string, appsplit::Bytes> base_;
  std::map<std::pair<std::string, std::string>, appsplit::Bytes> features_;
};

// Fresh directory under the system temp root, removed on destruction.
class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    std::uint64_t tag = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
    path_ = std::filesystem::temp_directory_path() /
            ("appsplit-test-" + std::to_string(tag));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace testsupport
