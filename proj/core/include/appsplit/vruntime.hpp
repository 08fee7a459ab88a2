#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "appsplit/app_model.hpp"
#include "appsplit/bundle_store.hpp"
#include "appsplit/decomposer.hpp"
#include "appsplit/execution.hpp"
#include "appsplit/recovery.hpp"

namespace appsplit {

/// An activity start request, either naming the target class directly or
/// asking for intent-filter resolution.
struct IntentObj {
  enum class Kind { Explicit, Implicit };

  Kind kind = Kind::Explicit;
  std::string target;                    // Explicit: activity class name
  std::string action;                    // Implicit
  std::vector<std::string> categories;   // Implicit, sorted

  static IntentObj explicit_to(std::string activity) {
    IntentObj in;
    in.kind = Kind::Explicit;
    in.target = std::move(activity);
    return in;
  }
  static IntentObj implicit(std::string action, std::vector<std::string> categories = {}) {
    IntentObj in;
    in.kind = Kind::Implicit;
    in.action = std::move(action);
    in.categories = std::move(categories);
    return in;
  }
};

/// Activity lifecycle callbacks, in the order the runtime issues them.
enum class LifecycleCallback { Create, Start, Resume, Pause, Destroy };

std::string to_string(LifecycleCallback cb);

struct LifecycleEvent {
  LifecycleCallback callback;
  std::string activity;
  int stub_slot = -1;  // -1 when no stub was involved (direct execution)

  bool operator==(const LifecycleEvent&) const = default;
};

/// What a session observably did: every bundle fetch with its payload size,
/// how many activity visits required a fetch (cold) versus not (warm), and
/// the full lifecycle callback sequence.
struct RunMetrics {
  std::vector<std::pair<std::string, std::uint64_t>> fetches;  // (activity, bytes)
  int cold_starts = 0;
  int warm_starts = 0;
  std::vector<LifecycleEvent> lifecycle_events;

  std::uint64_t bytes_fetched() const;
};

/// (callback, activity) projection of the lifecycle trace, for comparing
/// virtualized runs against direct execution independent of stub slots.
std::vector<std::pair<std::string, std::string>> callback_sequence(const RunMetrics& m);

/// Intent resolution over a registered manifest. Explicit intents must name a
/// declared activity (UnknownActivity otherwise). Implicit intents match
/// declared filters: equal action, filter categories a superset of the intent
/// categories; among multiple matches the lexicographically smallest activity
/// name wins; no match raises NoMatchingActivity.
std::string resolve_intent(const Manifest& registry, const IntentObj& intent);

/// Mutable per-app state on a virtual device: the merged view of everything
/// installed so far.
struct InstallState {
  std::string app_id;
  std::uint64_t version = 0;
  Manifest manifest;

  std::set<std::string> base_classes;
  std::set<std::string> base_resources;
  std::set<std::string> loaded_features;  // activity names

  // Loaded records, merged across base + features.
  std::map<std::string, ClassUnit> class_units;
  std::map<std::string, ResourceItem> resource_items;
  std::set<std::string> assets;

  // Content digests guarding idempotent re-merge / re-load.
  std::map<std::string, std::uint64_t> class_digests;
  std::map<std::string, std::uint64_t> resource_digests;

  bool has_class(const std::string& name) const { return class_units.count(name) != 0; }
  bool has_resource(const std::string& id) const { return resource_items.count(id) != 0; }
  bool feature_loaded(const std::string& activity) const {
    return loaded_features.count(activity) != 0;
  }
  /// True when the activity is executable locally: its class arrived with the
  /// base bundle or its feature bundle has been merged.
  bool activity_available(const std::string& activity) const {
    return has_class(activity);
  }
};

/// Content digests used for idempotency checks when the same unit arrives in
/// more than one bundle.
std::uint64_t digest_class(const ClassUnit& c);
std::uint64_t digest_resource(const ResourceItem& r);

/// Folds a feature bundle's resources into the install state. Re-merging an
/// identical item is a no-op; a same-id item with different content raises
/// MergeConflict and leaves the state untouched.
void merge_resources(InstallState& state, const BundleArchive& bundle);

/// Registers a feature bundle's classes with the app's loader. Same-name
/// class with identical digest is a no-op; different digest raises
/// LoadConflict and leaves the state untouched.
void load_code(InstallState& state, const BundleArchive& bundle);

/// Outcome of one activity start.
struct NavResult {
  enum class Kind { Warm, Cold };
  Kind kind = Kind::Warm;
  std::string activity;
  std::uint64_t bytes_fetched = 0;  // nonzero only for cold starts
};

struct StackFrame {
  std::string app_id;
  std::string activity;
  int stub_slot = -1;

  bool operator==(const StackFrame&) const = default;
};

/// A simulated device running virtualized apps: a fixed pool of pre-declared
/// stub activity slots, per-app install state, a shared back stack, and
/// metrics accounting. All faults surface as exceptions; the device never
/// exits the process.
class VirtualDevice {
 public:
  explicit VirtualDevice(int stub_pool_size = 16);

  /// Fetches and installs an app's base bundle, registering its manifest for
  /// intent resolution. The fetch is not metered (installation precedes the
  /// sessions being measured). AlreadyInstalled if the app id is taken.
  InstallState& install_base(BundleStore& store, const std::string& app_id);

  /// Starts the app from scratch: pushes the launcher activity, then each
  /// welcome activity in manifest order (skipping the launcher if listed).
  /// All of these must be locally available (they live in the base bundle).
  void launch_app(const std::string& app_id);

  /// Starts the activity the intent resolves to, fetching its feature bundle
  /// first when it is not yet loaded (cold start; at most one fetch per
  /// feature for the lifetime of the install). Warm when no fetch was needed.
  /// StoreUnavailable propagates with stack and install state unchanged.
  NavResult navigate(BundleStore& store, const std::string& app_id, const IntentObj& intent);

  /// Pops the top activity (must belong to `app_id`), releasing its stub slot
  /// and resuming the one beneath. InvalidScript when the stack is empty.
  void back(const std::string& app_id);

  /// Eagerly fetches the given feature bundles; each counts as one fetch and
  /// one cold start, making every later visit warm.
  void prefetch(BundleStore& store, const std::string& app_id,
                const std::vector<std::string>& activities);

  /// Re-merges previously loaded features after a device restart, without
  /// touching metrics.
  void restore_features(BundleStore& store, const std::string& app_id,
                        const std::vector<std::string>& activities);

  /// Drives one replay script through the runtime and returns the metrics of
  /// just that session. Script faults raise MissingAtRuntime; the device's
  /// cumulative metrics still record everything up to the fault.
  RunMetrics run_session(BundleStore& store, const std::string& app_id,
                         const ReplayScript& script);

  const std::vector<StackFrame>& activity_stack() const { return stack_; }
  const InstallState* install_state(const std::string& app_id) const;
  InstallState* install_state(const std::string& app_id);
  const RunMetrics& metrics() const { return metrics_; }
  int stub_pool_size() const { return static_cast<int>(stub_pool_.size()); }
  int stubs_in_use() const;

 private:
  struct StubSlot {
    bool occupied = false;
  };

  int acquire_stub();
  void release_stub(int slot);
  void push_activity(const std::string& app_id, const std::string& activity,
                     RunMetrics* session);
  void enter_or_fault(InstallState& state, const std::string& activity);
  NavResult start_resolved(BundleStore& store, InstallState& state,
                           const std::string& activity, RunMetrics* session);
  void record(const LifecycleEvent& ev, RunMetrics* session);
  const std::string& foreground_of(const std::string& app_id) const;

  std::vector<StubSlot> stub_pool_;
  std::map<std::string, InstallState> installed_;
  std::vector<StackFrame> stack_;
  RunMetrics metrics_;
  // Per-app walk caches; sound because availability only ever grows.
  std::map<std::string, WalkMemo> memos_;
};

/// Reference semantics: runs the script against the intact, fully installed
/// package with no virtualization, no stubs and no fetches. Produces the
/// lifecycle trace a stock runtime would.
RunMetrics run_direct(const AppPackage& app, const ReplayScript& script);

}  // namespace appsplit
