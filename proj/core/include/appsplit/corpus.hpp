#pragma once

#include <cstdint>
#include <vector>

#include "appsplit/app_model.hpp"
#include "appsplit/recovery.hpp"
#include "appsplit/usage_analytics.hpp"

namespace appsplit {

/// Inclusive integer range.
struct CountRange {
  int lo = 0;
  int hi = 0;
};

/// Knobs for the synthetic package generator. Everything downstream of the
/// seed is deterministic: the same (params, index) always yields the same
/// package, byte for byte.
struct CorpusParams {
  std::uint64_t seed = 1;
  CountRange activity_count{4, 10};
  CountRange pojo_count{6, 24};
  CountRange resource_count{8, 32};
  double share_ratio = 0.35;       // how often helpers/resources are shared across activities
  double dynamic_edge_rate = 0.0;  // fraction of activities gaining a reflective call chain
  CountRange class_size{64, 4096};     // bytes
  CountRange resource_size{32, 8192};  // bytes
  double zipf_exponent = 1.1;          // skew of the synthetic usage distribution
};

/// Generates the index-th package of the corpus described by `params`.
AppPackage gen_app(const CorpusParams& params, int index);

/// Generates `count` packages (indices 0..count-1).
std::vector<AppPackage> gen_corpus(const CorpusParams& params, int count);

/// One script per non-launcher activity: launch the app, then navigate along
/// the app's transition graph to the target (tapping one of the target's
/// methods when it has more than one). Scripts are replayable against both
/// the intact package and any decomposition of it.
std::vector<ReplayScript> gen_scripts(const AppPackage& app);

/// Synthetic usage log for one app: a fixed population of users whose visits
/// follow a Zipf distribution over the app's activities (exponent from
/// params), seeded deterministically from the app id.
UsageDataset gen_usage(const AppPackage& app, const CorpusParams& params);

}  // namespace appsplit
