// Microbenchmarks for the hot paths: closure computation, decomposition,
// package/bundle serialization, and replay-driven recovery.

#include <benchmark/benchmark.h>

#include <map>
#include <set>
#include <string>

#include "appsplit/app_model.hpp"
#include "appsplit/corpus.hpp"
#include "appsplit/decomposer.hpp"
#include "appsplit/graphs.hpp"
#include "appsplit/recovery.hpp"

using namespace appsplit;

namespace {

// One synthetic package per scale, built once. `scale` roughly multiplies
// activity/helper/resource counts.
const AppPackage& sample_app(int scale) {
  static std::map<int, AppPackage> cache;
  auto it = cache.find(scale);
  if (it == cache.end()) {
    CorpusParams params;
    params.seed = 11;
    params.activity_count = {scale, scale};
    params.pojo_count = {scale * 3, scale * 3};
    params.resource_count = {scale * 4, scale * 4};
    params.share_ratio = 0.4;
    it = cache.emplace(scale, gen_app(params, 0)).first;
  }
  return it->second;
}

void BM_StaticClosures(benchmark::State& state) {
  const AppPackage& app = sample_app(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    CallGraph cg = build_call_graph(app, false);
    ResourceGraph rg = build_resource_graph(app);
    ReferRelation refer = build_refer_relation(app);
    std::size_t total = 0;
    for (const std::string& act : app.activity_names()) {
      std::set<std::string> classes = activity_related_classes(cg, app, act);
      for (const std::string& c : classes)
        total += class_related_resources(rg, refer, c).size();
    }
    benchmark::DoNotOptimize(total);
  }
}
BENCHMARK(BM_StaticClosures)->Arg(4)->Arg(8)->Arg(16);

void BM_Decompose(benchmark::State& state) {
  const AppPackage& app = sample_app(static_cast<int>(state.range(0)));
  std::set<std::string> sel{app.manifest.launcher_activity};
  for (auto _ : state) {
    DecompositionPlan plan = decompose(app, sel, {});
    benchmark::DoNotOptimize(plan.base.size_bytes);
  }
}
BENCHMARK(BM_Decompose)->Arg(4)->Arg(8)->Arg(16);

void BM_PackageRoundTrip(benchmark::State& state) {
  const AppPackage& app = sample_app(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    Bytes bytes = serialize_package(app);
    AppPackage back = parse_package(bytes);
    benchmark::DoNotOptimize(back.version);
  }
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations()) *
                          static_cast<std::int64_t>(serialize_package(app).size()));
}
BENCHMARK(BM_PackageRoundTrip)->Arg(8)->Arg(16);

void BM_BundlePack(benchmark::State& state) {
  const AppPackage& app = sample_app(static_cast<int>(state.range(0)));
  static std::map<int, DecompositionPlan> plans;
  auto it = plans.find(static_cast<int>(state.range(0)));
  if (it == plans.end()) {
    it = plans.emplace(static_cast<int>(state.range(0)),
                       decompose(app, {app.manifest.launcher_activity}, {}))
             .first;
  }
  const DecompositionPlan& plan = it->second;
  for (auto _ : state) {
    Bytes bytes = pack_bundle(plan.base, app);
    BundleArchive arch = unpack_bundle(bytes);
    benchmark::DoNotOptimize(arch.size_bytes);
  }
}
BENCHMARK(BM_BundlePack)->Arg(8)->Arg(16);

void BM_Recovery(benchmark::State& state) {
  CorpusParams params;
  params.seed = 29;
  params.dynamic_edge_rate = 0.7;
  AppPackage app = gen_app(params, 0);
  DecompositionPlan plan = decompose(app, {app.manifest.launcher_activity}, {});
  std::vector<ReplayScript> scripts = gen_scripts(app);
  for (auto _ : state) {
    auto [fixed, report] = recover(app, plan, scripts);
    benchmark::DoNotOptimize(report.total_iterations);
  }
}
BENCHMARK(BM_Recovery);

}  // namespace

BENCHMARK_MAIN();
