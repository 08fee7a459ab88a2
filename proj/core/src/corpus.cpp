#include "appsplit/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <queue>

#include "appsplit/errors.hpp"
#include "appsplit/graphs.hpp"
#include "digest.hpp"
#include "rng.hpp"

namespace appsplit {

namespace detail {

Zipf::Zipf(int n, double exponent) {
  cumulative_.reserve(static_cast<std::size_t>(n));
  double sum = 0;
  for (int r = 1; r <= n; ++r) {
    sum += 1.0 / std::pow(static_cast<double>(r), exponent);
    cumulative_.push_back(sum);
  }
}

int Zipf::sample(Rng& rng) const {
  double u = rng.uniform01() * cumulative_.back();
  auto it = std::lower_bound(cumulative_.begin(), cumulative_.end(), u);
  if (it == cumulative_.end()) --it;
  return static_cast<int>(it - cumulative_.begin());
}

}  // namespace detail

namespace {

using detail::Rng;

std::string pad2(int i) {
  std::string s = std::to_string(i);
  return s.size() < 2 ? "0" + s : s;
}

std::string pad3(int i) {
  std::string s = std::to_string(i);
  while (s.size() < 3) s = "0" + s;
  return s;
}

std::string act_name(int i) { return "Act" + pad2(i); }
std::string pojo_name(int i) { return "Util" + pad2(i); }

int clamp_count(const CountRange& r, Rng& rng) {
  if (r.lo > r.hi || r.lo < 0) throw InvalidSelection("bad count range in corpus params");
  return rng.uniform_int(r.lo, r.hi);
}

std::uint64_t size_in(const CountRange& r, Rng& rng) {
  return static_cast<std::uint64_t>(rng.uniform_int(r.lo, r.hi));
}

}  // namespace

AppPackage gen_app(const CorpusParams& params, int index) {
  Rng rng(detail::derive_seed(params.seed, static_cast<std::uint64_t>(index)));

  AppPackage app;
  app.app_id = "app" + pad3(index);
  app.version = 1;

  int n_act = clamp_count(params.activity_count, rng);
  if (n_act < 1) n_act = 1;
  int n_pojo = clamp_count(params.pojo_count, rng);
  int n_res = clamp_count(params.resource_count, rng);

  // Navigation tree rooted at the launcher, plus per-edge intent style.
  std::vector<int> parent(static_cast<std::size_t>(n_act), -1);
  std::vector<bool> implicit(static_cast<std::size_t>(n_act), false);
  for (int i = 1; i < n_act; ++i) {
    parent[static_cast<std::size_t>(i)] = rng.uniform_int(0, i - 1);
    implicit[static_cast<std::size_t>(i)] = rng.chance(0.25);
  }

  // Resources: one screen layout per activity (when the budget allows), the
  // rest drawables. Layouts may pull in a drawable.
  int n_layout = std::min(n_act, n_res);
  std::vector<std::string> resource_ids;
  for (int r = 0; r < n_res; ++r) {
    resource_ids.push_back(r < n_layout ? "layout/scr" + pad2(r)
                                        : "drawable/img" + pad2(r - n_layout));
  }
  for (int r = 0; r < n_res; ++r) {
    ResourceItem item;
    item.id = resource_ids[static_cast<std::size_t>(r)];
    item.size_bytes = size_in(params.resource_size, rng);
    if (r < n_layout && n_res > n_layout && rng.chance(0.5)) {
      int d = rng.uniform_int(n_layout, n_res - 1);
      item.refs.push_back(resource_ids[static_cast<std::size_t>(d)]);
    }
    app.resources.push_back(std::move(item));
  }

  // Helper classes: shared ones are callable from any activity, dedicated
  // ones belong to exactly one. Some helpers chain to a later compatible one.
  std::vector<int> pojo_owner(static_cast<std::size_t>(n_pojo), -1);
  std::vector<ClassUnit> pojos;
  for (int j = 0; j < n_pojo; ++j) {
    if (!rng.chance(params.share_ratio)) pojo_owner[static_cast<std::size_t>(j)] = j % n_act;
    ClassUnit cls;
    cls.name = pojo_name(j);
    cls.kind = ClassKind::Pojo;
    cls.size_bytes = size_in(params.class_size, rng);
    cls.methods.push_back({"run", {}, {}, {}});
    pojos.push_back(std::move(cls));
  }
  for (int j = 0; j < n_pojo; ++j) {
    if (j + 1 >= n_pojo || !rng.chance(0.35)) continue;
    int k = rng.uniform_int(j + 1, n_pojo - 1);
    int jo = pojo_owner[static_cast<std::size_t>(j)];
    int ko = pojo_owner[static_cast<std::size_t>(k)];
    if (ko == -1 || ko == jo) {
      pojos[static_cast<std::size_t>(j)].methods[0].calls.push_back(
          {pojo_name(k) + ".run", false});
    }
  }

  // Activities. onCreate shows the screen, calls helpers, and navigates to
  // the activity's children; a clickable handler exists on most of them.
  std::vector<std::vector<int>> children(static_cast<std::size_t>(n_act));
  for (int i = 1; i < n_act; ++i) children[static_cast<std::size_t>(parent[i])].push_back(i);

  for (int i = 0; i < n_act; ++i) {
    ClassUnit cls;
    cls.name = act_name(i);
    cls.kind = ClassKind::Activity;
    cls.size_bytes = size_in(params.class_size, rng);

    MethodDef on_create{"onCreate", {}, {}, {}};
    if (n_res > 0) {
      on_create.resource_refs.push_back(resource_ids[static_cast<std::size_t>(i % n_res)]);
      if (rng.chance(0.4)) {
        int extra = rng.uniform_int(0, n_res - 1);
        std::string id = resource_ids[static_cast<std::size_t>(extra)];
        if (std::find(on_create.resource_refs.begin(), on_create.resource_refs.end(), id) ==
            on_create.resource_refs.end())
          on_create.resource_refs.push_back(id);
      }
    }
    std::vector<int> pool;
    for (int j = 0; j < n_pojo; ++j) {
      int owner = pojo_owner[static_cast<std::size_t>(j)];
      if (owner == -1 || owner == i) pool.push_back(j);
    }
    if (!pool.empty()) {
      int calls = rng.uniform_int(1, 2);
      for (int c = 0; c < calls; ++c) {
        int j = pool[static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(pool.size()) - 1))];
        on_create.calls.push_back({pojo_name(j) + ".run", false});
      }
    }
    for (int child : children[static_cast<std::size_t>(i)]) {
      LaunchSite site;
      if (implicit[static_cast<std::size_t>(child)]) {
        site.kind = LaunchSite::Kind::Implicit;
        site.action = "act." + app.app_id + "." + act_name(child);
      } else {
        site.kind = LaunchSite::Kind::Explicit;
        site.target_activity = act_name(child);
      }
      on_create.launches.push_back(std::move(site));
    }
    cls.methods.push_back(std::move(on_create));

    if (rng.chance(0.6)) {
      MethodDef on_click{"onClick", {}, {}, {}};
      if (n_res > 0 && rng.chance(0.5))
        on_click.resource_refs.push_back(
            resource_ids[static_cast<std::size_t>(rng.uniform_int(0, n_res - 1))]);
      if (!pool.empty() && rng.chance(0.5)) {
        int j = pool[static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(pool.size()) - 1))];
        on_click.calls.push_back({pojo_name(j) + ".run", false});
      }
      cls.methods.push_back(std::move(on_click));
    }

    app.classes.push_back(std::move(cls));

    ActivityDecl decl;
    decl.class_name = act_name(i);
    if (implicit[static_cast<std::size_t>(i)]) {
      decl.intent_filters.push_back({"act." + app.app_id + "." + act_name(i), {}});
    }
    app.manifest.activities.push_back(std::move(decl));
  }
  app.manifest.launcher_activity = act_name(0);
  for (ClassUnit& cls : pojos) app.classes.push_back(std::move(cls));

  // Reflective chains: invisible to the static closure, found at run time.
  // Each affected activity calls a hidden helper chain through a dynamic call
  // site; chain links may pull a hidden resource of their own.
  for (int i = 0; i < n_act; ++i) {
    if (!rng.chance(params.dynamic_edge_rate)) continue;
    int depth = rng.uniform_int(1, 3);
    for (int k = 0; k < depth; ++k) {
      std::string name = "Hid" + pad2(i) + static_cast<char>('a' + k);
      ClassUnit cls;
      cls.name = name;
      cls.kind = ClassKind::Pojo;
      cls.size_bytes = size_in(params.class_size, rng);
      MethodDef run{"run", {}, {}, {}};
      if (rng.chance(0.5)) {
        ResourceItem hidden;
        hidden.id = "raw/hid" + pad2(i) + static_cast<char>('a' + k);
        hidden.size_bytes = size_in(params.resource_size, rng);
        run.resource_refs.push_back(hidden.id);
        app.resources.push_back(std::move(hidden));
      }
      if (k + 1 < depth)
        run.calls.push_back({"Hid" + pad2(i) + static_cast<char>('a' + k + 1) + ".run", false});
      cls.methods.push_back(std::move(run));
      app.classes.push_back(std::move(cls));
    }
    for (ClassUnit& cls : app.classes) {
      if (cls.name != act_name(i)) continue;
      cls.methods[0].calls.push_back({"Hid" + pad2(i) + "a.run", true});
      break;
    }
  }

  // A background service keeps the non-activity component path exercised.
  if (rng.chance(0.4)) {
    ClassUnit svc;
    svc.name = "SvcBg";
    svc.kind = ClassKind::Service;
    svc.size_bytes = size_in(params.class_size, rng);
    MethodDef tick{"tick", {}, {}, {}};
    if (n_res > 0 && rng.chance(0.3))
      tick.resource_refs.push_back(
          resource_ids[static_cast<std::size_t>(rng.uniform_int(0, n_res - 1))]);
    svc.methods.push_back(std::move(tick));
    app.classes.push_back(std::move(svc));
    app.manifest.other_components.push_back({"SvcBg", ComponentKind::Service});
  }

  int n_assets = rng.uniform_int(1, 3);
  for (int k = 0; k < n_assets; ++k) {
    app.assets.push_back({"assets/data" + std::to_string(k) + ".bin",
                          size_in(params.resource_size, rng)});
  }
  int n_other = rng.uniform_int(1, 2);
  for (int k = 0; k < n_other; ++k) {
    app.other.push_back({"lib/libnative" + std::to_string(k) + ".so",
                         size_in(params.class_size, rng)});
  }

  canonicalize(app);
  validate_package(app);
  return app;
}

std::vector<AppPackage> gen_corpus(const CorpusParams& params, int count) {
  std::vector<AppPackage> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) out.push_back(gen_app(params, i));
  return out;
}

namespace {

/// NAV index driving `from` to `to`: position in the flattened launch-site
/// list whose resolved target is `to`.
int nav_index_to(const AppPackage& app, const std::string& from, const std::string& to) {
  const ClassUnit* cls = app.find_class(from);
  auto sites = launch_sites_of(*cls);
  for (std::size_t i = 0; i < sites.size(); ++i) {
    const LaunchSite& site = sites[i].second;
    if (site.kind == LaunchSite::Kind::Explicit) {
      if (site.target_activity == to) return static_cast<int>(i);
    } else {
      auto matches = matching_activities(app.manifest, site.action, site.categories);
      if (!matches.empty() && matches.front() == to) return static_cast<int>(i);
    }
  }
  throw InvalidScript("no launch site from '" + from + "' to '" + to + "'");
}

}  // namespace

std::vector<ReplayScript> gen_scripts(const AppPackage& app) {
  ActivityTransitionGraph atg = build_atg(app);
  const std::string& launcher = app.manifest.launcher_activity;

  // Shortest navigation path to every activity (BFS from the launcher).
  std::map<std::string, std::string> came_from;
  std::queue<std::string> frontier;
  frontier.push(launcher);
  came_from[launcher] = launcher;
  while (!frontier.empty()) {
    std::string cur = frontier.front();
    frontier.pop();
    for (const std::string& next : atg.graph.successors(cur)) {
      if (came_from.count(next) != 0) continue;
      came_from[next] = cur;
      frontier.push(next);
    }
  }

  std::vector<ReplayScript> scripts;
  for (const ActivityDecl& decl : app.manifest.activities) {
    const std::string& target = decl.class_name;
    if (came_from.count(target) == 0) continue;  // unreachable by navigation

    ReplayScript script;
    script.name = "visit-" + target;
    script.target_activity = target;
    script.actions.push_back({Action::Kind::Launch, "", 0});

    std::vector<std::string> path;
    for (std::string cur = target; cur != launcher; cur = came_from[cur]) path.push_back(cur);
    std::reverse(path.begin(), path.end());
    std::string cur = launcher;
    for (const std::string& next : path) {
      script.actions.push_back({Action::Kind::Navigate, "", nav_index_to(app, cur, next)});
      cur = next;
    }
    const ClassUnit* cls = app.find_class(target);
    for (const MethodDef& m : cls->methods) {
      if (m.name == "onClick") {
        script.actions.push_back({Action::Kind::Tap, target + ".onClick", 0});
        break;
      }
    }
    scripts.push_back(std::move(script));
  }
  return scripts;
}

UsageDataset gen_usage(const AppPackage& app, const CorpusParams& params) {
  Rng rng(detail::derive_seed(params.seed, detail::fnv1a64(app.app_id)));
  std::vector<std::string> activities = app.activity_names();
  detail::Zipf zipf(static_cast<int>(activities.size()), params.zipf_exponent);

  constexpr int kUsers = 25;
  constexpr int kRecordsPerUser = 40;
  UsageDataset dataset;
  long long ts = 1700000000;
  for (int u = 0; u < kUsers; ++u) {
    std::string user = "u" + pad2(u);
    for (int k = 0; k < kRecordsPerUser; ++k) {
      int rank = zipf.sample(rng);
      dataset.records.push_back({std::to_string(ts++), user, app.app_id,
                                 activities[static_cast<std::size_t>(rank)]});
    }
  }
  return dataset;
}

}  // namespace appsplit
