#include "appsplit/graphs.hpp"

#include <algorithm>
#include <sstream>
#include <tuple>

#include "appsplit/errors.hpp"

namespace appsplit {

namespace detail {

void DiGraph::add_node(const std::string& id) {
  if (index_.emplace(id, static_cast<int>(ids_.size())).second) {
    ids_.push_back(id);
    adjacency_.emplace_back();
    closed_ = false;
  }
}

void DiGraph::add_edge(const std::string& from, const std::string& to) {
  add_node(from);
  add_node(to);
  int u = index_.at(from);
  int v = index_.at(to);
  auto& next = adjacency_[u];
  if (std::find(next.begin(), next.end(), v) == next.end()) {
    next.push_back(v);
    closed_ = false;
  }
}

bool DiGraph::has_node(const std::string& id) const { return index_.count(id) != 0; }

std::vector<std::string> DiGraph::successors(const std::string& id) const {
  std::vector<std::string> out;
  auto it = index_.find(id);
  if (it == index_.end()) return out;
  for (int v : adjacency_[it->second]) out.push_back(ids_[v]);
  return out;
}

std::size_t DiGraph::in_degree(const std::string& id) const {
  auto it = index_.find(id);
  if (it == index_.end()) return 0;
  std::size_t n = 0;
  for (const auto& next : adjacency_) {
    n += static_cast<std::size_t>(std::count(next.begin(), next.end(), it->second));
  }
  return n;
}

std::size_t DiGraph::out_degree(const std::string& id) const {
  auto it = index_.find(id);
  if (it == index_.end()) return 0;
  return adjacency_[it->second].size();
}

// Tarjan (iterative), then per-SCC reachability bitsets in completion order.
// Completion order is reverse-topological on the condensation, so every
// successor SCC's bitset is final before it is folded in.
void DiGraph::ensure_closure() const {
  if (closed_) return;
  int n = static_cast<int>(ids_.size());
  scc_of_.assign(n, -1);
  std::vector<int> low(n, 0), disc(n, -1), stack;
  std::vector<bool> on_stack(n, false);
  int time = 0;
  int scc_count = 0;

  struct Frame {
    int node;
    std::size_t next_child;
  };
  for (int root = 0; root < n; ++root) {
    if (disc[root] != -1) continue;
    std::vector<Frame> frames{{root, 0}};
    disc[root] = low[root] = time++;
    stack.push_back(root);
    on_stack[root] = true;
    while (!frames.empty()) {
      Frame& f = frames.back();
      if (f.next_child < adjacency_[f.node].size()) {
        int child = adjacency_[f.node][f.next_child++];
        if (disc[child] == -1) {
          disc[child] = low[child] = time++;
          stack.push_back(child);
          on_stack[child] = true;
          frames.push_back({child, 0});
        } else if (on_stack[child]) {
          low[f.node] = std::min(low[f.node], disc[child]);
        }
      } else {
        if (low[f.node] == disc[f.node]) {
          while (true) {
            int v = stack.back();
            stack.pop_back();
            on_stack[v] = false;
            scc_of_[v] = scc_count;
            if (v == f.node) break;
          }
          ++scc_count;
        }
        int done = f.node;
        frames.pop_back();
        if (!frames.empty()) low[frames.back().node] = std::min(low[frames.back().node], low[done]);
      }
    }
  }

  // SCC sizes and self-loops decide whether an SCC reaches itself.
  std::vector<int> scc_size(scc_count, 0);
  for (int v = 0; v < n; ++v) ++scc_size[scc_of_[v]];
  scc_self_loop_.assign(scc_count, false);
  scc_reach_.assign(scc_count, std::vector<bool>(scc_count, false));
  for (int u = 0; u < n; ++u) {
    for (int v : adjacency_[u]) {
      if (u == v) scc_self_loop_[scc_of_[u]] = true;
    }
  }

  for (int s = 0; s < scc_count; ++s) {
    if (scc_size[s] > 1 || scc_self_loop_[s]) scc_reach_[s][s] = true;
  }
  // Fold successor bitsets in ascending SCC id. Ids ascend in completion
  // order and every cross-SCC edge points at an earlier-completed SCC, so the
  // folded-in bitset is always final.
  std::vector<std::vector<int>> members(scc_count);
  for (int v = 0; v < n; ++v) members[scc_of_[v]].push_back(v);
  for (int s = 0; s < scc_count; ++s) {
    auto& out = scc_reach_[s];
    for (int u : members[s]) {
      for (int v : adjacency_[u]) {
        int sv = scc_of_[v];
        if (sv == s) continue;
        out[sv] = true;
        const auto& in = scc_reach_[sv];
        for (int t = 0; t < scc_count; ++t) {
          if (in[t]) out[t] = true;
        }
      }
    }
  }
  closed_ = true;
}

std::set<std::string> DiGraph::reachable(const std::string& from) const {
  std::set<std::string> out;
  auto it = index_.find(from);
  if (it == index_.end()) return out;
  ensure_closure();
  const auto& reach = scc_reach_[scc_of_[it->second]];
  for (int v = 0; v < static_cast<int>(ids_.size()); ++v) {
    if (reach[scc_of_[v]]) out.insert(ids_[v]);
  }
  return out;
}

std::set<std::string> DiGraph::reachable_closure(const std::vector<std::string>& seeds) const {
  ensure_closure();
  std::vector<bool> scc_hit(scc_reach_.size(), false);
  std::set<std::string> out;
  for (const std::string& s : seeds) {
    auto it = index_.find(s);
    if (it == index_.end()) continue;
    out.insert(s);
    const auto& reach = scc_reach_[scc_of_[it->second]];
    for (std::size_t t = 0; t < reach.size(); ++t) {
      if (reach[t]) scc_hit[t] = true;
    }
  }
  for (int v = 0; v < static_cast<int>(ids_.size()); ++v) {
    if (scc_hit[scc_of_[v]]) out.insert(ids_[v]);
  }
  return out;
}

}  // namespace detail

std::string to_string(ActivityRole role) {
  switch (role) {
    case ActivityRole::Isolated: return "isolated";
    case ActivityRole::ReceivingOnly: return "receiving_only";
    case ActivityRole::Mediate: return "mediate";
    case ActivityRole::Source: return "source";
  }
  return "unknown";
}

CallGraph build_call_graph(const AppPackage& app, bool include_dynamic) {
  CallGraph cg;
  cg.include_dynamic = include_dynamic;
  for (const ClassUnit& c : app.classes) {
    for (const MethodDef& m : c.methods) {
      std::string id = c.name + "." + m.name;
      cg.nodes.insert(id);
      cg.graph.add_node(id);
    }
  }
  std::set<std::tuple<std::string, std::string, bool>> seen;
  for (const ClassUnit& c : app.classes) {
    for (const MethodDef& m : c.methods) {
      std::string from = c.name + "." + m.name;
      for (const CallSite& call : m.calls) {
        if (call.dynamic && !include_dynamic) continue;
        if (!seen.emplace(from, call.target_method, call.dynamic).second) continue;
        cg.edges.push_back({from, call.target_method, call.dynamic});
        cg.graph.add_edge(from, call.target_method);
      }
    }
  }
  return cg;
}

ResourceGraph build_resource_graph(const AppPackage& app) {
  ResourceGraph rg;
  for (const ResourceItem& r : app.resources) {
    rg.nodes.insert(r.id);
    rg.graph.add_node(r.id);
  }
  std::set<std::pair<std::string, std::string>> seen;
  for (const ResourceItem& r : app.resources) {
    for (const std::string& ref : r.refs) {
      if (!seen.emplace(r.id, ref).second) continue;
      rg.edges.push_back({r.id, ref});
      rg.graph.add_edge(r.id, ref);
    }
  }
  return rg;
}

ReferRelation build_refer_relation(const AppPackage& app) {
  ReferRelation refer;
  for (const ClassUnit& c : app.classes) {
    for (const MethodDef& m : c.methods) {
      for (const std::string& ref : m.resource_refs) refer.pairs.emplace(c.name, ref);
    }
  }
  for (const auto& [cls, res] : refer.pairs) refer.by_class[cls].push_back(res);
  return refer;
}

std::set<std::string> activity_related_classes(const CallGraph& cg, const AppPackage& app,
                                               const std::string& activity) {
  if (!app.is_activity(activity))
    throw UnknownActivity("'" + activity + "' is not a declared activity");
  const ClassUnit* cls = app.find_class(activity);

  std::vector<std::string> seeds;
  for (const MethodDef& m : cls->methods) seeds.push_back(activity + "." + m.name);
  std::set<std::string> methods = cg.graph.reachable_closure(seeds);

  std::set<std::string> out{activity};
  for (const std::string& id : methods) {
    std::string owner = split_method_id(id).first;
    const ClassUnit* owner_cls = app.find_class(owner);
    if (owner_cls != nullptr && owner_cls->kind == ClassKind::Pojo) out.insert(owner);
  }
  return out;
}

std::set<std::string> class_related_resources(const ResourceGraph& rg,
                                              const ReferRelation& refer,
                                              const std::string& class_name) {
  auto it = refer.by_class.find(class_name);
  if (it == refer.by_class.end()) return {};
  return rg.graph.reachable_closure(it->second);
}

std::vector<std::string> matching_activities(const Manifest& manifest,
                                             const std::string& action,
                                             const std::vector<std::string>& categories) {
  std::vector<std::string> wanted = categories;
  std::sort(wanted.begin(), wanted.end());
  std::vector<std::string> out;
  for (const ActivityDecl& a : manifest.activities) {
    for (const IntentFilter& f : a.intent_filters) {
      if (f.action != action) continue;
      std::vector<std::string> have = f.categories;
      std::sort(have.begin(), have.end());
      if (std::includes(have.begin(), have.end(), wanted.begin(), wanted.end())) {
        out.push_back(a.class_name);
        break;
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

ActivityTransitionGraph build_atg(const AppPackage& app) {
  ActivityTransitionGraph atg;
  for (const ActivityDecl& a : app.manifest.activities) {
    atg.nodes.insert(a.class_name);
    atg.graph.add_node(a.class_name);
  }

  // Launch sites owned by any method in an activity's static closure belong
  // to that activity's outgoing transitions.
  CallGraph cg = build_call_graph(app, false);
  std::map<std::string, std::vector<LaunchSite>> sites_by_method;
  for (const ClassUnit& c : app.classes) {
    for (const MethodDef& m : c.methods) {
      if (!m.launches.empty()) sites_by_method[c.name + "." + m.name] = m.launches;
    }
  }

  std::set<std::tuple<std::string, std::string, TransitionKind>> seen;
  for (const ActivityDecl& a : app.manifest.activities) {
    const ClassUnit* cls = app.find_class(a.class_name);
    std::vector<std::string> seeds;
    for (const MethodDef& m : cls->methods) seeds.push_back(a.class_name + "." + m.name);
    std::set<std::string> methods = cg.graph.reachable_closure(seeds);

    for (const std::string& id : methods) {
      auto it = sites_by_method.find(id);
      if (it == sites_by_method.end()) continue;
      for (const LaunchSite& site : it->second) {
        if (site.kind == LaunchSite::Kind::Explicit) {
          seen.emplace(a.class_name, site.target_activity, TransitionKind::Explicit);
        } else {
          for (const std::string& target :
               matching_activities(app.manifest, site.action, site.categories)) {
            seen.emplace(a.class_name, target, TransitionKind::Implicit);
          }
        }
      }
    }
  }
  for (const auto& [from, to, via] : seen) {
    atg.edges.push_back({from, to, via});
    atg.graph.add_edge(from, to);
  }
  return atg;
}

ActivityRole classify_activity(const ActivityTransitionGraph& atg, const std::string& activity) {
  if (atg.nodes.count(activity) == 0)
    throw UnknownActivity("'" + activity + "' is not in the transition graph");
  std::size_t in = atg.graph.in_degree(activity);
  std::size_t out = atg.graph.out_degree(activity);
  if (in == 0 && out == 0) return ActivityRole::Isolated;
  if (in > 0 && out == 0) return ActivityRole::ReceivingOnly;
  if (in > 0 && out > 0) return ActivityRole::Mediate;
  return ActivityRole::Source;
}

std::string to_dot(const AppPackage& app) {
  std::ostringstream out;
  out << "digraph app {\n  rankdir=LR;\n";
  for (const ClassUnit& c : app.classes) {
    out << "  \"" << c.name << "\" [shape=box";
    if (c.kind == ClassKind::Activity) out << ",style=bold";
    out << "];\n";
  }
  for (const ResourceItem& r : app.resources) {
    out << "  \"" << r.id << "\" [shape=ellipse];\n";
  }

  std::set<std::tuple<std::string, std::string, bool>> call_edges;
  std::set<std::pair<std::string, std::string>> refer_edges;
  for (const ClassUnit& c : app.classes) {
    for (const MethodDef& m : c.methods) {
      for (const CallSite& call : m.calls) {
        call_edges.emplace(c.name, split_method_id(call.target_method).first, call.dynamic);
      }
      for (const std::string& ref : m.resource_refs) refer_edges.emplace(c.name, ref);
    }
  }
  for (const auto& [from, to, dynamic] : call_edges) {
    out << "  \"" << from << "\" -> \"" << to << "\"";
    if (dynamic) out << " [style=dashed]";
    out << ";\n";
  }
  for (const auto& [from, to] : refer_edges) {
    out << "  \"" << from << "\" -> \"" << to << "\" [style=dotted];\n";
  }
  std::set<std::pair<std::string, std::string>> res_edges;
  for (const ResourceItem& r : app.resources) {
    for (const std::string& ref : r.refs) res_edges.emplace(r.id, ref);
  }
  for (const auto& [from, to] : res_edges) {
    out << "  \"" << from << "\" -> \"" << to << "\" [color=gray];\n";
  }
  out << "}\n";
  return out.str();
}

}  // namespace appsplit
