#pragma once

#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "appsplit/app_model.hpp"

namespace appsplit {

namespace detail {

/// String-keyed directed graph with memoized reachability. Closures are
/// computed once per graph via SCC condensation, so cyclic graphs terminate
/// and repeated queries are cheap.
class DiGraph {
 public:
  void add_node(const std::string& id);
  void add_edge(const std::string& from, const std::string& to);

  bool has_node(const std::string& id) const;
  const std::vector<std::string>& nodes() const { return ids_; }
  std::vector<std::string> successors(const std::string& id) const;

  /// All nodes reachable from `from` by one or more edges.
  std::set<std::string> reachable(const std::string& from) const;

  /// Union of reachable(s) over the seeds, seeds themselves included.
  std::set<std::string> reachable_closure(const std::vector<std::string>& seeds) const;

  std::size_t in_degree(const std::string& id) const;
  std::size_t out_degree(const std::string& id) const;

 private:
  void ensure_closure() const;

  std::map<std::string, int> index_;
  std::vector<std::string> ids_;
  std::vector<std::vector<int>> adjacency_;

  // SCC condensation, built lazily.
  mutable bool closed_ = false;
  mutable std::vector<int> scc_of_;
  mutable std::vector<std::vector<bool>> scc_reach_;
  mutable std::vector<bool> scc_self_loop_;
};

}  // namespace detail

struct CallEdge {
  std::string from;
  std::string to;
  bool dynamic = false;

  bool operator==(const CallEdge&) const = default;
};

/// CG over qualified method ids. When built with include_dynamic=false the
/// dynamic call sites are absent, which is the static-analysis view.
struct CallGraph {
  std::set<std::string> nodes;
  std::vector<CallEdge> edges;
  detail::DiGraph graph;
  bool include_dynamic = false;
};

struct ResourceGraph {
  std::set<std::string> nodes;
  std::vector<std::pair<std::string, std::string>> edges;
  detail::DiGraph graph;
};

/// Direct class-to-resource references, deduplicated.
struct ReferRelation {
  std::set<std::pair<std::string, std::string>> pairs;
  std::map<std::string, std::vector<std::string>> by_class;
};

enum class TransitionKind { Explicit, Implicit };

struct AtgEdge {
  std::string from;
  std::string to;
  TransitionKind via = TransitionKind::Explicit;

  bool operator==(const AtgEdge&) const = default;
};

struct ActivityTransitionGraph {
  std::set<std::string> nodes;
  std::vector<AtgEdge> edges;
  detail::DiGraph graph;
};

enum class ActivityRole { Isolated, ReceivingOnly, Mediate, Source };

std::string to_string(ActivityRole role);

CallGraph build_call_graph(const AppPackage& app, bool include_dynamic);
ResourceGraph build_resource_graph(const AppPackage& app);
ReferRelation build_refer_relation(const AppPackage& app);

/// ARCLS: the activity itself plus every Pojo class owning a method reachable
/// from any of the activity's methods. Traversal crosses methods of any class;
/// only Pojo owners (and the activity) appear in the result.
std::set<std::string> activity_related_classes(const CallGraph& cg,
                                               const AppPackage& app,
                                               const std::string& activity);

/// CRRES: directly referred resources plus everything reachable from them in
/// the resource graph. Terminates on cycles.
std::set<std::string> class_related_resources(const ResourceGraph& rg,
                                              const ReferRelation& refer,
                                              const std::string& class_name);

/// Resolves an implicit (action, categories) pair against the manifest:
/// filters with an equal action whose categories contain all of the intent's.
/// Returns matches sorted by class name.
std::vector<std::string> matching_activities(const Manifest& manifest,
                                             const std::string& action,
                                             const std::vector<std::string>& categories);

ActivityTransitionGraph build_atg(const AppPackage& app);

ActivityRole classify_activity(const ActivityTransitionGraph& atg,
                               const std::string& activity);

/// DOT dump of class/resource nodes with static/dynamic call edges, refer
/// edges, and resource edges. Debug aid for the `graph` CLI command.
std::string to_dot(const AppPackage& app);

}  // namespace appsplit
