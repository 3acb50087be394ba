#include "sgvi/scoring.hpp"

#include "sgvi/error.hpp"

namespace sgvi {

namespace {

MapKind pairwise_kind(NodeKind target, NodeKind other) {
  if (target == NodeKind::Object) {
    switch (other) {
      case NodeKind::Predicate:
        return MapKind::ObjectPredicate;
      case NodeKind::Object:
        return MapKind::ObjectObject;
      case NodeKind::Global:
        return MapKind::ObjectGlobal;
    }
  }
  if (target == NodeKind::Predicate) {
    if (other == NodeKind::Object) return MapKind::PredicateObject;
    if (other == NodeKind::Global) return MapKind::PredicateGlobal;
  }
  throw GraphError("no feature map scores a " + std::string(to_string(target)) +
                   " from a " + std::string(to_string(other)) + " neighbour");
}

}  // namespace

std::vector<ScoreTerm> score_terms(const SceneFactorGraph& graph,
                                   NodeId target) {
  const NodeKind kind = graph.kind(target);
  if (kind == NodeKind::Global) {
    throw ArgumentError("the global node carries no score terms");
  }
  std::vector<ScoreTerm> terms;
  terms.push_back({kind == NodeKind::Object ? MapKind::UnaryObject
                                            : MapKind::UnaryPredicate,
                   target, std::nullopt});
  for (NodeId other : graph.neighbors(target)) {
    terms.push_back({pairwise_kind(kind, graph.kind(other)), target, other});
  }
  return terms;
}

Vector term_input(const SceneFactorGraph& graph, const ScoreTerm& term) {
  if (!term.other) {
    auto x = graph.features(term.target);
    return Vector(x.begin(), x.end());
  }
  NodeId first = term.target;
  NodeId second = *term.other;
  if (term.kind == MapKind::PredicateObject) std::swap(first, second);
  auto a = graph.features(first);
  auto b = graph.features(second);
  Vector input;
  input.reserve(a.size() + b.size());
  input.insert(input.end(), a.begin(), a.end());
  input.insert(input.end(), b.begin(), b.end());
  return input;
}

PotentialTables materialize_potentials(const SceneFactorGraph& graph,
                                       const PotentialModel& model) {
  model.check_compatible(graph);
  PotentialTables tables;
  tables.unary.resize(graph.num_nodes());
  for (NodeId node : graph.inferred_nodes()) {
    for (const ScoreTerm& term : score_terms(graph, node)) {
      Vector g = model.evaluate(term.kind, term_input(graph, term));
      if (!term.other) {
        tables.unary[node] = std::move(g);
      } else {
        tables.pairwise.push_back({term.kind, node, *term.other, std::move(g)});
      }
    }
  }
  return tables;
}

double PotentialTables::score(const RelaxedAssignment& z) const {
  double total = 0.0;
  for (std::size_t node = 0; node < unary.size(); ++node) {
    if (!unary[node].empty()) total += dot(unary[node], z.labels.at(node));
  }
  for (const Pairwise& term : pairwise) {
    total += dot(term.g, z.labels.at(term.target)) * sum(z.labels.at(term.other));
  }
  return total;
}

double PotentialTables::score(const Assignment& a) const {
  double total = 0.0;
  for (std::size_t node = 0; node < unary.size(); ++node) {
    if (!unary[node].empty()) total += unary[node][a.labels.at(node)];
  }
  for (const Pairwise& term : pairwise) {
    total += term.g[a.labels.at(term.target)];
  }
  return total;
}

Vector PotentialTables::local_logits(NodeId node) const {
  Vector out = unary.at(node);
  for (const Pairwise& term : pairwise) {
    if (term.target != node) continue;
    for (std::size_t k = 0; k < out.size(); ++k) out[k] += term.g[k];
  }
  return out;
}

double joint_log_score(const SceneFactorGraph& graph,
                       const PotentialModel& model, const RelaxedAssignment& z) {
  validate_relaxed(graph, z);
  return materialize_potentials(graph, model).score(z);
}

}  // namespace sgvi
