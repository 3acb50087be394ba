#pragma once

#include <optional>
#include <vector>

#include "sgvi/graph.hpp"
#include "sgvi/potential_model.hpp"

namespace sgvi {

// One feature-map evaluation scoring node `target`: its unary term (no
// `other`) or the pairwise term it receives from neighbour `other`.
struct ScoreTerm {
  MapKind kind;
  NodeId target;
  std::optional<NodeId> other;
};

// Terms that score `target`: the unary map first, then one pairwise term per
// neighbour in ascending id order. The global node is never a target.
std::vector<ScoreTerm> score_terms(const SceneFactorGraph& graph, NodeId target);

// Map input for a term: x_target for unary maps; for pairwise maps the
// concatenation (object, predicate) for both object-predicate maps,
// (self, other) otherwise.
Vector term_input(const SceneFactorGraph& graph, const ScoreTerm& term);

// Feature-map outputs of one graph laid out as potentials.
//
// The joint log score of a relaxed labelling z is
//
//   sum_i unary_i . z_i + sum_terms z_target^T W z_other,  W = g 1^T,
//
// so each pairwise term equals (g . z_target) * sum(z_other). With z on the
// simplex the neighbour factor is 1, which is the message form g . z_target.
// Higher scores mean more compatible labellings.
struct PotentialTables {
  struct Pairwise {
    MapKind kind;
    NodeId target;
    NodeId other;
    Vector g;
  };

  std::vector<Vector> unary;  // empty for the global node
  std::vector<Pairwise> pairwise;

  double score(const RelaxedAssignment& z) const;
  double score(const Assignment& a) const;
  // Unary plus every message into `node`.
  Vector local_logits(NodeId node) const;
};

PotentialTables materialize_potentials(const SceneFactorGraph& graph,
                                       const PotentialModel& model);

// log s_theta(x, z). Throws ShapeError naming the node when a vector of z
// does not match its vocabulary.
double joint_log_score(const SceneFactorGraph& graph, const PotentialModel& model,
                       const RelaxedAssignment& z);

}  // namespace sgvi
