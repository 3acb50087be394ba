#pragma once

#include <functional>
#include <string>
#include <vector>

#include "sgvi/graph.hpp"
#include "sgvi/potential_model.hpp"

namespace sgvi {

// Exact quantities of the discrete model on a small graph, by enumeration of
// every hard assignment.
struct OracleResult {
  double log_partition = 0.0;
  std::vector<Vector> marginals;          // per node id, global included
  std::vector<Label> max_marginal_labels;  // argmax_k max_{z: z_i = k} score
  Assignment joint_map;
  double joint_map_score = 0.0;
  double state_space = 0.0;
};

using AssignmentScore = std::function<double(const Assignment&)>;

OracleResult exact_inference(const SceneFactorGraph& graph,
                             const AssignmentScore& score,
                             double cap = kDefaultStateSpaceCap);

// Scores hard assignments with the model's joint log score.
OracleResult exact_inference(const SceneFactorGraph& graph,
                             const PotentialModel& model,
                             double cap = kDefaultStateSpaceCap);

std::string oracle_to_json(const OracleResult& result, int indent = -1);

}  // namespace sgvi
