#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sgvi/emd.hpp"
#include "sgvi/graph.hpp"
#include "sgvi/potential_model.hpp"
#include "sgvi/sampler.hpp"

namespace sgvi {

// Per-category local log-score of one node: unary logits plus one message per
// neighbour, each produced by a feature map from the two nodes' features.
struct LocalScoreVector {
  NodeId node = 0;
  Vector logits;
};

LocalScoreVector local_score_vector(const SceneFactorGraph& graph,
                                    const PotentialModel& model, NodeId node);

struct NodeInference {
  NodeId node = 0;
  VariationalParams pi_star;
  double bound = 0.0;          // bound estimate at pi_star
  Vector surrogate_logits;     // phi = logits - bound
  Vector log_posterior;        // phi - logsumexp(phi)
  Label map_label = 0;
  int emd_updates = 0;
};

struct InferenceResult {
  std::vector<NodeInference> nodes;  // ascending node id

  const NodeInference& at(NodeId node) const;
};

// phi = logits - bound, log-posterior = phi - logsumexp(phi), MAP = argmax.
NodeInference make_node_inference(NodeId node, std::span<const double> logits,
                                  const EmdResult& emd);

// Seed of the EMD stream of `node`: derive_seed(seed, {stream::kEmd, node}).
std::uint64_t node_seed(std::uint64_t seed, NodeId node);

// Runs EMD on every object and predicate node against its local score vector
// and forms the normalized log-posterior. Nodes are independent; `threads`
// > 1 runs them in parallel without changing the result.
InferenceResult infer_graph(const SceneFactorGraph& graph,
                            const PotentialModel& model, const EmdConfig& cfg,
                            const Temperature& temp, std::uint64_t seed,
                            int threads = 1);

InferenceResult infer_from_logits(const std::vector<LocalScoreVector>& logits,
                                  const EmdConfig& cfg, double tau,
                                  std::uint64_t seed, int threads = 1);

// {"nodes": [{"node", "pi_star", "bound", "log_posterior", "map_label"}]}
std::string inference_to_json(const InferenceResult& result, int indent = -1);

}  // namespace sgvi
