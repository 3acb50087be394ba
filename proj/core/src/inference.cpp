#include "sgvi/inference.hpp"

#include <algorithm>

#include "json_convert.hpp"
#include "sgvi/error.hpp"
#include "sgvi/parallel.hpp"
#include "sgvi/rng.hpp"
#include "sgvi/scoring.hpp"

namespace sgvi {

LocalScoreVector local_score_vector(const SceneFactorGraph& graph,
                                    const PotentialModel& model, NodeId node) {
  model.check_compatible(graph);
  if (node >= graph.num_nodes()) {
    throw ArgumentError("node " + std::to_string(node) + " is not in the graph");
  }
  LocalScoreVector out{node, Vector(graph.vocab_size(node), 0.0)};
  for (const ScoreTerm& term : score_terms(graph, node)) {
    const Vector g = model.evaluate(term.kind, term_input(graph, term));
    for (std::size_t k = 0; k < g.size(); ++k) out.logits[k] += g[k];
  }
  return out;
}

const NodeInference& InferenceResult::at(NodeId node) const {
  auto it = std::lower_bound(
      nodes.begin(), nodes.end(), node,
      [](const NodeInference& n, NodeId id) { return n.node < id; });
  if (it == nodes.end() || it->node != node) {
    throw ArgumentError("no inference result for node " + std::to_string(node));
  }
  return *it;
}

NodeInference make_node_inference(NodeId node, std::span<const double> logits,
                                  const EmdResult& emd) {
  NodeInference out;
  out.node = node;
  out.pi_star = emd.pi;
  out.bound = emd.bound;
  out.emd_updates = emd.updates;
  out.surrogate_logits.assign(logits.begin(), logits.end());
  for (double& phi : out.surrogate_logits) phi -= emd.bound;
  out.log_posterior = log_softmax(out.surrogate_logits);
  out.map_label = argmax(out.log_posterior);
  return out;
}

std::uint64_t node_seed(std::uint64_t seed, NodeId node) {
  return derive_seed(seed, {stream::kEmd, node});
}

InferenceResult infer_from_logits(const std::vector<LocalScoreVector>& logits,
                                  const EmdConfig& cfg, double tau,
                                  std::uint64_t seed, int threads) {
  cfg.validate();
  InferenceResult result;
  result.nodes.resize(logits.size());
  parallel_for(logits.size(), threads, [&](std::size_t i) {
    const LocalScoreVector& local = logits[i];
    const EmdResult emd =
        optimize_local(local.logits, cfg, tau, node_seed(seed, local.node));
    result.nodes[i] = make_node_inference(local.node, local.logits, emd);
  });
  std::sort(result.nodes.begin(), result.nodes.end(),
            [](const auto& a, const auto& b) { return a.node < b.node; });
  return result;
}

InferenceResult infer_graph(const SceneFactorGraph& graph,
                            const PotentialModel& model, const EmdConfig& cfg,
                            const Temperature& temp, std::uint64_t seed,
                            int threads) {
  model.check_compatible(graph);
  std::vector<LocalScoreVector> logits;
  logits.reserve(graph.inferred_nodes().size());
  for (NodeId node : graph.inferred_nodes()) {
    logits.push_back(local_score_vector(graph, model, node));
  }
  return infer_from_logits(logits, cfg, temp.tau, seed, threads);
}

std::string inference_to_json(const InferenceResult& result, int indent) {
  detail::Json nodes = detail::Json::array();
  for (const NodeInference& n : result.nodes) {
    nodes.push_back({{"node", n.node},
                     {"pi_star", n.pi_star.pi},
                     {"bound", n.bound},
                     {"log_posterior", n.log_posterior},
                     {"map_label", n.map_label}});
  }
  return detail::Json{{"nodes", std::move(nodes)}}.dump(indent);
}

}  // namespace sgvi
