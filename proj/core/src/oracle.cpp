#include "sgvi/oracle.hpp"

#include <cmath>
#include <limits>

#include "json_convert.hpp"
#include "sgvi/scoring.hpp"

namespace sgvi {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Streaming log(exp(acc) + exp(x)).
void log_add(double& acc, double x) {
  if (x == kNegInf) return;
  if (acc == kNegInf) {
    acc = x;
    return;
  }
  if (acc < x) std::swap(acc, x);
  acc += std::log1p(std::exp(x - acc));
}

}  // namespace

OracleResult exact_inference(const SceneFactorGraph& graph,
                             const AssignmentScore& score, double cap) {
  AssignmentEnumerator states(graph, cap);
  const std::size_t n = graph.num_nodes();

  OracleResult out;
  out.state_space = states.size();
  out.log_partition = kNegInf;
  out.joint_map_score = kNegInf;
  std::vector<Vector> log_marg(n), max_marg(n);
  for (NodeId id = 0; id < n; ++id) {
    log_marg[id].assign(graph.vocab_size(id), kNegInf);
    max_marg[id].assign(graph.vocab_size(id), kNegInf);
  }

  Assignment a;
  while (states.next(a)) {
    const double s = score(a);
    log_add(out.log_partition, s);
    if (s > out.joint_map_score) {
      out.joint_map_score = s;
      out.joint_map = a;
    }
    for (NodeId id = 0; id < n; ++id) {
      const Label k = a.labels[id];
      log_add(log_marg[id][k], s);
      if (s > max_marg[id][k]) max_marg[id][k] = s;
    }
  }

  out.marginals.resize(n);
  out.max_marginal_labels.resize(n);
  for (NodeId id = 0; id < n; ++id) {
    out.marginals[id].resize(log_marg[id].size());
    for (std::size_t k = 0; k < log_marg[id].size(); ++k) {
      out.marginals[id][k] = std::exp(log_marg[id][k] - out.log_partition);
    }
    out.max_marginal_labels[id] = argmax(max_marg[id]);
  }
  return out;
}

OracleResult exact_inference(const SceneFactorGraph& graph,
                             const PotentialModel& model, double cap) {
  // Check the size before evaluating any feature map.
  AssignmentEnumerator probe(graph, cap);
  const PotentialTables tables = materialize_potentials(graph, model);
  return exact_inference(
      graph, [&](const Assignment& a) { return tables.score(a); }, cap);
}

std::string oracle_to_json(const OracleResult& result, int indent) {
  detail::Json j;
  j["log_partition"] = result.log_partition;
  j["marginals"] = result.marginals;
  j["max_marginal_labels"] = result.max_marginal_labels;
  j["joint_map"] = result.joint_map.labels;
  j["joint_map_score"] = result.joint_map_score;
  j["state_space"] = result.state_space;
  return j.dump(indent);
}

}  // namespace sgvi
