#include "sgvi/estimators.hpp"

#include <cmath>

#include "sgvi/error.hpp"

namespace sgvi {

namespace {

void check_logits(const SampleBatch& batch, std::span<const double> logits,
                  const char* what) {
  if (logits.size() != batch.pi.size()) {
    throw ShapeError(std::string(what) + ": " + std::to_string(logits.size()) +
                     " logits for a vocabulary of " +
                     std::to_string(batch.pi.size()));
  }
}

void check_batch(const SampleBatch& batch) {
  if (batch.size() == 0) throw ArgumentError("empty sample batch");
  if (!(batch.tau > 0.0)) throw ArgumentError("temperature must be positive");
}

}  // namespace

SampleBatch make_batch(const VariationalParams& pi,
                       std::span<const double> score_logits, double tau,
                       std::vector<GumbelNoise> noises) {
  if (score_logits.size() != pi.size()) {
    throw ShapeError("make_batch: score logits have " +
                     std::to_string(score_logits.size()) +
                     " entries, pi has " + std::to_string(pi.size()));
  }
  SampleBatch batch;
  batch.pi = pi;
  batch.tau = tau;
  batch.noises = std::move(noises);
  // log_q_from_logits with the normalizer hoisted out of the loop.
  const Vector lambda = q_logits(pi);
  const double lambda_max = max_value(lambda);
  double lambda_acc = 0.0;
  for (double l : lambda) lambda_acc += std::exp(l - lambda_max);
  const double lambda_log_norm = std::log(lambda_acc);
  if (!(batch.tau > 0.0)) throw ArgumentError("temperature must be positive");
  Vector log_pi(pi.size());
  for (std::size_t k = 0; k < log_pi.size(); ++k) {
    if (!(pi.pi[k] > 0.0)) {
      throw ArgumentError("pi has a zero entry; floor it (floor_pi) before sampling");
    }
    log_pi[k] = std::log(pi.pi[k]);
  }
  batch.samples.reserve(batch.noises.size());
  batch.log_weights.reserve(batch.noises.size());
  for (const GumbelNoise& noise : batch.noises) {
    Vector z = gumbel_softmax_from_log(log_pi, noise, tau);
    batch.log_weights.push_back(dot(score_logits, z) -
                                (dot(lambda, z) - lambda_max - lambda_log_norm));
    batch.samples.push_back(std::move(z));
  }
  return batch;
}

SampleBatch draw_batch(const VariationalParams& pi,
                       std::span<const double> score_logits, double tau,
                       std::size_t s, Rng& rng) {
  if (s == 0) throw ArgumentError("sample count must be positive");
  std::vector<GumbelNoise> noises;
  noises.reserve(s);
  for (std::size_t j = 0; j < s; ++j) noises.push_back(sample_gumbel(pi.size(), rng));
  return make_batch(pi, score_logits, tau, std::move(noises));
}

double iw_bound(std::span<const double> log_weights) {
  if (log_weights.empty()) throw ArgumentError("empty sample batch");
  return logsumexp(log_weights) -
         std::log(static_cast<double>(log_weights.size()));
}

double iw_bound(const SampleBatch& batch) { return iw_bound(batch.log_weights); }

Vector self_normalized_weights(std::span<const double> log_weights) {
  if (log_weights.empty()) throw ArgumentError("empty sample batch");
  const double lse = logsumexp(log_weights);
  Vector w(log_weights.size());
  for (std::size_t j = 0; j < w.size(); ++j) w[j] = std::exp(log_weights[j] - lse);
  return w;
}

Vector dreg_gradient(const SampleBatch& batch,
                     std::span<const double> score_logits,
                     std::span<const double> q_logits) {
  check_batch(batch);
  check_logits(batch, score_logits, "dreg_gradient");
  check_logits(batch, q_logits, "dreg_gradient");
  Vector diff(score_logits.size());
  for (std::size_t k = 0; k < diff.size(); ++k) diff[k] = score_logits[k] - q_logits[k];

  const Vector w = self_normalized_weights(batch.log_weights);
  Vector grad(batch.pi.size(), 0.0);
  for (std::size_t j = 0; j < batch.size(); ++j) {
    const Vector vjp = gumbel_softmax_vjp(batch.pi, batch.samples[j], batch.tau, diff);
    const double w2 = w[j] * w[j];
    for (std::size_t k = 0; k < grad.size(); ++k) grad[k] += w2 * vjp[k];
  }
  return grad;
}

Vector naive_iwae_gradient(const SampleBatch& batch,
                           std::span<const double> score_logits,
                           std::span<const double> q_logits) {
  check_batch(batch);
  check_logits(batch, score_logits, "naive_iwae_gradient");
  check_logits(batch, q_logits, "naive_iwae_gradient");
  Vector diff(score_logits.size());
  for (std::size_t k = 0; k < diff.size(); ++k) diff[k] = score_logits[k] - q_logits[k];

  const Vector w = self_normalized_weights(batch.log_weights);
  Vector grad(batch.pi.size(), 0.0);
  for (std::size_t j = 0; j < batch.size(); ++j) {
    const Vector& z = batch.samples[j];
    const Vector vjp = gumbel_softmax_vjp(batch.pi, z, batch.tau, diff);
    for (std::size_t k = 0; k < grad.size(); ++k) {
      const double score = z[k] / batch.pi.pi[k] - 1.0;
      grad[k] += w[j] * (vjp[k] - score);
    }
  }
  return grad;
}

Vector bound_logit_gradient(const SampleBatch& batch) {
  check_batch(batch);
  const Vector w = self_normalized_weights(batch.log_weights);
  Vector grad(batch.pi.size(), 0.0);
  for (std::size_t j = 0; j < batch.size(); ++j) {
    for (std::size_t k = 0; k < grad.size(); ++k) grad[k] += w[j] * batch.samples[j][k];
  }
  return grad;
}

Vector graph_log_weights(const SceneFactorGraph& graph,
                         const PotentialTables& tables,
                         const std::vector<VariationalParams>& proposal,
                         double tau, std::size_t s, Rng& rng) {
  if (proposal.size() != graph.num_nodes()) {
    throw ShapeError("graph_log_weights: proposal covers " +
                     std::to_string(proposal.size()) + " nodes, graph has " +
                     std::to_string(graph.num_nodes()));
  }
  if (s == 0) throw ArgumentError("sample count must be positive");
  std::vector<Vector> lambdas;
  lambdas.reserve(proposal.size());
  for (NodeId id = 0; id < graph.num_nodes(); ++id) {
    if (proposal[id].size() != graph.vocab_size(id)) {
      throw ShapeError("graph_log_weights: proposal for node " +
                       std::to_string(id) + " has the wrong size");
    }
    lambdas.push_back(q_logits(proposal[id]));
  }
  Vector log_w(s);
  RelaxedAssignment z;
  z.labels.resize(graph.num_nodes());
  for (std::size_t j = 0; j < s; ++j) {
    double log_q_total = 0.0;
    for (NodeId id = 0; id < graph.num_nodes(); ++id) {
      z.labels[id] = gumbel_softmax(proposal[id],
                                    sample_gumbel(graph.vocab_size(id), rng), tau);
      log_q_total += log_q_from_logits(lambdas[id], z.labels[id]);
    }
    log_w[j] = tables.score(z) - log_q_total;
  }
  return log_w;
}

}  // namespace sgvi
