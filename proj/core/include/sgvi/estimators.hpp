#pragma once

#include <span>
#include <vector>

#include "sgvi/graph.hpp"
#include "sgvi/sampler.hpp"
#include "sgvi/scoring.hpp"

namespace sgvi {

// s reparameterized samples of one node's q and their log importance weights
//   log w_j = score_logits . z_j - log q(z_j).
struct SampleBatch {
  VariationalParams pi;
  double tau = 1.0;
  std::vector<GumbelNoise> noises;
  std::vector<Vector> samples;
  Vector log_weights;

  std::size_t size() const { return samples.size(); }
};

SampleBatch make_batch(const VariationalParams& pi,
                       std::span<const double> score_logits, double tau,
                       std::vector<GumbelNoise> noises);
SampleBatch draw_batch(const VariationalParams& pi,
                       std::span<const double> score_logits, double tau,
                       std::size_t s, Rng& rng);

// Monte-Carlo estimate of the s-sample bound: logsumexp(log w) - log s.
double iw_bound(const SampleBatch& batch);
double iw_bound(std::span<const double> log_weights);

// w_j / sum_l w_l, computed as exp(log w_j - logsumexp(log w)).
Vector self_normalized_weights(std::span<const double> log_weights);

// Doubly reparameterized gradient with respect to pi:
//   sum_j wn_j^2 (dlog w_j / dz_j) (dz_j / dpi),
// dlog w / dz = score_logits - q_logits. Zero whenever the two logit vectors
// differ by a constant.
Vector dreg_gradient(const SampleBatch& batch,
                     std::span<const double> score_logits,
                     std::span<const double> q_logits);

// Ordinary reparameterized gradient of the bound: self-normalized weights to
// the first power and the total derivative of log w_j, including the direct
// dependence of log q on pi (z_j / pi - 1).
Vector naive_iwae_gradient(const SampleBatch& batch,
                           std::span<const double> score_logits,
                           std::span<const double> q_logits);

// d iw_bound / d score_logits with the samples held fixed: sum_j wn_j z_j.
Vector bound_logit_gradient(const SampleBatch& batch);

// Mean-field proposal over every node of a graph (global node included).
// Log weights of s joint samples:
//   log w = joint_log_score(z) - sum_i log q_i(z_i).
Vector graph_log_weights(const SceneFactorGraph& graph,
                         const PotentialTables& tables,
                         const std::vector<VariationalParams>& proposal,
                         double tau, std::size_t s, Rng& rng);

}  // namespace sgvi
