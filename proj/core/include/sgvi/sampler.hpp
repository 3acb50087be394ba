#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "sgvi/numeric.hpp"
#include "sgvi/rng.hpp"

namespace sgvi {

// Standard Gumbel draws -log(-log u), u clamped to [1e-12, 1 - 1e-12].
struct GumbelNoise {
  Vector values;
};

// Softmax temperature with its annealing schedule
//
//   tau_t = max(tau0 * exp(-beta * t), tau_min).
struct Temperature {
  double tau0 = 1.0;
  double tau = 1.0;
  double tau_min = 0.2;
  double beta = 1e-4;
  std::int64_t t = 0;

  // Validates tau0 >= tau_min > 0 and beta >= 0.
  static Temperature make(double tau0, double tau_min, double beta);
  // Fixed temperature, no annealing.
  static Temperature fixed(double tau);
};

Temperature anneal(const Temperature& temp, std::int64_t t);

// Categorical probabilities of one node, on the simplex.
struct VariationalParams {
  Vector pi;

  std::size_t size() const { return pi.size(); }
  static VariationalParams uniform(std::size_t v);
  // Validates non-negativity and unit sum (1e-9).
  static VariationalParams from(Vector pi);
};

inline constexpr double kPiFloor = 1e-20;

// Floors every entry at `floor` and renormalizes. Use before log(pi) on
// user-supplied initializations that may contain zeros.
VariationalParams floor_pi(const VariationalParams& params,
                           double floor = kPiFloor);

// Log-space parameters lambda = log(pi) of the floored probabilities.
Vector q_logits(const VariationalParams& params);

GumbelNoise sample_gumbel(std::size_t v, std::uint64_t seed);
GumbelNoise sample_gumbel(std::size_t v, Rng& rng);

// Relaxed one-hot sample z = softmax((log pi + sigma) / tau).
// Throws ArgumentError if pi has a zero entry (floor it first).
Vector gumbel_softmax(const VariationalParams& params, const GumbelNoise& sigma,
                      double tau);
// Same with log(pi) precomputed by the caller (no positivity check).
Vector gumbel_softmax_from_log(std::span<const double> log_pi,
                               const GumbelNoise& sigma, double tau);

// Jacobian dz/dpi at a sample z = gumbel_softmax(pi, sigma, tau):
//   J[i][k] = z_i (delta_ik - z_k) / (tau * pi_k).
std::vector<Vector> gumbel_softmax_jacobian(const VariationalParams& params,
                                            std::span<const double> z,
                                            double tau);

// J^T c without forming J:
//   (J^T c)_k = z_k (c_k - z . c) / (tau * pi_k).
// The centred term is evaluated as (c_k - c_0) - z . (c - c_0) so that a
// constant cotangent maps to an exact zero.
Vector gumbel_softmax_vjp(const VariationalParams& params,
                          std::span<const double> z, double tau,
                          std::span<const double> cotangent);

// Log-density approximation of q at a relaxed sample:
//   log q(z) = lambda . z - max(lambda) - log sum exp(lambda - max(lambda))
// i.e. log-softmax(lambda) contracted with z, lambda = log pi.
double log_q(const VariationalParams& params, std::span<const double> z);
double log_q_from_logits(std::span<const double> lambda,
                         std::span<const double> z);

}  // namespace sgvi
