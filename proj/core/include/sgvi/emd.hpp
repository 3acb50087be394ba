#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "sgvi/graph.hpp"
#include "sgvi/potential_model.hpp"
#include "sgvi/sampler.hpp"

namespace sgvi {

struct EmdConfig {
  int max_iters = 50;        // M
  double gamma0 = 1.0;       // initial learning rate
  double epsilon = 1e-4;     // stop when successive bounds differ by less
  std::size_t samples = 20;  // s per step
  // Reuse the same noise draws at every iteration (common random numbers).
  bool fixed_noise = false;
  // Dirichlet(1) initialization instead of uniform.
  bool random_init = false;

  void validate() const;
};

// Step size at iteration i (1-based): gamma0 / sqrt(i).
double emd_learning_rate(double gamma0, int iteration);

// Exponentiated-gradient ascent step on the simplex:
//   r = gamma * grad;  r = pi * exp(r - max r);  pi' = r / |r|_1,
// then floor_pi when an entry fell below kPiFloor.
// Throws on a non-finite gradient or a zero entry in pi.
VariationalParams emd_step(const VariationalParams& pi,
                           std::span<const double> grad, double gamma);

struct ObjectiveValue {
  double value = 0.0;
  Vector gradient;  // empty when not requested
};

// Objective oracle: (pi, 1-based iteration, want_gradient) -> value/gradient.
using EmdObjective =
    std::function<ObjectiveValue(const VariationalParams&, int, bool)>;

struct EmdResult {
  VariationalParams pi;
  double bound = 0.0;            // objective at the returned pi
  int updates = 0;               // emd_step calls performed
  bool converged = false;        // stopped by the epsilon rule
  std::vector<double> history;   // objective value seen at each iteration
};

// Mirror-descent loop. For i = 1..M: evaluate the objective and gradient,
// stop if |L - L_prev| < epsilon (L_prev starts at -inf), otherwise take an
// emd_step with gamma0 / sqrt(i). If M iterations pass without stopping the
// objective is evaluated once more at the final pi.
EmdResult emd_maximize(VariationalParams init, const EmdConfig& cfg,
                       const EmdObjective& objective);

// Initial pi for a node with vocabulary v: uniform, or Dirichlet(1) when
// cfg.random_init is set.
VariationalParams initial_pi(std::size_t v, const EmdConfig& cfg,
                             std::uint64_t seed);

// Maximizes the Monte-Carlo bound of a node with local score vector `logits`
// using DReG gradients. Iteration i draws from
// derive_seed(seed, {stream::kEmd, i}) (i = 0 for every iteration when
// fixed_noise is set).
EmdResult optimize_local(std::span<const double> logits, const EmdConfig& cfg,
                         double tau, std::uint64_t seed,
                         const VariationalParams* init = nullptr);

EmdResult optimize_node(const SceneFactorGraph& graph, const PotentialModel& model,
                        NodeId node, const EmdConfig& cfg, const Temperature& temp,
                        std::uint64_t seed);

}  // namespace sgvi
