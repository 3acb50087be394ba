#include "sgvi/emd.hpp"

#include <cmath>
#include <limits>

#include "sgvi/error.hpp"
#include "sgvi/estimators.hpp"
#include "sgvi/inference.hpp"

namespace sgvi {

void EmdConfig::validate() const {
  if (max_iters <= 0) throw ArgumentError("emd.max_iters must be positive");
  if (!(gamma0 > 0.0)) throw ArgumentError("emd.gamma0 must be positive");
  if (!(epsilon > 0.0)) throw ArgumentError("emd.epsilon must be positive");
  if (samples == 0) throw ArgumentError("emd.samples must be positive");
}

double emd_learning_rate(double gamma0, int iteration) {
  return gamma0 / std::sqrt(static_cast<double>(iteration));
}

VariationalParams emd_step(const VariationalParams& pi,
                           std::span<const double> grad, double gamma) {
  if (grad.size() != pi.size()) {
    throw ShapeError("emd_step: gradient has " + std::to_string(grad.size()) +
                     " entries, pi has " + std::to_string(pi.size()));
  }
  if (!all_finite(grad)) throw ArgumentError("emd_step: non-finite gradient");
  for (double p : pi.pi) {
    if (!(p > 0.0)) throw ArgumentError("emd_step: pi has a zero entry");
  }
  Vector r(grad.size());
  for (std::size_t k = 0; k < r.size(); ++k) r[k] = gamma * grad[k];
  const double m = max_value(r);
  double total = 0.0;
  for (std::size_t k = 0; k < r.size(); ++k) {
    r[k] = pi.pi[k] * std::exp(r[k] - m);
    total += r[k];
  }
  bool underflow = false;
  for (double& x : r) {
    x /= total;
    underflow = underflow || x < kPiFloor;
  }
  // Entries that underflowed are lifted back to the floor so that log(pi)
  // stays finite on the next step.
  if (underflow) return floor_pi(VariationalParams{std::move(r)});
  return VariationalParams{std::move(r)};
}

EmdResult emd_maximize(VariationalParams init, const EmdConfig& cfg,
                       const EmdObjective& objective) {
  cfg.validate();
  EmdResult result;
  result.pi = std::move(init);
  double previous = -std::numeric_limits<double>::infinity();
  for (int i = 1; i <= cfg.max_iters; ++i) {
    ObjectiveValue current = objective(result.pi, i, true);
    result.history.push_back(current.value);
    const double gamma = emd_learning_rate(cfg.gamma0, i);
    if (std::abs(current.value - previous) < cfg.epsilon) {
      result.bound = current.value;
      result.converged = true;
      return result;
    }
    previous = current.value;
    result.pi = emd_step(result.pi, current.gradient, gamma);
    ++result.updates;
  }
  result.bound = objective(result.pi, cfg.max_iters + 1, false).value;
  return result;
}

VariationalParams initial_pi(std::size_t v, const EmdConfig& cfg,
                             std::uint64_t seed) {
  if (!cfg.random_init) return VariationalParams::uniform(v);
  Rng rng(derive_seed(seed, {stream::kInit}));
  Vector pi(v);
  double total = 0.0;
  for (double& p : pi) {
    p = -std::log(uniform_open(rng));
    total += p;
  }
  for (double& p : pi) p /= total;
  return floor_pi(VariationalParams{std::move(pi)});
}

EmdResult optimize_local(std::span<const double> logits, const EmdConfig& cfg,
                         double tau, std::uint64_t seed,
                         const VariationalParams* init) {
  if (!(tau > 0.0)) throw ArgumentError("temperature must be positive");
  const Vector score(logits.begin(), logits.end());
  auto objective = [&](const VariationalParams& pi, int iteration,
                       bool want_gradient) {
    const std::uint64_t tag = cfg.fixed_noise ? 0 : static_cast<std::uint64_t>(iteration);
    Rng rng(derive_seed(seed, {stream::kEmd, tag}));
    const SampleBatch batch = draw_batch(pi, score, tau, cfg.samples, rng);
    ObjectiveValue out;
    out.value = iw_bound(batch);
    if (want_gradient) out.gradient = dreg_gradient(batch, score, q_logits(pi));
    return out;
  };
  VariationalParams start =
      init ? floor_pi(*init) : initial_pi(score.size(), cfg, seed);
  return emd_maximize(std::move(start), cfg, objective);
}

EmdResult optimize_node(const SceneFactorGraph& graph, const PotentialModel& model,
                        NodeId node, const EmdConfig& cfg, const Temperature& temp,
                        std::uint64_t seed) {
  const LocalScoreVector local = local_score_vector(graph, model, node);
  return optimize_local(local.logits, cfg, temp.tau, seed);
}

}  // namespace sgvi
