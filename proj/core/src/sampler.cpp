#include "sgvi/sampler.hpp"

#include <algorithm>
#include <cmath>

#include "sgvi/error.hpp"

namespace sgvi {

Temperature Temperature::make(double tau0, double tau_min, double beta) {
  if (!(tau_min > 0.0)) throw ArgumentError("tau_min must be positive");
  if (!(tau0 >= tau_min)) throw ArgumentError("tau0 must be >= tau_min");
  if (!(beta >= 0.0)) throw ArgumentError("beta must be non-negative");
  return Temperature{tau0, tau0, tau_min, beta, 0};
}

Temperature Temperature::fixed(double tau) { return make(tau, tau, 0.0); }

Temperature anneal(const Temperature& temp, std::int64_t t) {
  Temperature next = temp;
  next.t = t;
  next.tau = std::max(temp.tau0 * std::exp(-temp.beta * static_cast<double>(t)),
                      temp.tau_min);
  return next;
}

VariationalParams VariationalParams::uniform(std::size_t v) {
  if (v < 2) throw ArgumentError("vocabulary size must be >= 2");
  return VariationalParams{Vector(v, 1.0 / static_cast<double>(v))};
}

VariationalParams VariationalParams::from(Vector pi) {
  if (pi.size() < 2) throw ArgumentError("vocabulary size must be >= 2");
  double total = 0.0;
  for (double p : pi) {
    if (!(p >= 0.0) || !std::isfinite(p)) {
      throw ArgumentError("probabilities must be finite and non-negative");
    }
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw ArgumentError("probabilities must sum to 1");
  }
  return VariationalParams{std::move(pi)};
}

VariationalParams floor_pi(const VariationalParams& params, double floor) {
  VariationalParams out = params;
  double total = 0.0;
  for (double& p : out.pi) {
    p = std::max(p, floor);
    total += p;
  }
  for (double& p : out.pi) p /= total;
  return out;
}

Vector q_logits(const VariationalParams& params) {
  Vector lambda(params.size());
  for (std::size_t k = 0; k < lambda.size(); ++k) {
    lambda[k] = std::log(std::max(params.pi[k], kPiFloor));
  }
  return lambda;
}

GumbelNoise sample_gumbel(std::size_t v, std::uint64_t seed) {
  Rng rng(seed);
  return sample_gumbel(v, rng);
}

GumbelNoise sample_gumbel(std::size_t v, Rng& rng) {
  if (v < 2) throw ArgumentError("Gumbel noise dimension must be >= 2");
  GumbelNoise noise{Vector(v)};
  for (double& g : noise.values) {
    const double u = std::clamp(uniform_open(rng), 1e-12, 1.0 - 1e-12);
    g = -std::log(-std::log(u));
  }
  return noise;
}

namespace {

void check_tau(double tau) {
  if (!(tau > 0.0)) throw ArgumentError("temperature must be positive");
}

void check_positive(const VariationalParams& params) {
  for (double p : params.pi) {
    if (!(p > 0.0)) {
      throw ArgumentError(
          "pi has a zero entry; floor it (floor_pi) before sampling");
    }
  }
}

}  // namespace

Vector gumbel_softmax(const VariationalParams& params, const GumbelNoise& sigma,
                      double tau) {
  check_tau(tau);
  if (sigma.values.size() != params.size()) {
    throw ShapeError("gumbel_softmax: noise has " +
                     std::to_string(sigma.values.size()) +
                     " entries, pi has " + std::to_string(params.size()));
  }
  check_positive(params);
  Vector a(params.size());
  for (std::size_t k = 0; k < a.size(); ++k) {
    a[k] = (std::log(params.pi[k]) + sigma.values[k]) / tau;
  }
  return softmax(a);
}

Vector gumbel_softmax_from_log(std::span<const double> log_pi,
                               const GumbelNoise& sigma, double tau) {
  check_tau(tau);
  if (sigma.values.size() != log_pi.size()) {
    throw ShapeError("gumbel_softmax: noise/pi length mismatch");
  }
  // softmax() inlined on the same buffer; identical arithmetic.
  Vector a(log_pi.size());
  for (std::size_t k = 0; k < a.size(); ++k) a[k] = (log_pi[k] + sigma.values[k]) / tau;
  const double m = max_value(a);
  double acc = 0.0;
  for (double& v : a) {
    v = std::exp(v - m);
    acc += v;
  }
  for (double& v : a) v /= acc;
  return a;
}

std::vector<Vector> gumbel_softmax_jacobian(const VariationalParams& params,
                                            std::span<const double> z,
                                            double tau) {
  check_tau(tau);
  check_positive(params);
  const std::size_t v = params.size();
  if (z.size() != v) throw ShapeError("gumbel_softmax_jacobian: length mismatch");
  std::vector<Vector> jac(v, Vector(v));
  for (std::size_t i = 0; i < v; ++i) {
    for (std::size_t k = 0; k < v; ++k) {
      const double delta = i == k ? 1.0 : 0.0;
      jac[i][k] = z[i] * (delta - z[k]) / (tau * params.pi[k]);
    }
  }
  return jac;
}

Vector gumbel_softmax_vjp(const VariationalParams& params,
                          std::span<const double> z, double tau,
                          std::span<const double> cotangent) {
  check_tau(tau);
  const std::size_t v = params.size();
  if (z.size() != v || cotangent.size() != v) {
    throw ShapeError("gumbel_softmax_vjp: length mismatch");
  }
  const double ref = cotangent[0];
  double mean = 0.0;
  for (std::size_t i = 0; i < v; ++i) mean += z[i] * (cotangent[i] - ref);
  Vector out(v);
  for (std::size_t k = 0; k < v; ++k) {
    out[k] = z[k] * ((cotangent[k] - ref) - mean) / (tau * params.pi[k]);
  }
  return out;
}

double log_q_from_logits(std::span<const double> lambda,
                         std::span<const double> z) {
  if (lambda.size() != z.size()) {
    throw ShapeError("log_q: logits have " + std::to_string(lambda.size()) +
                     " entries, sample has " + std::to_string(z.size()));
  }
  const double m = max_value(lambda);
  double acc = 0.0;
  for (double l : lambda) acc += std::exp(l - m);
  return dot(lambda, z) - m - std::log(acc);
}

double log_q(const VariationalParams& params, std::span<const double> z) {
  return log_q_from_logits(q_logits(params), z);
}

}  // namespace sgvi
