#include "concrete.hpp"

#include <cmath>

#include "sgvi/numeric.hpp"

namespace sgvi::testing {

double concrete_log_density(const VariationalParams& pi, std::span<const double> z, double tau) {
  const std::size_t v = pi.size();
  const double dv = static_cast<double>(v);
  double out = std::lgamma(dv) + (dv - 1.0) * std::log(tau);
  double mix = 0.0;
  for (std::size_t k = 0; k < v; ++k) {
    out += std::log(pi.pi[k]) - (tau + 1.0) * std::log(z[k]);
    mix += pi.pi[k] * std::pow(z[k], -tau);
  }
  return out - dv * std::log(mix);
}

Vector concrete_log_density_dz(const VariationalParams& pi, std::span<const double> z, double tau) {
  const std::size_t v = pi.size();
  double mix = 0.0;
  for (std::size_t k = 0; k < v; ++k) mix += pi.pi[k] * std::pow(z[k], -tau);
  Vector g(v);
  for (std::size_t k = 0; k < v; ++k) {
    g[k] = -(tau + 1.0) / z[k] +
           static_cast<double>(v) * tau * pi.pi[k] * std::pow(z[k], -tau - 1.0) / mix;
  }
  return g;
}

Vector concrete_log_density_dpi(const VariationalParams& pi, std::span<const double> z, double tau) {
  const std::size_t v = pi.size();
  double mix = 0.0;
  for (std::size_t k = 0; k < v; ++k) mix += pi.pi[k] * std::pow(z[k], -tau);
  Vector g(v);
  for (std::size_t k = 0; k < v; ++k) {
    g[k] = 1.0 / pi.pi[k] - static_cast<double>(v) * std::pow(z[k], -tau) / mix;
  }
  return g;
}

namespace {

Vector exact_log_weights(const VariationalParams& pi, std::span<const double> logits, double tau,
                         const std::vector<GumbelNoise>& noises, std::vector<Vector>* samples) {
  Vector lw;
  for (const GumbelNoise& n : noises) {
    Vector z = gumbel_softmax(pi, n, tau);
    lw.push_back(dot(logits, z) - concrete_log_density(pi, z, tau));
    if (samples) samples->push_back(std::move(z));
  }
  return lw;
}

}  // namespace

double exact_iw_bound(const VariationalParams& pi, std::span<const double> logits, double tau,
                      const std::vector<GumbelNoise>& noises) {
  return iw_bound(exact_log_weights(pi, logits, tau, noises, nullptr));
}

Vector exact_dreg_gradient(const VariationalParams& pi, std::span<const double> logits,
                           double tau, const std::vector<GumbelNoise>& noises) {
  std::vector<Vector> samples;
  const Vector lw = exact_log_weights(pi, logits, tau, noises, &samples);
  const Vector w = self_normalized_weights(lw);
  Vector grad(pi.size(), 0.0);
  for (std::size_t j = 0; j < samples.size(); ++j) {
    const Vector dq = concrete_log_density_dz(pi, samples[j], tau);
    Vector c(pi.size());
    for (std::size_t k = 0; k < c.size(); ++k) c[k] = logits[k] - dq[k];
    const Vector vjp = gumbel_softmax_vjp(pi, samples[j], tau, c);
    for (std::size_t k = 0; k < grad.size(); ++k) grad[k] += w[j] * w[j] * vjp[k];
  }
  return grad;
}

}  // namespace sgvi::testing
