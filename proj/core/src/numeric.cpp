#include "sgvi/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sgvi/error.hpp"

namespace sgvi {

double logsumexp(std::span<const double> x) {
  if (x.empty()) return -std::numeric_limits<double>::infinity();
  const double m = max_value(x);
  if (!std::isfinite(m)) return m;
  double acc = 0.0;
  for (double v : x) acc += std::exp(v - m);
  return m + std::log(acc);
}

Vector softmax(std::span<const double> x) {
  Vector out(x.size());
  if (x.empty()) return out;
  const double m = max_value(x);
  double acc = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    out[k] = std::exp(x[k] - m);
    acc += out[k];
  }
  for (double& v : out) v /= acc;
  return out;
}

Vector log_softmax(std::span<const double> x) {
  const double lse = logsumexp(x);
  Vector out(x.begin(), x.end());
  for (double& v : out) v -= lse;
  return out;
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw ShapeError("dot: length " + std::to_string(a.size()) + " vs " +
                     std::to_string(b.size()));
  }
  double acc = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) acc += a[k] * b[k];
  return acc;
}

double sum(std::span<const double> x) {
  double acc = 0.0;
  for (double v : x) acc += v;
  return acc;
}

std::size_t argmax(std::span<const double> x) {
  return static_cast<std::size_t>(
      std::distance(x.begin(), std::max_element(x.begin(), x.end())));
}

double max_value(std::span<const double> x) {
  return *std::max_element(x.begin(), x.end());
}

bool all_finite(std::span<const double> x) {
  return std::all_of(x.begin(), x.end(),
                     [](double v) { return std::isfinite(v); });
}

double pairwise_sum(std::span<const double> x) {
  if (x.size() <= 8) return sum(x);
  const std::size_t half = x.size() / 2;
  return pairwise_sum(x.first(half)) + pairwise_sum(x.subspan(half));
}

double total_variation(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw ShapeError("total_variation: length mismatch");
  double acc = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) acc += std::abs(p[k] - q[k]);
  return 0.5 * acc;
}

double kl_divergence(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw ShapeError("kl_divergence: length mismatch");
  double acc = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    if (p[k] > 0.0) acc += p[k] * (std::log(p[k]) - std::log(q[k]));
  }
  return acc;
}

}  // namespace sgvi
