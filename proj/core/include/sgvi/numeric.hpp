#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace sgvi {

using Vector = std::vector<double>;

// Max-shifted log(sum(exp(x))). Returns -inf for an empty span or when every
// entry is -inf.
double logsumexp(std::span<const double> x);

Vector softmax(std::span<const double> x);
Vector log_softmax(std::span<const double> x);

double dot(std::span<const double> a, std::span<const double> b);
double sum(std::span<const double> x);
std::size_t argmax(std::span<const double> x);
double max_value(std::span<const double> x);

bool all_finite(std::span<const double> x);

// Pairwise (tree) summation: fixed reduction order independent of thread
// count, so results are bit-reproducible.
double pairwise_sum(std::span<const double> x);

double total_variation(std::span<const double> p, std::span<const double> q);
// KL(p || q) for strictly positive q; terms with p_k == 0 contribute 0.
double kl_divergence(std::span<const double> p, std::span<const double> q);

}  // namespace sgvi
