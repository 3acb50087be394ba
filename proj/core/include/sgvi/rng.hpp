#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace sgvi {

using Rng = std::mt19937_64;

// Seed derivation: every stochastic call site takes a 64-bit seed obtained by
// folding a list of integer tags (graph index, node id, iteration, purpose)
// into a base seed with the SplitMix64 finalizer:
//
//   h = splitmix(base); for tag in tags: h = splitmix(h ^ splitmix(tag + k))
//
// where k is the tag position. Streams built from distinct tag lists are
// independent for practical purposes and never depend on thread scheduling.
std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t derive_seed(std::uint64_t base,
                          std::initializer_list<std::uint64_t> tags);

// Uniform draw on the open interval (0, 1) built from the top 53 bits, so the
// sequence is identical across standard-library implementations.
double uniform_open(Rng& rng);

// Standard normal via Box-Muller on uniform_open draws (portable, unlike
// std::normal_distribution).
double standard_normal(Rng& rng);

// Integer uniform on [lo, hi] by rejection, portable.
std::int64_t uniform_int(Rng& rng, std::int64_t lo, std::int64_t hi);

// Well-known purposes used as the first tag of derive_seed.
namespace stream {
inline constexpr std::uint64_t kEmd = 1;
inline constexpr std::uint64_t kBound = 2;
inline constexpr std::uint64_t kInit = 3;
inline constexpr std::uint64_t kData = 4;
inline constexpr std::uint64_t kShuffle = 5;
inline constexpr std::uint64_t kModel = 6;
}  // namespace stream

}  // namespace sgvi
