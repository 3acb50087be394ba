#pragma once

#include <cstdint>

#include "sgvi/graph.hpp"
#include "sgvi/potential_model.hpp"
#include "sgvi/rng.hpp"

namespace sgvi {

// Small random graphs for oracle checks and benchmarks.
struct RandomGraphSpec {
  std::size_t num_nodes = 4;  // total, global node included
  bool with_global = true;
  VocabSizes vocab{4, 3, 2};
  std::size_t feature_dim = 16;
  double extra_object_edge = 0.5;  // chance of an object-object edge per unrelated pair
};

// Objects and predicates are split at random (each predicate gets a distinct
// ordered object pair); features are standard normal; the global node, when
// present, is connected to every other node.
SceneFactorGraph random_graph(const RandomGraphSpec& spec, Rng& rng);

// Vocabulary sizes drawn uniformly from [lo, hi] per kind.
VocabSizes random_vocab(Rng& rng, std::size_t lo, std::size_t hi);

// Glorot model with the output layer of every map multiplied by
// `output_scale`, which sets the spread of the local logits.
PotentialModel random_model(const ModelShape& shape, double output_scale,
                            std::uint64_t seed);

// Independent N(0, scale^2) entries.
Vector random_logits(std::size_t v, double scale, Rng& rng);

}  // namespace sgvi
