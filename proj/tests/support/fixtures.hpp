#pragma once

#include <span>
#include <vector>

#include "sgvi/graph.hpp"
#include "sgvi/potential_model.hpp"
#include "sgvi/random_instance.hpp"

namespace sgvi::testing {

// Sets the output bias of one map. With zero weights the map then returns
// exactly these values for every input.
inline void set_output_bias(PotentialModel& model, MapKind kind, std::span<const double> b) {
  const MlpLayout& l = model.layout(kind);
  auto p = model.mutable_parameters();
  for (std::size_t k = 0; k < b.size(); ++k) p[l.b2() + k] = b[k];
}

inline Vector constant_features(std::size_t d, double x) { return Vector(d, x); }

// Two objects joined by one predicate, plus a global node linked to all.
inline SceneFactorGraph triplet_graph(VocabSizes vocab = {4, 3, 2}, std::size_t d = 4,
                                      std::uint64_t seed = 1) {
  Rng rng(seed);
  auto feat = [&] {
    Vector x(d);
    for (double& v : x) v = standard_normal(rng);
    return x;
  };
  GraphBuilder b(vocab, d);
  const NodeId s = b.add_object(feat());
  const NodeId o = b.add_object(feat());
  b.add_predicate(feat(), Relation{s, o});
  b.connect(s, o);
  b.set_global(feat());
  b.connect_global_to_all();
  return b.build();
}

inline ModelShape shape_for(const SceneFactorGraph& g, std::size_t hidden = 8) {
  return ModelShape{g.feature_dim(), hidden, g.vocab()};
}

}  // namespace sgvi::testing
