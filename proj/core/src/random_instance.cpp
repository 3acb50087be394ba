#include "sgvi/random_instance.hpp"

#include <algorithm>
#include <set>

#include "sgvi/error.hpp"

namespace sgvi {

namespace {

Vector normal_vector(std::size_t d, Rng& rng) {
  Vector x(d);
  for (double& v : x) v = standard_normal(rng);
  return x;
}

}  // namespace

SceneFactorGraph random_graph(const RandomGraphSpec& spec, Rng& rng) {
  const std::size_t g = spec.with_global ? 1 : 0;
  if (spec.num_nodes < g) throw ArgumentError("random_graph: too few nodes");
  const std::size_t rest = spec.num_nodes - g;

  // Number of objects m with rest - m <= m (m - 1).
  std::vector<std::size_t> options;
  for (std::size_t m = 1; m <= rest; ++m) {
    if (rest - m <= m * (m - 1)) options.push_back(m);
  }
  std::size_t m = 0, n = 0;
  if (!options.empty()) {
    m = options[static_cast<std::size_t>(
        uniform_int(rng, 0, static_cast<std::int64_t>(options.size()) - 1))];
    n = rest - m;
  }

  GraphBuilder b(spec.vocab, spec.feature_dim);
  std::vector<NodeId> objects;
  for (std::size_t i = 0; i < m; ++i) {
    objects.push_back(b.add_object(normal_vector(spec.feature_dim, rng)));
  }
  std::vector<std::pair<NodeId, NodeId>> pairs;
  for (NodeId s : objects) {
    for (NodeId o : objects) {
      if (s != o) pairs.emplace_back(s, o);
    }
  }
  std::set<std::pair<NodeId, NodeId>> linked;
  for (std::size_t j = 0; j < n; ++j) {
    const auto k = static_cast<std::size_t>(
        uniform_int(rng, static_cast<std::int64_t>(j),
                    static_cast<std::int64_t>(pairs.size()) - 1));
    std::swap(pairs[j], pairs[k]);
    const auto [s, o] = pairs[j];
    b.add_predicate(normal_vector(spec.feature_dim, rng), Relation{s, o});
    linked.emplace(std::min(s, o), std::max(s, o));
  }
  for (std::size_t a = 0; a < objects.size(); ++a) {
    for (std::size_t c = a + 1; c < objects.size(); ++c) {
      const bool related = linked.count({objects[a], objects[c]}) > 0;
      if (related || uniform_open(rng) < spec.extra_object_edge) {
        b.connect(objects[a], objects[c]);
      }
    }
  }
  if (spec.with_global) {
    b.set_global(normal_vector(spec.feature_dim, rng));
    b.connect_global_to_all();
  }
  return b.build();
}

VocabSizes random_vocab(Rng& rng, std::size_t lo, std::size_t hi) {
  if (lo < 2 || hi < lo) throw ArgumentError("random_vocab: need 2 <= lo <= hi");
  auto draw = [&] {
    return static_cast<std::size_t>(
        uniform_int(rng, static_cast<std::int64_t>(lo), static_cast<std::int64_t>(hi)));
  };
  VocabSizes v;
  v.objects = draw();
  v.predicates = draw();
  v.global = draw();
  return v;
}

PotentialModel random_model(const ModelShape& shape, double output_scale,
                            std::uint64_t seed) {
  PotentialModel model = PotentialModel::glorot(shape, seed);
  auto params = model.mutable_parameters();
  for (MapKind kind : kAllMaps) {
    const MlpLayout& l = model.layout(kind);
    for (std::size_t p = l.w2(); p < l.w2() + l.output * l.hidden; ++p) {
      params[p] *= output_scale;
    }
  }
  return model;
}

Vector random_logits(std::size_t v, double scale, Rng& rng) {
  Vector x(v);
  for (double& e : x) e = scale * standard_normal(rng);
  return x;
}

}  // namespace sgvi
