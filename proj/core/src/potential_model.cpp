#include "sgvi/potential_model.hpp"

#include <cmath>

#include "sgvi/error.hpp"
#include "sgvi/rng.hpp"

namespace sgvi {

std::string_view map_name(MapKind kind) {
  switch (kind) {
    case MapKind::UnaryObject:
      return "h_o";
    case MapKind::UnaryPredicate:
      return "h_p";
    case MapKind::ObjectPredicate:
      return "g_op";
    case MapKind::ObjectObject:
      return "g_oo";
    case MapKind::ObjectGlobal:
      return "g_og";
    case MapKind::PredicateObject:
      return "g_po";
    case MapKind::PredicateGlobal:
      return "g_pg";
  }
  return "?";
}

bool is_unary(MapKind kind) {
  return kind == MapKind::UnaryObject || kind == MapKind::UnaryPredicate;
}

namespace {

std::size_t target_vocab(MapKind kind, const VocabSizes& vocab) {
  switch (kind) {
    case MapKind::UnaryObject:
    case MapKind::ObjectPredicate:
    case MapKind::ObjectObject:
    case MapKind::ObjectGlobal:
      return vocab.objects;
    case MapKind::UnaryPredicate:
    case MapKind::PredicateObject:
    case MapKind::PredicateGlobal:
      return vocab.predicates;
  }
  return 0;
}

}  // namespace

PotentialModel::PotentialModel(ModelShape shape) : shape_(shape) {
  if (shape_.feature_dim == 0 || shape_.hidden == 0) {
    throw ArgumentError("model feature_dim and hidden must be positive");
  }
  if (shape_.vocab.objects < 2 || shape_.vocab.predicates < 2 ||
      shape_.vocab.global < 2) {
    throw ArgumentError("model vocabulary sizes must be >= 2");
  }
  std::size_t offset = 0;
  for (MapKind kind : kAllMaps) {
    MlpLayout& l = layouts_[static_cast<std::size_t>(kind)];
    l.input = is_unary(kind) ? shape_.feature_dim : 2 * shape_.feature_dim;
    l.hidden = shape_.hidden;
    l.output = target_vocab(kind, shape_.vocab);
    l.offset = offset;
    offset += l.size();
  }
  params_.assign(offset, 0.0);
}

PotentialModel PotentialModel::glorot(ModelShape shape, std::uint64_t seed) {
  PotentialModel model(shape);
  Rng rng(derive_seed(seed, {stream::kModel}));
  auto fill = [&](std::size_t begin, std::size_t count, std::size_t fan_in,
                  std::size_t fan_out) {
    const double limit =
        std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    for (std::size_t k = 0; k < count; ++k) {
      model.params_[begin + k] = limit * (2.0 * uniform_open(rng) - 1.0);
    }
  };
  for (MapKind kind : kAllMaps) {
    const MlpLayout& l = model.layout(kind);
    fill(l.w1(), l.hidden * l.input, l.input, l.hidden);
    fill(l.w2(), l.output * l.hidden, l.hidden, l.output);
  }
  return model;
}

std::span<double> PotentialModel::mutable_parameters() {
  ++version_;
  return params_;
}

std::span<const double> PotentialModel::block(MapKind kind) const {
  const MlpLayout& l = layout(kind);
  return std::span<const double>(params_).subspan(l.offset, l.size());
}

Vector PotentialModel::evaluate(MapKind kind, std::span<const double> input,
                                MlpActivations* cache) const {
  const MlpLayout& l = layout(kind);
  if (input.size() != l.input) {
    throw ShapeError(std::string(map_name(kind)) + ": input length " +
                     std::to_string(input.size()) + ", expected " +
                     std::to_string(l.input));
  }
  const double* p = params_.data();
  Vector pre(l.hidden);
  for (std::size_t h = 0; h < l.hidden; ++h) {
    const double* row = p + l.w1() + h * l.input;
    double acc = p[l.b1() + h];
    for (std::size_t k = 0; k < l.input; ++k) acc += row[k] * input[k];
    pre[h] = acc;
  }
  Vector out(l.output);
  for (std::size_t o = 0; o < l.output; ++o) {
    const double* row = p + l.w2() + o * l.hidden;
    double acc = p[l.b2() + o];
    for (std::size_t h = 0; h < l.hidden; ++h) {
      if (pre[h] > 0.0) acc += row[h] * pre[h];
    }
    out[o] = acc;
  }
  if (cache) {
    cache->input.assign(input.begin(), input.end());
    cache->hidden_pre = std::move(pre);
  }
  return out;
}

void PotentialModel::backprop(MapKind kind, const MlpActivations& cache,
                              std::span<const double> d_output,
                              std::span<double> grad) const {
  const MlpLayout& l = layout(kind);
  if (d_output.size() != l.output || grad.size() != params_.size() ||
      cache.input.size() != l.input || cache.hidden_pre.size() != l.hidden) {
    throw ShapeError(std::string(map_name(kind)) + ": backprop shape mismatch");
  }
  const double* p = params_.data();
  Vector d_hidden(l.hidden, 0.0);
  for (std::size_t o = 0; o < l.output; ++o) {
    const double g = d_output[o];
    if (g == 0.0) continue;
    grad[l.b2() + o] += g;
    const double* row = p + l.w2() + o * l.hidden;
    double* grow = grad.data() + l.w2() + o * l.hidden;
    for (std::size_t h = 0; h < l.hidden; ++h) {
      const double a = cache.hidden_pre[h];
      if (a > 0.0) {
        grow[h] += g * a;
        d_hidden[h] += g * row[h];
      }
    }
  }
  for (std::size_t h = 0; h < l.hidden; ++h) {
    const double g = d_hidden[h];
    if (g == 0.0) continue;
    grad[l.b1() + h] += g;
    double* grow = grad.data() + l.w1() + h * l.input;
    for (std::size_t k = 0; k < l.input; ++k) grow[k] += g * cache.input[k];
  }
}

void PotentialModel::check_compatible(const SceneFactorGraph& graph) const {
  if (graph.feature_dim() != shape_.feature_dim) {
    throw ShapeError("graph feature dimension " +
                     std::to_string(graph.feature_dim()) + " vs model " +
                     std::to_string(shape_.feature_dim));
  }
  if (!(graph.vocab() == shape_.vocab)) {
    throw ShapeError("graph vocabulary sizes do not match the model");
  }
}

}  // namespace sgvi
