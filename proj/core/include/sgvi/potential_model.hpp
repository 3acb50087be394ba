#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

#include "sgvi/graph.hpp"
#include "sgvi/numeric.hpp"

namespace sgvi {

// The seven feature maps. Unary maps read one node's features; pairwise maps
// read the concatenation of two nodes' features and emit a vector over the
// vocabulary of the node they score.
enum class MapKind : std::size_t {
  UnaryObject = 0,      // h_o(x_i)
  UnaryPredicate,       // h_p(x_j)
  ObjectPredicate,      // g_op(x_i, x_j) -> object vocabulary
  ObjectObject,         // g_oo(x_i, x_l) -> object vocabulary
  ObjectGlobal,         // g_og(x_i, x_g) -> object vocabulary
  PredicateObject,      // g_po(x_i, x_j) -> predicate vocabulary
  PredicateGlobal,      // g_pg(x_j, x_g) -> predicate vocabulary
};
inline constexpr std::size_t kNumMaps = 7;
inline constexpr std::array<MapKind, kNumMaps> kAllMaps = {
    MapKind::UnaryObject,     MapKind::UnaryPredicate, MapKind::ObjectPredicate,
    MapKind::ObjectObject,    MapKind::ObjectGlobal,   MapKind::PredicateObject,
    MapKind::PredicateGlobal};

std::string_view map_name(MapKind kind);
bool is_unary(MapKind kind);

struct ModelShape {
  std::size_t feature_dim = 16;
  std::size_t hidden = 32;
  VocabSizes vocab;

  friend bool operator==(const ModelShape&, const ModelShape&) = default;
};

// Offsets of one two-layer perceptron inside the flat parameter vector.
// Row-major weights: w1 is hidden x input, w2 is output x hidden.
struct MlpLayout {
  std::size_t input = 0;
  std::size_t hidden = 0;
  std::size_t output = 0;
  std::size_t offset = 0;

  std::size_t w1() const { return offset; }
  std::size_t b1() const { return w1() + hidden * input; }
  std::size_t w2() const { return b1() + hidden; }
  std::size_t b2() const { return w2() + output * hidden; }
  std::size_t size() const { return (input + 1) * hidden + (hidden + 1) * output; }
};

// Cached values of one map evaluation, enough to run the backward pass.
struct MlpActivations {
  Vector input;
  Vector hidden_pre;  // before the rectifier
};

// Parameters theta of all seven maps in one contiguous vector.
class PotentialModel {
 public:
  PotentialModel() = default;
  // All parameters zero.
  explicit PotentialModel(ModelShape shape);

  // Weights uniform in +-sqrt(6 / (fan_in + fan_out)), biases zero.
  static PotentialModel glorot(ModelShape shape, std::uint64_t seed);

  const ModelShape& shape() const { return shape_; }
  const MlpLayout& layout(MapKind kind) const {
    return layouts_[static_cast<std::size_t>(kind)];
  }
  std::size_t num_parameters() const { return params_.size(); }

  std::span<const double> parameters() const { return params_; }
  // Mutable access bumps version(), which invalidates earlier forward tapes.
  std::span<double> mutable_parameters();
  std::span<const double> block(MapKind kind) const;

  std::uint64_t version() const { return version_; }

  std::size_t input_dim(MapKind kind) const { return layout(kind).input; }
  std::size_t output_dim(MapKind kind) const { return layout(kind).output; }

  Vector evaluate(MapKind kind, std::span<const double> input,
                  MlpActivations* cache = nullptr) const;

  // Adds d(output . d_output)/d(theta_kind) into `grad` (full parameter
  // length).
  void backprop(MapKind kind, const MlpActivations& cache,
                std::span<const double> d_output, std::span<double> grad) const;

  // Throws ShapeError when the graph's feature dimension or vocabularies do
  // not match.
  void check_compatible(const SceneFactorGraph& graph) const;

 private:
  ModelShape shape_;
  std::array<MlpLayout, kNumMaps> layouts_{};
  Vector params_;
  std::uint64_t version_ = 0;
};

}  // namespace sgvi
