#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sgvi/numeric.hpp"

namespace sgvi {

using NodeId = std::uint32_t;
using Label = std::size_t;

enum class NodeKind : std::uint8_t { Object, Predicate, Global };

std::string_view to_string(NodeKind kind);

struct VocabSizes {
  std::size_t objects = 6;
  std::size_t predicates = 5;
  std::size_t global = 4;

  std::size_t of(NodeKind kind) const;
  friend bool operator==(const VocabSizes&, const VocabSizes&) = default;
};

// Subject/object roles of a predicate node. Used to form triplets; the factor
// structure itself only looks at the neighbour sets.
struct Relation {
  NodeId subject;
  NodeId object;
  friend bool operator==(const Relation&, const Relation&) = default;
};

// Plain description of a graph; SceneFactorGraph validates it on
// construction. Node ids are dense indices into `kinds`/`features`.
struct GraphData {
  std::vector<NodeKind> kinds;
  std::vector<Vector> features;
  std::vector<std::pair<NodeId, NodeId>> edges;
  std::vector<std::pair<NodeId, Relation>> relations;
  VocabSizes vocab;
  std::size_t feature_dim = 16;
};

// Objects, predicates and at most one global node, with symmetric neighbour
// sets and a feature vector per node. Immutable once built.
//
// Edge taxonomy: predicate nodes neighbour only objects and the global node;
// objects may neighbour predicates, objects and the global node.
class SceneFactorGraph {
 public:
  SceneFactorGraph() = default;
  explicit SceneFactorGraph(GraphData data);

  std::size_t num_nodes() const { return kinds_.size(); }
  std::size_t feature_dim() const { return feature_dim_; }
  const VocabSizes& vocab() const { return vocab_; }

  NodeKind kind(NodeId id) const { return kinds_.at(id); }
  std::size_t vocab_size(NodeId id) const { return vocab_.of(kind(id)); }
  std::span<const double> features(NodeId id) const { return features_.at(id); }
  std::span<const NodeId> neighbors(NodeId id) const { return neighbors_.at(id); }
  bool adjacent(NodeId a, NodeId b) const;

  const std::vector<NodeId>& objects() const { return objects_; }
  const std::vector<NodeId>& predicates() const { return predicates_; }
  std::optional<NodeId> global() const { return global_; }

  // Object and predicate nodes in ascending id order: the nodes that carry a
  // variational factor.
  const std::vector<NodeId>& inferred_nodes() const { return inferred_; }

  std::optional<Relation> relation(NodeId predicate) const;
  const std::vector<std::pair<NodeId, Relation>>& relations() const {
    return relations_;
  }

  // Undirected edges with first < second, sorted.
  std::vector<std::pair<NodeId, NodeId>> edges() const;

  GraphData data() const;

 private:
  std::vector<NodeKind> kinds_;
  std::vector<Vector> features_;
  std::vector<std::vector<NodeId>> neighbors_;
  std::vector<std::pair<NodeId, Relation>> relations_;
  std::vector<NodeId> objects_;
  std::vector<NodeId> predicates_;
  std::vector<NodeId> inferred_;
  std::optional<NodeId> global_;
  VocabSizes vocab_;
  std::size_t feature_dim_ = 0;
};

// Incremental construction helper.
class GraphBuilder {
 public:
  GraphBuilder(VocabSizes vocab, std::size_t feature_dim);

  NodeId add_object(Vector features);
  // Adds the predicate and connects it to subject and object.
  NodeId add_predicate(Vector features, std::optional<Relation> relation = {});
  NodeId set_global(Vector features);
  GraphBuilder& connect(NodeId a, NodeId b);
  // Connects the global node to every object and predicate.
  GraphBuilder& connect_global_to_all();

  SceneFactorGraph build() const;

 private:
  GraphData data_;
  std::optional<NodeId> global_;
};

// Hard labelling: labels[id] is the category of node id.
struct Assignment {
  std::vector<Label> labels;
  friend bool operator==(const Assignment&, const Assignment&) = default;
};

// Relaxed labelling: one simplex vector per node.
struct RelaxedAssignment {
  std::vector<Vector> labels;
};

RelaxedAssignment one_hot(const SceneFactorGraph& graph, const Assignment& a);

// Throws ShapeError naming the node when a vector has the wrong length or is
// not on the simplex (tolerance 1e-9).
void validate_relaxed(const SceneFactorGraph& graph, const RelaxedAssignment& z);
void validate_assignment(const SceneFactorGraph& graph, const Assignment& a);

inline constexpr double kDefaultStateSpaceCap = 1e7;

// Product of vocabulary sizes over all nodes (as a double so that huge graphs
// report a size instead of overflowing).
double state_space_size(const SceneFactorGraph& graph);

// Streams every joint assignment exactly once, lexicographic in
// (label of node 0, label of node 1, ...) with the last node varying fastest.
// Construction throws StateSpaceError when the state space exceeds `cap`.
class AssignmentEnumerator {
 public:
  explicit AssignmentEnumerator(const SceneFactorGraph& graph,
                                double cap = kDefaultStateSpaceCap);

  // Writes the next assignment into `out`; false once exhausted.
  bool next(Assignment& out);
  double size() const { return size_; }

 private:
  std::vector<std::size_t> radix_;
  Assignment current_;
  double size_ = 1.0;
  bool started_ = false;
  bool done_ = false;
};

}  // namespace sgvi
