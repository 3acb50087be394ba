#include "sgvi/graph.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "sgvi/error.hpp"

namespace sgvi {

std::string_view to_string(NodeKind kind) {
  switch (kind) {
    case NodeKind::Object:
      return "object";
    case NodeKind::Predicate:
      return "predicate";
    case NodeKind::Global:
      return "global";
  }
  return "unknown";
}

std::size_t VocabSizes::of(NodeKind kind) const {
  switch (kind) {
    case NodeKind::Object:
      return objects;
    case NodeKind::Predicate:
      return predicates;
    case NodeKind::Global:
      return global;
  }
  return 0;
}

namespace {

std::string node_name(NodeId id, NodeKind kind) {
  std::ostringstream os;
  os << to_string(kind) << " node " << id;
  return os.str();
}

bool allowed_edge(NodeKind a, NodeKind b) {
  if (a == NodeKind::Global && b == NodeKind::Global) return false;
  if (a == NodeKind::Predicate && b == NodeKind::Predicate) return false;
  return true;
}

}  // namespace

SceneFactorGraph::SceneFactorGraph(GraphData data)
    : kinds_(std::move(data.kinds)),
      features_(std::move(data.features)),
      relations_(std::move(data.relations)),
      vocab_(data.vocab),
      feature_dim_(data.feature_dim) {
  if (vocab_.objects < 2 || vocab_.predicates < 2 || vocab_.global < 2) {
    throw GraphError("vocabulary sizes must all be >= 2");
  }
  if (feature_dim_ == 0) throw GraphError("feature dimension must be positive");
  if (features_.size() != kinds_.size()) {
    throw GraphError("features given for " + std::to_string(features_.size()) +
                     " nodes but graph has " + std::to_string(kinds_.size()));
  }
  const auto n = static_cast<NodeId>(kinds_.size());
  for (NodeId id = 0; id < n; ++id) {
    if (features_[id].size() != feature_dim_) {
      throw ShapeError(node_name(id, kinds_[id]) + ": feature dimension " +
                       std::to_string(features_[id].size()) + ", expected " +
                       std::to_string(feature_dim_));
    }
    if (!all_finite(features_[id])) {
      throw GraphError(node_name(id, kinds_[id]) + ": non-finite feature");
    }
    switch (kinds_[id]) {
      case NodeKind::Object:
        objects_.push_back(id);
        inferred_.push_back(id);
        break;
      case NodeKind::Predicate:
        predicates_.push_back(id);
        inferred_.push_back(id);
        break;
      case NodeKind::Global:
        if (global_) throw GraphError("more than one global node");
        global_ = id;
        break;
    }
  }

  neighbors_.assign(n, {});
  for (auto [a, b] : data.edges) {
    if (a >= n || b >= n) throw GraphError("edge references unknown node");
    if (a == b) throw GraphError("self loop on node " + std::to_string(a));
    if (!allowed_edge(kinds_[a], kinds_[b])) {
      throw GraphError("edge " + node_name(a, kinds_[a]) + " -- " +
                       node_name(b, kinds_[b]) + " is not allowed");
    }
    neighbors_[a].push_back(b);
    neighbors_[b].push_back(a);
  }
  for (auto& nb : neighbors_) {
    std::sort(nb.begin(), nb.end());
    nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
  }

  std::sort(relations_.begin(), relations_.end(),
            [](const auto& x, const auto& y) { return x.first < y.first; });
  for (std::size_t r = 0; r < relations_.size(); ++r) {
    const auto& [pred, rel] = relations_[r];
    if (pred >= n || kinds_[pred] != NodeKind::Predicate) {
      throw GraphError("relation attached to non-predicate node " +
                       std::to_string(pred));
    }
    if (r > 0 && relations_[r - 1].first == pred) {
      throw GraphError("predicate " + std::to_string(pred) +
                       " has two relations");
    }
    for (NodeId end : {rel.subject, rel.object}) {
      if (end >= n || kinds_[end] != NodeKind::Object) {
        throw GraphError("predicate " + std::to_string(pred) +
                         ": relation endpoint is not an object node");
      }
      if (!adjacent(pred, end)) {
        throw GraphError("predicate " + std::to_string(pred) +
                         ": relation endpoint " + std::to_string(end) +
                         " is not a neighbour");
      }
    }
  }
}

bool SceneFactorGraph::adjacent(NodeId a, NodeId b) const {
  const auto& nb = neighbors_.at(a);
  return std::binary_search(nb.begin(), nb.end(), b);
}

std::optional<Relation> SceneFactorGraph::relation(NodeId predicate) const {
  auto it = std::lower_bound(
      relations_.begin(), relations_.end(), predicate,
      [](const auto& entry, NodeId id) { return entry.first < id; });
  if (it == relations_.end() || it->first != predicate) return std::nullopt;
  return it->second;
}

std::vector<std::pair<NodeId, NodeId>> SceneFactorGraph::edges() const {
  std::vector<std::pair<NodeId, NodeId>> out;
  for (NodeId a = 0; a < neighbors_.size(); ++a) {
    for (NodeId b : neighbors_[a]) {
      if (a < b) out.emplace_back(a, b);
    }
  }
  return out;
}

GraphData SceneFactorGraph::data() const {
  GraphData d;
  d.kinds = kinds_;
  d.features = features_;
  d.edges = edges();
  d.relations = relations_;
  d.vocab = vocab_;
  d.feature_dim = feature_dim_;
  return d;
}

GraphBuilder::GraphBuilder(VocabSizes vocab, std::size_t feature_dim) {
  data_.vocab = vocab;
  data_.feature_dim = feature_dim;
}

NodeId GraphBuilder::add_object(Vector features) {
  data_.kinds.push_back(NodeKind::Object);
  data_.features.push_back(std::move(features));
  return static_cast<NodeId>(data_.kinds.size() - 1);
}

NodeId GraphBuilder::add_predicate(Vector features,
                                   std::optional<Relation> relation) {
  data_.kinds.push_back(NodeKind::Predicate);
  data_.features.push_back(std::move(features));
  const auto id = static_cast<NodeId>(data_.kinds.size() - 1);
  if (relation) {
    data_.relations.emplace_back(id, *relation);
    connect(relation->subject, id);
    connect(relation->object, id);
  }
  return id;
}

NodeId GraphBuilder::set_global(Vector features) {
  if (global_) throw GraphError("global node already set");
  data_.kinds.push_back(NodeKind::Global);
  data_.features.push_back(std::move(features));
  global_ = static_cast<NodeId>(data_.kinds.size() - 1);
  return *global_;
}

GraphBuilder& GraphBuilder::connect(NodeId a, NodeId b) {
  data_.edges.emplace_back(a, b);
  return *this;
}

GraphBuilder& GraphBuilder::connect_global_to_all() {
  if (!global_) throw GraphError("no global node to connect");
  for (NodeId id = 0; id < data_.kinds.size(); ++id) {
    if (id != *global_) connect(id, *global_);
  }
  return *this;
}

SceneFactorGraph GraphBuilder::build() const { return SceneFactorGraph(data_); }

RelaxedAssignment one_hot(const SceneFactorGraph& graph, const Assignment& a) {
  validate_assignment(graph, a);
  RelaxedAssignment z;
  z.labels.resize(graph.num_nodes());
  for (NodeId id = 0; id < graph.num_nodes(); ++id) {
    z.labels[id].assign(graph.vocab_size(id), 0.0);
    z.labels[id][a.labels[id]] = 1.0;
  }
  return z;
}

void validate_relaxed(const SceneFactorGraph& graph,
                      const RelaxedAssignment& z) {
  if (z.labels.size() != graph.num_nodes()) {
    throw ShapeError("relaxed assignment covers " +
                     std::to_string(z.labels.size()) + " nodes, graph has " +
                     std::to_string(graph.num_nodes()));
  }
  for (NodeId id = 0; id < graph.num_nodes(); ++id) {
    const auto& v = z.labels[id];
    if (v.size() != graph.vocab_size(id)) {
      throw ShapeError(node_name(id, graph.kind(id)) + ": relaxed vector has " +
                       std::to_string(v.size()) + " entries, vocabulary is " +
                       std::to_string(graph.vocab_size(id)));
    }
    double total = 0.0;
    for (double p : v) {
      if (!(p >= 0.0)) {
        throw ShapeError(node_name(id, graph.kind(id)) +
                         ": relaxed vector has a negative or NaN entry");
      }
      total += p;
    }
    if (std::abs(total - 1.0) > 1e-9) {
      throw ShapeError(node_name(id, graph.kind(id)) +
                       ": relaxed vector does not sum to 1");
    }
  }
}

void validate_assignment(const SceneFactorGraph& graph, const Assignment& a) {
  if (a.labels.size() != graph.num_nodes()) {
    throw ShapeError("assignment covers " + std::to_string(a.labels.size()) +
                     " nodes, graph has " + std::to_string(graph.num_nodes()));
  }
  for (NodeId id = 0; id < graph.num_nodes(); ++id) {
    if (a.labels[id] >= graph.vocab_size(id)) {
      throw ShapeError(node_name(id, graph.kind(id)) + ": label " +
                       std::to_string(a.labels[id]) + " out of range");
    }
  }
}

double state_space_size(const SceneFactorGraph& graph) {
  double size = 1.0;
  for (NodeId id = 0; id < graph.num_nodes(); ++id) {
    size *= static_cast<double>(graph.vocab_size(id));
  }
  return size;
}

AssignmentEnumerator::AssignmentEnumerator(const SceneFactorGraph& graph,
                                           double cap)
    : size_(state_space_size(graph)) {
  if (size_ > cap) {
    std::ostringstream os;
    os << "joint state space has " << size_ << " assignments, cap is " << cap;
    throw StateSpaceError(os.str(), size_);
  }
  radix_.resize(graph.num_nodes());
  for (NodeId id = 0; id < graph.num_nodes(); ++id) {
    radix_[id] = graph.vocab_size(id);
  }
  current_.labels.assign(graph.num_nodes(), 0);
}

bool AssignmentEnumerator::next(Assignment& out) {
  if (done_) return false;
  if (!started_) {
    started_ = true;
    out = current_;
    return true;
  }
  for (std::size_t pos = radix_.size(); pos-- > 0;) {
    if (++current_.labels[pos] < radix_[pos]) {
      out = current_;
      return true;
    }
    current_.labels[pos] = 0;
  }
  done_ = true;
  return false;
}

}  // namespace sgvi
