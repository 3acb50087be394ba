#include "sgvi/graph_io.hpp"

#include <algorithm>

#include "json_convert.hpp"
#include "sgvi/error.hpp"

namespace sgvi {
namespace detail {

const Json& member(const Json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) {
    throw Error(where + ": missing field '" + key + "'");
  }
  return j.at(key);
}

Json graph_json(const SceneFactorGraph& graph) {
  Json j;
  j["feature_dim"] = graph.feature_dim();
  j["vocab_sizes"] = {{"objects", graph.vocab().objects},
                      {"predicates", graph.vocab().predicates},
                      {"global", graph.vocab().global}};
  j["objects"] = graph.objects();
  Json preds = Json::array();
  for (NodeId p : graph.predicates()) {
    Json entry = {{"id", p}};
    if (auto rel = graph.relation(p)) {
      entry["subject"] = rel->subject;
      entry["object"] = rel->object;
    }
    preds.push_back(std::move(entry));
  }
  j["predicates"] = std::move(preds);
  j["global"] = graph.global() ? Json(*graph.global()) : Json(nullptr);
  Json edges = Json::array();
  for (auto [a, b] : graph.edges()) edges.push_back({a, b});
  j["edges"] = std::move(edges);
  Json feats = Json::array();
  for (NodeId id = 0; id < graph.num_nodes(); ++id) {
    auto f = graph.features(id);
    feats.push_back(Vector(f.begin(), f.end()));
  }
  j["features"] = std::move(feats);
  return j;
}

SceneFactorGraph graph_from(const Json& j) {
  const std::string where = "graph";
  try {
    GraphData d;
    d.feature_dim = member(j, "feature_dim", where).get<std::size_t>();
    const auto& vs = member(j, "vocab_sizes", where);
    d.vocab.objects = member(vs, "objects", where + ".vocab_sizes").get<std::size_t>();
    d.vocab.predicates =
        member(vs, "predicates", where + ".vocab_sizes").get<std::size_t>();
    d.vocab.global = member(vs, "global", where + ".vocab_sizes").get<std::size_t>();

    const auto& feats = member(j, "features", where);
    const std::size_t n = feats.size();
    d.features.reserve(n);
    for (const auto& f : feats) d.features.push_back(f.get<Vector>());

    std::vector<int> seen(n, 0);
    d.kinds.assign(n, NodeKind::Object);
    auto claim = [&](NodeId id, NodeKind kind) {
      if (id >= n) throw GraphError("node id " + std::to_string(id) + " has no features");
      if (seen[id]++) throw GraphError("node id " + std::to_string(id) + " listed twice");
      d.kinds[id] = kind;
    };
    for (const auto& o : member(j, "objects", where)) claim(o.get<NodeId>(), NodeKind::Object);
    for (const auto& p : member(j, "predicates", where)) {
      const auto id = member(p, "id", where + ".predicates").get<NodeId>();
      claim(id, NodeKind::Predicate);
      if (p.contains("subject") && p.contains("object")) {
        d.relations.emplace_back(
            id, Relation{p["subject"].get<NodeId>(), p["object"].get<NodeId>()});
      }
    }
    const auto& g = member(j, "global", where);
    if (!g.is_null()) claim(g.get<NodeId>(), NodeKind::Global);
    if (std::find(seen.begin(), seen.end(), 0) != seen.end()) {
      throw GraphError("some node ids are not assigned a kind");
    }
    for (const auto& e : member(j, "edges", where)) {
      if (!e.is_array() || e.size() != 2) throw GraphError("edge must be a pair");
      d.edges.emplace_back(e[0].get<NodeId>(), e[1].get<NodeId>());
    }
    return SceneFactorGraph(std::move(d));
  } catch (const nlohmann::json::exception& ex) {
    throw Error(where + ": " + ex.what());
  }
}

Json assignment_json(const Assignment& a) { return Json(a.labels); }

Assignment assignment_from(const Json& j) {
  try {
    return Assignment{j.get<std::vector<Label>>()};
  } catch (const nlohmann::json::exception& ex) {
    throw Error(std::string("assignment: ") + ex.what());
  }
}

}  // namespace detail

std::string graph_to_json(const SceneFactorGraph& graph, int indent) {
  return detail::graph_json(graph).dump(indent);
}

SceneFactorGraph graph_from_json(std::string_view text) {
  detail::Json j;
  try {
    j = detail::Json::parse(text);
  } catch (const nlohmann::json::exception& ex) {
    throw Error(std::string("graph: ") + ex.what());
  }
  return detail::graph_from(j);
}

std::string assignment_to_json(const Assignment& a) {
  return detail::assignment_json(a).dump();
}

Assignment assignment_from_json(std::string_view text) {
  try {
    return detail::assignment_from(detail::Json::parse(text));
  } catch (const nlohmann::json::exception& ex) {
    throw Error(std::string("assignment: ") + ex.what());
  }
}

}  // namespace sgvi
