#pragma once

// nlohmann/json conversions shared by the serializers. Private to the core
// library; public headers expose string-based APIs only.

#include <json.hpp>

#include "sgvi/graph.hpp"

namespace sgvi::detail {

using Json = nlohmann::json;

Json graph_json(const SceneFactorGraph& graph);
SceneFactorGraph graph_from(const Json& j);

Json assignment_json(const Assignment& a);
Assignment assignment_from(const Json& j);

// Fetches a required member, throwing sgvi::Error with `where` in the message.
const Json& member(const Json& j, const char* key, const std::string& where);

}  // namespace sgvi::detail
