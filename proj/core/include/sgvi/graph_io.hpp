#pragma once

#include <string>
#include <string_view>

#include "sgvi/graph.hpp"

namespace sgvi {

// Graph JSON document:
//
//   {
//     "feature_dim": 16,
//     "vocab_sizes": {"objects": 6, "predicates": 5, "global": 4},
//     "objects": [0, 1],
//     "predicates": [{"id": 2, "subject": 0, "object": 1}],
//     "global": 3,                       // or null
//     "edges": [[0, 2], [1, 2], [0, 3], [1, 3], [2, 3]],
//     "features": [[...], [...], [...], [...]]   // indexed by node id
//   }
//
// Node ids are dense; every id in [0, N) appears in exactly one of objects,
// predicates, global. "subject"/"object" are optional on a predicate.
// Doubles are written with round-trip precision.
std::string graph_to_json(const SceneFactorGraph& graph, int indent = -1);
SceneFactorGraph graph_from_json(std::string_view text);

std::string assignment_to_json(const Assignment& a);
Assignment assignment_from_json(std::string_view text);

}  // namespace sgvi
