#pragma once

#include "json.hpp"

#include "cgid/sem.hpp"

namespace cgid {

/// Model file layout:
///
///   {
///     "format": "cgid-model/1",
///     "latents": [{"name": "U_X_Y", "children": ["X", "Y"], "card": 2,
///                  "marginal": [0.4, 0.6]}, ...],
///     "nodes": [{"name": "Y", "card": 2, "parents": ["X"],
///                "latents": ["U_X_Y"], "cpt": [[...], ...]}, ...]
///   }
///
/// Nodes appear in name order. CPT rows are indexed by the listed parents
/// then the listed latents, last varying fastest; each row is the
/// distribution of the node.
nlohmann::json model_to_json(const DiscreteSEM& m);

/// Parses a model and checks it against g (structure, normalization,
/// positivity). Throws EvalError with the first problem found.
DiscreteSEM model_from_json(const nlohmann::json& j, const CausalGraph& g);

}  // namespace cgid
