#pragma once

#include "json.hpp"

#include "cgid/gid.hpp"
#include "cgid/witness.hpp"

namespace cgid {

nlohmann::json set_to_json(const NodeSet& s);
nlohmann::json hedge_to_json(const HedgeWitness& w);

/// Key order and array order are fixed, so equal verdicts dump to equal
/// bytes.
nlohmann::json verdict_to_json(const Verdict& v, const QSpec& spec);

/// Summary of a model pair; the models themselves via model_to_json.
nlohmann::json witness_to_json(const ModelPair& pair);

}  // namespace cgid
