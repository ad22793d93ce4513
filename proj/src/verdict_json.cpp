#include "cgid/verdict_json.hpp"

#include "cgid/model_io.hpp"

namespace cgid {

using nlohmann::json;

json set_to_json(const NodeSet& s) { return json(std::vector<std::string>(s.begin(), s.end())); }

json hedge_to_json(const HedgeWitness& w) {
    json tree = json::array();
    for (const auto& [a, b] : w.spanning_tree) tree.push_back({a, b});
    json forest = json::array();
    for (const auto& [a, b] : w.forest_edges) forest.push_back({a, b});
    return {{"roots", set_to_json(w.roots)},
            {"inner", set_to_json(w.inner)},
            {"spanning_tree", tree},
            {"forest_edges", forest}};
}

namespace {

json chosen_to_json(const std::vector<ChosenInput>& chosen, const QSpec& spec) {
    json out = json::array();
    for (const auto& c : chosen)
        out.push_back({{"component", set_to_json(c.component)}, {"input", spec.entries.at(c.input).label}});
    return out;
}

}  // namespace

json verdict_to_json(const Verdict& v, const QSpec& spec) {
    json out;
    out["moved_to_intervention"] = set_to_json(v.moved_to_intervention);
    if (v.identifiable()) {
        const auto& ok = v.identified();
        out["verdict"] = "identifiable";
        out["chosen_inputs"] = chosen_to_json(ok.chosen_inputs, spec);
        out["estimand"] = to_json(ok.estimand);
        const LabeledText text = to_labeled_text(ok.estimand);
        out["estimand_text"] = text.expression;
        json defs = json::array();
        for (const auto& [label, def] : text.definitions) defs.push_back({{"label", label}, {"definition", def}});
        out["definitions"] = defs;
        return out;
    }
    const auto& bad = v.failure();
    out["verdict"] = "not_identifiable";
    out["chosen_inputs"] = chosen_to_json(bad.chosen_inputs, spec);
    out["failing_component"] = set_to_json(bad.failing_component);
    json reasons = json::array();
    json witnesses = json::array();
    for (const auto& r : bad.reasons) {
        json item{{"input", spec.entries.at(r.input).label}};
        if (r.reason == InputFailure::Reason::not_superset) {
            item["reason"] = "not_superset";
        } else {
            item["reason"] = "not_identifiable";
            item["stuck_at"] = set_to_json(r.stuck_at);
            if (r.hedge) {
                item["hedge"] = hedge_to_json(*r.hedge);
                witnesses.push_back({{"kind", "hedge"}, {"input", spec.entries.at(r.input).label},
                                     {"hedge", hedge_to_json(*r.hedge)}});
            }
        }
        reasons.push_back(std::move(item));
    }
    if (bad.model_witness) witnesses.push_back({{"kind", "model_pair"}, {"reference", *bad.model_witness}});
    out["reasons"] = reasons;
    out["witnesses"] = witnesses;
    return out;
}

json witness_to_json(const ModelPair& pair) {
    json realization = json::object();
    for (const auto& [name, value] : pair.check.realization) realization[name] = value;
    return {{"input_mismatch", pair.check.input_mismatch},
            {"gap", pair.check.gap},
            {"realization", realization},
            {"target_first", pair.check.target_first},
            {"target_second", pair.check.target_second},
            {"restart", pair.restart},
            {"first", model_to_json(pair.first)},
            {"second", model_to_json(pair.second)}};
}

}  // namespace cgid
