#include "cgid/gid.hpp"

#include <set>

#include "cgid/error.hpp"
#include "cgid/identify.hpp"

namespace cgid {

void QSpec::validate(const CausalGraph& g) const {
    std::set<NodeSet> seen;
    for (const auto& entry : entries) {
        if (entry.set.empty()) throw PreconditionError("input " + entry.label + " is empty");
        require_known(g, entry.set);
        if (!seen.insert(entry.set).second)
            throw PreconditionError("input " + entry.label + " duplicates " + to_string(entry.set));
    }
}

QSpec QSpec::from_sets(const std::vector<NodeSet>& sets) {
    QSpec spec;
    for (std::size_t i = 0; i < sets.size(); ++i) spec.entries.push_back({"A" + std::to_string(i), sets[i]});
    return spec;
}

namespace {

void require_query(const NodeSet& x, const NodeSet& y, const CausalGraph& g) {
    require_known(g, x);
    require_known(g, y);
    if (y.empty()) throw PreconditionError("target set y is empty");
    if (intersects(x, y)) throw PreconditionError("x and y overlap");
}

}  // namespace

Verdict gid_decide(const NodeSet& x, const NodeSet& y, const QSpec& spec, const CausalGraph& g,
                   const GidOptions& options) {
    require_query(x, y, g);
    spec.validate(g);

    const NodeSet& all = g.observed();
    const NodeSet d = ancestors(induced(g, set_difference(all, x)), y);
    const auto components = c_components(induced(g, d), d);

    std::vector<Estimand> factors;
    std::vector<ChosenInput> chosen;
    for (const auto& s : components) {
        std::vector<InputFailure> reasons;
        std::optional<Estimand> found;
        for (std::size_t j = 0; j < spec.entries.size() && !found; ++j) {
            const NodeSet& a = spec.entries[j].set;
            if (!is_subset(s, a)) {
                reasons.push_back({j, InputFailure::Reason::not_superset, {}, std::nullopt});
                continue;
            }
            IdentifyResult r = identify_q(s, a, g, Estimand::input(j, a, all));
            if (r.identifiable()) {
                found = std::move(r.estimand);
                chosen.push_back({s, j});
                break;
            }
            InputFailure failure{j, InputFailure::Reason::not_identifiable, r.failing_set, std::nullopt};
            if (options.collect_hedges) {
                try {
                    failure.hedge = find_hedge(g, a, s, options.hedge);
                } catch (const BudgetError&) {
                }
            }
            reasons.push_back(std::move(failure));
        }
        if (!found) {
            return Verdict{NotIdentifiable{s, std::move(reasons), std::move(chosen), std::nullopt}, {}};
        }
        factors.push_back(std::move(*found));
    }

    Estimand joint = factors.size() == 1 ? factors.front() : Estimand::product(std::move(factors));
    const NodeSet hidden = set_difference(d, y);
    Estimand e = hidden.empty() ? joint : Estimand::sum(hidden, joint);
    return Verdict{Identifiable{std::move(e), std::move(chosen)}, {}};
}

Verdict id_decide(const NodeSet& x, const NodeSet& y, const CausalGraph& g) {
    require_query(x, y, g);
    const NodeSet& all = g.observed();
    const Estimand joint_input = Estimand::input(0, all, all);
    const NodeSet d = ancestors(induced(g, set_difference(all, x)), y);

    std::vector<Estimand> factors;
    std::vector<ChosenInput> chosen;
    for (const auto& s : c_components(induced(g, d), d)) {
        IdentifyResult r = identify_q(s, all, g, joint_input);
        if (!r.identifiable()) {
            InputFailure failure{0, InputFailure::Reason::not_identifiable, r.failing_set, std::nullopt};
            return Verdict{NotIdentifiable{s, {failure}, std::move(chosen), std::nullopt}, {}};
        }
        chosen.push_back({s, 0});
        factors.push_back(*r.estimand);
    }
    Estimand e = factors.size() == 1 ? factors.front() : Estimand::product(std::move(factors));
    const NodeSet hidden = set_difference(d, y);
    if (!hidden.empty()) e = Estimand::sum(hidden, e);
    return Verdict{Identifiable{std::move(e), std::move(chosen)}, {}};
}

}  // namespace cgid
