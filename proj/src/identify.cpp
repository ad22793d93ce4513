#include "cgid/identify.hpp"

#include <algorithm>

#include "cgid/components.hpp"
#include "cgid/error.hpp"

namespace cgid {

std::string q_label(const NodeSet& s) {
    std::string out = "Q[";
    bool first = true;
    for (const auto& v : s) {
        if (!first) out += ",";
        out += v;
        first = false;
    }
    return out + "]";
}

namespace {

// Σ_{a \ prefix} Q[a] for every topological prefix of G[a], prefix length
// 0..|a|. Shared by all component products.
std::vector<Estimand> prefix_marginals(const std::vector<NodeId>& order, const NodeSet& a,
                                       const Estimand& q_a) {
    std::vector<Estimand> out;
    out.reserve(order.size() + 1);
    NodeSet rest = a;
    for (std::size_t i = 0; i <= order.size(); ++i) {
        if (i > 0) rest.erase(order[i - 1]);
        out.push_back(rest.empty() ? q_a : Estimand::sum(rest, q_a));
    }
    return out;
}

Estimand component_product(const std::vector<NodeId>& order, const std::vector<Estimand>& marginals,
                           const NodeSet& component) {
    std::vector<Estimand> factors;
    for (std::size_t i = 0; i < order.size(); ++i) {
        if (!component.count(order[i])) continue;
        factors.push_back(Estimand::ratio(marginals[i + 1], marginals[i]));
    }
    Estimand e = factors.size() == 1 ? factors.front() : Estimand::product(std::move(factors));
    return e.labeled(q_label(component));
}

}  // namespace

std::vector<std::pair<NodeSet, Estimand>> q_decompose(const CausalGraph& g, const NodeSet& a,
                                                      const Estimand& q_a) {
    require_known(g, a);
    if (!is_subset(a, q_a.scope())) throw PreconditionError("Q[a] estimand scope does not cover a");
    const CausalGraph ga = induced(g, a);
    const auto order = topological_order(ga);
    const auto marginals = prefix_marginals(order, a, q_a);
    std::vector<std::pair<NodeSet, Estimand>> out;
    for (auto& comp : c_components(ga, a)) {
        Estimand e = component_product(order, marginals, comp);
        out.emplace_back(std::move(comp), std::move(e));
    }
    return out;
}

IdentifyResult identify_q(const NodeSet& s, const NodeSet& a_in, const CausalGraph& g, const Estimand& q_in) {
    require_known(g, a_in);
    if (s.empty()) throw PreconditionError("identify_q needs a nonempty target");
    if (!is_subset(s, a_in)) throw PreconditionError("target " + to_string(s) + " is not inside " + to_string(a_in));
    if (!is_single_c_component(g, s)) throw PreconditionError(to_string(s) + " is not a single c-component");

    NodeSet a = a_in;
    Estimand q_a = q_in;
    while (true) {
        if (a == s) return {q_a, {}};
        const CausalGraph ga = induced(g, a);
        NodeSet t;
        for (auto& comp : c_components(ga, a)) {
            if (comp.count(*s.begin())) {
                t = std::move(comp);
                break;
            }
        }
        Estimand q_t = q_a;
        if (t != a) {
            const auto order = topological_order(ga);
            q_t = component_product(order, prefix_marginals(order, a, q_a), t);
        }
        const NodeSet anc = ancestors(induced(g, t), s);
        if (anc == s) {
            if (t == s) return {q_t, {}};
            return {Estimand::sum(set_difference(t, s), q_t).labeled(q_label(s)), {}};
        }
        if (anc == t) return {std::nullopt, t};
        q_a = Estimand::sum(set_difference(t, anc), q_t).labeled(q_label(anc));
        a = anc;
    }
}

}  // namespace cgid
