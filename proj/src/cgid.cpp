#include "cgid/cgid.hpp"

#include "cgid/error.hpp"
#include "cgid/separation.hpp"

namespace cgid {

void ConditionalQuery::validate(const CausalGraph& g) const {
    require_known(g, x);
    require_known(g, y);
    require_known(g, z);
    if (y.empty()) throw PreconditionError("target set y is empty");
    if (intersects(x, y) || intersects(x, z) || intersects(y, z))
        throw PreconditionError("x, y and z must be pairwise disjoint");
}

NodeSet max_bi(const ConditionalQuery& q, const CausalGraph& g) {
    q.validate(g);
    NodeSet w;
    for (const auto& candidate : q.z) {
        const NodeSet moved{candidate};
        NodeSet given = set_union(q.x, q.z);
        given.erase(candidate);
        // Rule 2 for the single variable being moved: delete edges out of it,
        // not out of the rest of z.
        if (d_separated(edge_subgraph(g, q.x, moved), q.y, moved, given)) w.insert(candidate);
    }
    return w;
}

Verdict cgid_decide(const ConditionalQuery& q, const QSpec& spec, const CausalGraph& g,
                    const GidOptions& options) {
    q.validate(g);
    if (q.z.empty()) return gid_decide(q.x, q.y, spec, g, options);

    const NodeSet w = max_bi(q, g);
    const NodeSet remaining = set_difference(q.z, w);
    Verdict v = gid_decide(set_union(q.x, w), set_union(q.y, remaining), spec, g, options);
    v.moved_to_intervention = w;
    if (v.identifiable()) {
        auto& id = std::get<Identifiable>(v.outcome);
        Estimand joint = id.estimand;
        id.estimand = Estimand::ratio(joint, Estimand::sum(q.y, joint));
    }
    return v;
}

}  // namespace cgid
