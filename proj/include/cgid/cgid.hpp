#pragma once

#include "cgid/gid.hpp"

namespace cgid {

/// Target P_x(y | z).
struct ConditionalQuery {
    NodeSet x;
    NodeSet y;
    NodeSet z;

    /// Pairwise disjoint, y nonempty, all inside the graph.
    void validate(const CausalGraph& g) const;
};

/// The largest W ⊆ z with P_x(y | z) = P_{x,w}(y | z \ w): every Z' ∈ z for
/// which rule 2 moves {Z'} alone, i.e. (y ⟂ Z' | x ∪ z \ {Z'}) once edges
/// into x and out of Z' are deleted.
NodeSet max_bi(const ConditionalQuery& q, const CausalGraph& g);

/// Conditional identification. Moves max_bi(q) into the intervention and
/// decides P_{x∪w}(y, z \ w) by gid_decide; an identified joint e becomes
/// e / Σ_y e. With z empty the result is exactly gid_decide's.
Verdict cgid_decide(const ConditionalQuery& q, const QSpec& spec, const CausalGraph& g,
                    const GidOptions& options = {});

}  // namespace cgid
