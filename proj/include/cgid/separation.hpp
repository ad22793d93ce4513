#pragma once

#include "cgid/graph.hpp"

namespace cgid {

/// (x ⟂ y | z) in g. Each bidirected edge is read as a fresh latent parent of
/// its two endpoints. x, y, z must be pairwise disjoint; x and y nonempty.
bool d_separated(const CausalGraph& g, const NodeSet& x, const NodeSet& y, const NodeSet& z);

// Applicability of the three do-calculus rules for P_x(y | z, w).
// Each checks (z ⟂ y | x ∪ w) in the rule's edge-deleted graph:
//   rule 1: over = x
//   rule 2: over = x, under = z
//   rule 3: over = x ∪ (z \ An(w) in G with over = x)
// All four sets must be pairwise disjoint. An empty y or z holds vacuously.

bool rule1_holds(const CausalGraph& g, const NodeSet& x, const NodeSet& y, const NodeSet& z,
                 const NodeSet& w);
bool rule2_holds(const CausalGraph& g, const NodeSet& x, const NodeSet& y, const NodeSet& z,
                 const NodeSet& w);
bool rule3_holds(const CausalGraph& g, const NodeSet& x, const NodeSet& y, const NodeSet& z,
                 const NodeSet& w);

}  // namespace cgid
