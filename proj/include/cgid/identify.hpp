#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "cgid/estimand.hpp"
#include "cgid/graph.hpp"

namespace cgid {

/// Q[A_j] for every c-component A_j of G[a], each expressed from `q_a`
/// (an estimand for Q[a]) as the telescoping product over a's topological
/// order. Components appear in c_components order.
std::vector<std::pair<NodeSet, Estimand>> q_decompose(const CausalGraph& g, const NodeSet& a,
                                                      const Estimand& q_a);

struct IdentifyResult {
    /// Q[s] in terms of the input, when identifiable.
    std::optional<Estimand> estimand;
    /// On failure: the single c-component T ⊋ s with An(s) = T in G[T].
    NodeSet failing_set;

    bool identifiable() const { return estimand.has_value(); }
};

/// Identifies Q[s] from Q[a] within G[a]. s must be a nonempty single
/// c-component with s ⊆ a ⊆ observed.
IdentifyResult identify_q(const NodeSet& s, const NodeSet& a, const CausalGraph& g, const Estimand& q_a);

/// "Q[A,B,C]"
std::string q_label(const NodeSet& s);

}  // namespace cgid
