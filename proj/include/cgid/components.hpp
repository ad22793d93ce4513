#pragma once

#include <atomic>
#include <cstddef>
#include <optional>
#include <vector>

#include "cgid/graph.hpp"

namespace cgid {

/// Connected components of the bidirected edges of G[x], ordered by least
/// member name.
std::vector<NodeSet> c_components(const CausalGraph& g, const NodeSet& x);

/// The empty set counts as a single c-component.
bool is_single_c_component(const CausalGraph& g, const NodeSet& x);

/// Members of `nodes` with no directed child inside G[nodes].
NodeSet root_set(const CausalGraph& g, const NodeSet& nodes);

/// G[nodes] viewed as a c-forest: a single c-component in which every node
/// has at most one child.
struct CForest {
    NodeSet nodes;
    NodeSet root;
};

/// The induced c-forest over `nodes`, or nullopt when G[nodes] is not one.
std::optional<CForest> as_c_forest(const CausalGraph& g, const NodeSet& nodes);

inline bool is_c_forest(const CausalGraph& g, const NodeSet& nodes) {
    return as_c_forest(g, nodes).has_value();
}

/// Certificate that Q[roots] is not identifiable from G[a]: an edge subgraph
/// over `inner` whose bidirected edges are `spanning_tree` and whose directed
/// edges `forest_edges` give every non-root exactly one child and the roots
/// none.
struct HedgeWitness {
    NodeSet roots;
    NodeSet inner;
    std::vector<BidirectedEdge> spanning_tree;
    std::vector<DirectedEdge> forest_edges;
};

struct HedgeSearchOptions {
    /// Largest candidate pool (ancestors of the roots in G[a], roots
    /// excluded) the exhaustive search accepts.
    std::size_t max_pool = 12;
    /// Maximum number of candidate sets examined; 0 = unlimited.
    std::size_t max_candidates = 0;
    /// Polled between candidates; set to true to abandon the search.
    const std::atomic<bool>* cancel = nullptr;
};

/// Smallest-first search for a hedge for `l` inside `a`. Requires
/// l ⊆ a ⊆ observed with l a nonempty single c-component. Throws
/// BudgetError if the pool or candidate limit is exceeded or the search is
/// cancelled.
std::optional<HedgeWitness> find_hedge(const CausalGraph& g, const NodeSet& a, const NodeSet& l,
                                       const HedgeSearchOptions& options = {});

/// Re-checks every structural condition of a witness against g and a.
/// Returns an empty string when valid, otherwise the first violated
/// condition.
std::string check_hedge(const CausalGraph& g, const NodeSet& a, const HedgeWitness& w);

}  // namespace cgid
