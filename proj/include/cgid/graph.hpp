#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace cgid {

using NodeId = std::string;

/// Sorted set of node names. Iteration order is lexicographic, which makes
/// every derived output deterministic.
using NodeSet = std::set<NodeId>;

using DirectedEdge = std::pair<NodeId, NodeId>;

/// Unordered pair, stored with first < second.
using BidirectedEdge = std::pair<NodeId, NodeId>;

/// Letters, digits and underscore, starting with a letter.
bool is_valid_node_id(std::string_view name);

NodeSet set_union(const NodeSet& a, const NodeSet& b);
NodeSet set_intersection(const NodeSet& a, const NodeSet& b);
NodeSet set_difference(const NodeSet& a, const NodeSet& b);
bool is_subset(const NodeSet& sub, const NodeSet& super);
bool intersects(const NodeSet& a, const NodeSet& b);

/// "{A,B,C}"
std::string to_string(const NodeSet& s);

BidirectedEdge make_bidirected(const NodeId& a, const NodeId& b);

/// Acyclic directed mixed graph over observed nodes. Bidirected edges stand
/// for parentless latent common causes. Immutable once constructed.
class CausalGraph {
public:
    CausalGraph() = default;

    /// Throws GraphError on unknown endpoints, self-loops, duplicate edges,
    /// invalid names or a directed cycle.
    CausalGraph(NodeSet observed,
                const std::vector<DirectedEdge>& directed,
                const std::vector<BidirectedEdge>& bidirected);

    const NodeSet& observed() const { return observed_; }
    const std::set<DirectedEdge>& directed() const { return directed_; }
    const std::set<BidirectedEdge>& bidirected() const { return bidirected_; }

    bool has_node(const NodeId& v) const { return observed_.count(v) != 0; }
    bool has_directed(const NodeId& from, const NodeId& to) const;
    bool has_bidirected(const NodeId& a, const NodeId& b) const;

    /// Direct parents / children / bidirected neighbours of one node
    /// (not reflexive).
    const NodeSet& parents_of(const NodeId& v) const;
    const NodeSet& children_of(const NodeId& v) const;
    const NodeSet& spouses_of(const NodeId& v) const;

    std::size_t size() const { return observed_.size(); }

    friend bool operator==(const CausalGraph& a, const CausalGraph& b) {
        return a.observed_ == b.observed_ && a.directed_ == b.directed_ &&
               a.bidirected_ == b.bidirected_;
    }

private:
    friend CausalGraph induced(const CausalGraph&, const NodeSet&);
    friend CausalGraph edge_subgraph(const CausalGraph&, const NodeSet&, const NodeSet&);

    // Skips validation; callers guarantee the result is a subgraph of a
    // valid graph.
    static CausalGraph unchecked(NodeSet observed, std::set<DirectedEdge> directed,
                                 std::set<BidirectedEdge> bidirected);
    void index_edges();
    const NodeSet& lookup(const std::map<NodeId, NodeSet>& adj, const NodeId& v) const;

    NodeSet observed_;
    std::set<DirectedEdge> directed_;
    std::set<BidirectedEdge> bidirected_;
    std::map<NodeId, NodeSet> parents_;
    std::map<NodeId, NodeSet> children_;
    std::map<NodeId, NodeSet> spouses_;
};

/// A DAG with explicit latent nodes. Latents must be parentless; they may
/// have any number of children.
struct RawLatentGraph {
    NodeSet observed;
    NodeSet latent;
    std::vector<DirectedEdge> directed;
};

/// Replaces each latent by a bidirected clique over its children.
/// Throws GraphError for cyclic input or a latent with a parent.
CausalGraph latent_project(const RawLatentGraph& g);

/// Reflexive closures along directed edges. Throw GraphError on unknown nodes.
NodeSet ancestors(const CausalGraph& g, const NodeSet& x);
NodeSet descendants(const CausalGraph& g, const NodeSet& x);
NodeSet parents(const CausalGraph& g, const NodeSet& x);
NodeSet children(const CausalGraph& g, const NodeSet& x);

/// G[x]: nodes x with every edge whose endpoints both lie in x.
CausalGraph induced(const CausalGraph& g, const NodeSet& x);

/// Deletes directed edges into `over`, bidirected edges touching `over`, and
/// directed edges out of `under`. Bidirected edges at `under` are kept.
CausalGraph edge_subgraph(const CausalGraph& g, const NodeSet& over, const NodeSet& under);

/// Kahn's algorithm, ties broken by smallest name.
std::vector<NodeId> topological_order(const CausalGraph& g);

void require_known(const CausalGraph& g, const NodeSet& x);

/// One directed cycle as a closed walk (first node repeated at the end), or
/// empty when the edge relation is acyclic.
std::vector<NodeId> find_directed_cycle(const NodeSet& nodes, const std::vector<DirectedEdge>& edges);

namespace stats {

/// Thread-local counter of primitive graph steps (node/edge visits) spent in
/// traversals. Used to bound the work of a query.
std::uint64_t steps();
void reset_steps();
void add_steps(std::uint64_t n);

}  // namespace stats

}  // namespace cgid
