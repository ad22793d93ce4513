#include "cgid/components.hpp"

#include <algorithm>
#include <deque>
#include <map>

#include "cgid/error.hpp"

namespace cgid {

namespace {

// Components of the bidirected graph restricted to `x`, using only the
// given edge list.
std::vector<NodeSet> components_over(const NodeSet& x,
                                     const std::map<NodeId, NodeSet>& adjacency) {
    std::vector<NodeSet> out;
    NodeSet seen;
    for (const auto& start : x) {
        if (seen.count(start)) continue;
        NodeSet comp{start};
        seen.insert(start);
        std::deque<NodeId> queue{start};
        while (!queue.empty()) {
            NodeId v = queue.front();
            queue.pop_front();
            auto it = adjacency.find(v);
            if (it == adjacency.end()) continue;
            for (const auto& w : it->second) {
                if (x.count(w) && seen.insert(w).second) {
                    comp.insert(w);
                    queue.push_back(w);
                }
            }
        }
        out.push_back(std::move(comp));
    }
    return out;
}

}  // namespace

std::vector<NodeSet> c_components(const CausalGraph& g, const NodeSet& x) {
    require_known(g, x);
    std::vector<NodeSet> out;
    NodeSet seen;
    std::uint64_t steps = 0;
    // Iterating x in order makes each component's first member its least one,
    // so the output is already ordered by least member.
    for (const auto& start : x) {
        if (seen.count(start)) continue;
        NodeSet comp{start};
        seen.insert(start);
        std::deque<NodeId> queue{start};
        while (!queue.empty()) {
            NodeId v = queue.front();
            queue.pop_front();
            for (const auto& w : g.spouses_of(v)) {
                ++steps;
                if (x.count(w) && seen.insert(w).second) {
                    comp.insert(w);
                    queue.push_back(w);
                }
            }
        }
        out.push_back(std::move(comp));
    }
    stats::add_steps(steps + x.size());
    return out;
}

bool is_single_c_component(const CausalGraph& g, const NodeSet& x) {
    return c_components(g, x).size() <= 1;
}

NodeSet root_set(const CausalGraph& g, const NodeSet& nodes) {
    require_known(g, nodes);
    NodeSet out;
    for (const auto& v : nodes) {
        const auto& kids = g.children_of(v);
        if (!intersects(kids, nodes)) out.insert(v);
    }
    return out;
}

std::optional<CForest> as_c_forest(const CausalGraph& g, const NodeSet& nodes) {
    if (nodes.empty() || !is_single_c_component(g, nodes)) return std::nullopt;
    for (const auto& v : nodes) {
        if (set_intersection(g.children_of(v), nodes).size() > 1) return std::nullopt;
    }
    return CForest{nodes, root_set(g, nodes)};
}

namespace {

// Spanning tree of the bidirected edges of G[inner] that first spans `roots`
// using edges inside G[roots]. Requires both to be bidirected-connected.
std::vector<BidirectedEdge> rooted_spanning_tree(const CausalGraph& g, const NodeSet& roots,
                                                 const NodeSet& inner) {
    std::vector<BidirectedEdge> tree;
    NodeSet reached{*roots.begin()};
    std::deque<NodeId> queue{*roots.begin()};
    auto grow = [&](const NodeSet& allowed) {
        while (!queue.empty()) {
            NodeId v = queue.front();
            queue.pop_front();
            for (const auto& w : g.spouses_of(v)) {
                if (allowed.count(w) && reached.insert(w).second) {
                    tree.push_back(make_bidirected(v, w));
                    queue.push_back(w);
                }
            }
        }
    };
    grow(roots);
    queue.assign(reached.begin(), reached.end());
    grow(inner);
    return tree;
}

bool every_non_root_has_child(const CausalGraph& g, const NodeSet& inner, const NodeSet& roots) {
    for (const auto& v : inner) {
        if (roots.count(v)) continue;
        if (!intersects(g.children_of(v), inner)) return false;
    }
    return true;
}

}  // namespace

std::optional<HedgeWitness> find_hedge(const CausalGraph& g, const NodeSet& a, const NodeSet& l,
                                       const HedgeSearchOptions& options) {
    require_known(g, a);
    if (l.empty()) throw PreconditionError("hedge roots must be nonempty");
    if (!is_subset(l, a)) throw PreconditionError("hedge roots must lie inside a");
    if (!is_single_c_component(g, l))
        throw PreconditionError("hedge roots " + to_string(l) + " are not a single c-component");

    const CausalGraph ga = induced(g, a);
    const NodeSet pool_set = set_difference(ancestors(ga, l), l);
    if (pool_set.size() > options.max_pool) {
        throw BudgetError("hedge search pool of " + std::to_string(pool_set.size()) +
                          " nodes exceeds limit " + std::to_string(options.max_pool));
    }
    const std::vector<NodeId> pool(pool_set.begin(), pool_set.end());
    const std::size_t n = pool.size();
    std::size_t examined = 0;

    for (std::size_t k = 1; k <= n; ++k) {
        // Lexicographic combinations of size k.
        std::vector<char> pick(n, 0);
        std::fill(pick.begin(), pick.begin() + static_cast<std::ptrdiff_t>(k), 1);
        do {
            if (options.cancel && options.cancel->load()) throw BudgetError("hedge search cancelled");
            if (options.max_candidates && ++examined > options.max_candidates)
                throw BudgetError("hedge search candidate budget exhausted");
            NodeSet inner = l;
            for (std::size_t i = 0; i < n; ++i) {
                if (pick[i]) inner.insert(pool[i]);
            }
            if (!every_non_root_has_child(g, inner, l)) continue;
            if (!is_single_c_component(g, inner)) continue;

            HedgeWitness w;
            w.roots = l;
            w.inner = inner;
            w.spanning_tree = rooted_spanning_tree(g, l, inner);
            for (const auto& v : inner) {
                if (l.count(v)) continue;
                NodeSet kids = set_intersection(g.children_of(v), inner);
                w.forest_edges.emplace_back(v, *kids.begin());
            }
            return w;
        } while (std::prev_permutation(pick.begin(), pick.end()));
    }
    return std::nullopt;
}

std::string check_hedge(const CausalGraph& g, const NodeSet& a, const HedgeWitness& w) {
    if (!is_subset(w.roots, w.inner) || w.roots == w.inner) return "roots must be a proper subset of inner";
    if (!is_subset(w.inner, a)) return "inner set leaves a";
    if (w.spanning_tree.size() + 1 != w.inner.size()) return "spanning tree has wrong edge count";

    std::map<NodeId, NodeSet> tree_adj;
    for (const auto& [u, v] : w.spanning_tree) {
        if (!w.inner.count(u) || !w.inner.count(v)) return "tree edge leaves inner set";
        if (!g.has_bidirected(u, v)) return "tree edge " + u + " <-> " + v + " not in graph";
        tree_adj[u].insert(v);
        tree_adj[v].insert(u);
    }
    if (components_over(w.inner, tree_adj).size() != 1) return "tree does not span inner set";
    if (components_over(w.roots, tree_adj).size() != 1) return "tree restricted to roots is disconnected";

    std::map<NodeId, int> out_degree;
    for (const auto& [from, to] : w.forest_edges) {
        if (!w.inner.count(from) || !w.inner.count(to)) return "forest edge leaves inner set";
        if (!g.has_directed(from, to)) return "forest edge " + from + " -> " + to + " not in graph";
        if (++out_degree[from] > 1) return "node " + from + " has two forest children";
    }
    NodeSet forest_roots;
    for (const auto& v : w.inner) {
        if (!out_degree.count(v)) forest_roots.insert(v);
    }
    if (forest_roots != w.roots) return "forest root set differs from roots";
    return {};
}

}  // namespace cgid
