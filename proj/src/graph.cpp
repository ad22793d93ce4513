#include "cgid/graph.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <functional>
#include <queue>
#include <sstream>

#include "cgid/error.hpp"

namespace cgid {

namespace {

thread_local std::uint64_t g_steps = 0;

const NodeSet kEmpty;

}  // namespace

namespace stats {

std::uint64_t steps() { return g_steps; }
void reset_steps() { g_steps = 0; }
void add_steps(std::uint64_t n) { g_steps += n; }

}  // namespace stats

bool is_valid_node_id(std::string_view name) {
    if (name.empty() || !std::isalpha(static_cast<unsigned char>(name.front()))) return false;
    return std::all_of(name.begin(), name.end(), [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
    });
}

NodeSet set_union(const NodeSet& a, const NodeSet& b) {
    NodeSet out = a;
    out.insert(b.begin(), b.end());
    return out;
}

NodeSet set_intersection(const NodeSet& a, const NodeSet& b) {
    NodeSet out;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::inserter(out, out.end()));
    return out;
}

NodeSet set_difference(const NodeSet& a, const NodeSet& b) {
    NodeSet out;
    std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::inserter(out, out.end()));
    return out;
}

bool is_subset(const NodeSet& sub, const NodeSet& super) {
    return std::includes(super.begin(), super.end(), sub.begin(), sub.end());
}

bool intersects(const NodeSet& a, const NodeSet& b) {
    auto i = a.begin();
    auto j = b.begin();
    while (i != a.end() && j != b.end()) {
        if (*i == *j) return true;
        if (*i < *j) ++i; else ++j;
    }
    return false;
}

std::string to_string(const NodeSet& s) {
    std::string out = "{";
    bool first = true;
    for (const auto& v : s) {
        if (!first) out += ",";
        out += v;
        first = false;
    }
    return out + "}";
}

BidirectedEdge make_bidirected(const NodeId& a, const NodeId& b) {
    return a < b ? BidirectedEdge{a, b} : BidirectedEdge{b, a};
}

std::vector<NodeId> find_directed_cycle(const NodeSet& nodes, const std::vector<DirectedEdge>& edges) {
    std::map<NodeId, std::vector<NodeId>> out;
    for (const auto& [from, to] : edges) out[from].push_back(to);
    for (auto& [_, succ] : out) std::sort(succ.begin(), succ.end());

    // 0 = unvisited, 1 = on stack, 2 = done
    std::map<NodeId, int> color;
    std::vector<NodeId> stack;
    std::vector<NodeId> cycle;

    std::function<bool(const NodeId&)> dfs = [&](const NodeId& v) {
        color[v] = 1;
        stack.push_back(v);
        for (const auto& w : out[v]) {
            if (color[w] == 1) {
                auto it = std::find(stack.begin(), stack.end(), w);
                cycle.assign(it, stack.end());
                cycle.push_back(w);
                return true;
            }
            if (color[w] == 0 && dfs(w)) return true;
        }
        stack.pop_back();
        color[v] = 2;
        return false;
    };

    NodeSet all = nodes;
    for (const auto& [from, to] : edges) {
        all.insert(from);
        all.insert(to);
    }
    for (const auto& v : all) {
        if (color[v] == 0 && dfs(v)) return cycle;
    }
    return {};
}

CausalGraph::CausalGraph(NodeSet observed,
                         const std::vector<DirectedEdge>& directed,
                         const std::vector<BidirectedEdge>& bidirected)
    : observed_(std::move(observed)) {
    for (const auto& v : observed_) {
        if (!is_valid_node_id(v)) throw GraphError("invalid node name '" + v + "'");
    }
    for (const auto& [from, to] : directed) {
        if (!has_node(from) || !has_node(to))
            throw GraphError("edge " + from + " -> " + to + " references an unknown node");
        if (from == to) throw GraphError("self-loop on " + from);
        if (!directed_.emplace(from, to).second)
            throw GraphError("duplicate edge " + from + " -> " + to);
    }
    for (const auto& [a, b] : bidirected) {
        if (!has_node(a) || !has_node(b))
            throw GraphError("edge " + a + " <-> " + b + " references an unknown node");
        if (a == b) throw GraphError("bidirected self-loop on " + a);
        if (!bidirected_.insert(make_bidirected(a, b)).second)
            throw GraphError("duplicate edge " + a + " <-> " + b);
    }
    auto cycle = find_directed_cycle(observed_, directed);
    if (!cycle.empty()) {
        std::string text;
        for (std::size_t i = 0; i < cycle.size(); ++i) text += (i ? " -> " : "") + cycle[i];
        throw GraphError("directed cycle: " + text);
    }
    index_edges();
}

CausalGraph CausalGraph::unchecked(NodeSet observed, std::set<DirectedEdge> directed,
                                   std::set<BidirectedEdge> bidirected) {
    CausalGraph g;
    g.observed_ = std::move(observed);
    g.directed_ = std::move(directed);
    g.bidirected_ = std::move(bidirected);
    g.index_edges();
    return g;
}

void CausalGraph::index_edges() {
    for (const auto& v : observed_) {
        parents_[v];
        children_[v];
        spouses_[v];
    }
    for (const auto& [from, to] : directed_) {
        children_[from].insert(to);
        parents_[to].insert(from);
    }
    for (const auto& [a, b] : bidirected_) {
        spouses_[a].insert(b);
        spouses_[b].insert(a);
    }
}

bool CausalGraph::has_directed(const NodeId& from, const NodeId& to) const {
    return directed_.count({from, to}) != 0;
}

bool CausalGraph::has_bidirected(const NodeId& a, const NodeId& b) const {
    return bidirected_.count(make_bidirected(a, b)) != 0;
}

const NodeSet& CausalGraph::lookup(const std::map<NodeId, NodeSet>& adj, const NodeId& v) const {
    auto it = adj.find(v);
    if (it == adj.end()) throw GraphError("unknown node '" + v + "'");
    return it->second;
}

const NodeSet& CausalGraph::parents_of(const NodeId& v) const { return lookup(parents_, v); }
const NodeSet& CausalGraph::children_of(const NodeId& v) const { return lookup(children_, v); }
const NodeSet& CausalGraph::spouses_of(const NodeId& v) const { return lookup(spouses_, v); }

void require_known(const CausalGraph& g, const NodeSet& x) {
    for (const auto& v : x) {
        if (!g.has_node(v)) throw GraphError("unknown node '" + v + "'");
    }
}

CausalGraph latent_project(const RawLatentGraph& g) {
    for (const auto& u : g.latent) {
        if (g.observed.count(u)) throw GraphError("node '" + u + "' is both observed and latent");
    }
    NodeSet all = set_union(g.observed, g.latent);
    for (const auto& [from, to] : g.directed) {
        if (!all.count(from) || !all.count(to))
            throw GraphError("edge " + from + " -> " + to + " references an unknown node");
        if (g.latent.count(to)) throw GraphError("latent '" + to + "' has a parent");
    }
    auto cycle = find_directed_cycle(all, g.directed);
    if (!cycle.empty()) throw GraphError("directed cycle through '" + cycle.front() + "'");

    std::vector<DirectedEdge> directed;
    std::map<NodeId, std::vector<NodeId>> latent_children;
    for (const auto& [from, to] : g.directed) {
        if (g.latent.count(from)) {
            latent_children[from].push_back(to);
        } else {
            directed.emplace_back(from, to);
        }
    }
    std::set<BidirectedEdge> bidirected;
    for (auto& [_, kids] : latent_children) {
        std::sort(kids.begin(), kids.end());
        for (std::size_t i = 0; i < kids.size(); ++i) {
            for (std::size_t j = i + 1; j < kids.size(); ++j) {
                if (kids[i] != kids[j]) bidirected.insert(make_bidirected(kids[i], kids[j]));
            }
        }
    }
    return CausalGraph(g.observed, directed, {bidirected.begin(), bidirected.end()});
}

namespace {

NodeSet closure(const CausalGraph& g, const NodeSet& x, bool upward) {
    require_known(g, x);
    NodeSet seen = x;
    std::deque<NodeId> queue(x.begin(), x.end());
    std::uint64_t steps = 0;
    while (!queue.empty()) {
        NodeId v = std::move(queue.front());
        queue.pop_front();
        const NodeSet& next = upward ? g.parents_of(v) : g.children_of(v);
        steps += 1 + next.size();
        for (const auto& w : next) {
            if (seen.insert(w).second) queue.push_back(w);
        }
    }
    stats::add_steps(steps);
    return seen;
}

}  // namespace

NodeSet ancestors(const CausalGraph& g, const NodeSet& x) { return closure(g, x, true); }

NodeSet descendants(const CausalGraph& g, const NodeSet& x) { return closure(g, x, false); }

NodeSet parents(const CausalGraph& g, const NodeSet& x) {
    require_known(g, x);
    NodeSet out = x;
    for (const auto& v : x) {
        const auto& p = g.parents_of(v);
        out.insert(p.begin(), p.end());
    }
    return out;
}

NodeSet children(const CausalGraph& g, const NodeSet& x) {
    require_known(g, x);
    NodeSet out = x;
    for (const auto& v : x) {
        const auto& c = g.children_of(v);
        out.insert(c.begin(), c.end());
    }
    return out;
}

CausalGraph induced(const CausalGraph& g, const NodeSet& x) {
    require_known(g, x);
    std::set<DirectedEdge> directed;
    std::set<BidirectedEdge> bidirected;
    for (const auto& v : x) {
        for (const auto& w : g.children_of(v)) {
            if (x.count(w)) directed.emplace(v, w);
        }
        for (const auto& w : g.spouses_of(v)) {
            if (v < w && x.count(w)) bidirected.emplace(v, w);
        }
    }
    stats::add_steps(x.size() + directed.size() + bidirected.size());
    return CausalGraph::unchecked(x, std::move(directed), std::move(bidirected));
}

CausalGraph edge_subgraph(const CausalGraph& g, const NodeSet& over, const NodeSet& under) {
    require_known(g, over);
    require_known(g, under);
    std::set<DirectedEdge> directed;
    std::set<BidirectedEdge> bidirected;
    for (const auto& e : g.directed()) {
        if (over.count(e.second) || under.count(e.first)) continue;
        directed.insert(e);
    }
    for (const auto& e : g.bidirected()) {
        if (over.count(e.first) || over.count(e.second)) continue;
        bidirected.insert(e);
    }
    stats::add_steps(g.size() + g.directed().size() + g.bidirected().size());
    return CausalGraph::unchecked(g.observed(), std::move(directed), std::move(bidirected));
}

std::vector<NodeId> topological_order(const CausalGraph& g) {
    std::map<NodeId, std::size_t> indegree;
    for (const auto& v : g.observed()) indegree[v] = g.parents_of(v).size();
    std::priority_queue<NodeId, std::vector<NodeId>, std::greater<>> ready;
    for (const auto& [v, d] : indegree) {
        if (d == 0) ready.push(v);
    }
    std::vector<NodeId> order;
    order.reserve(g.size());
    while (!ready.empty()) {
        NodeId v = ready.top();
        ready.pop();
        for (const auto& w : g.children_of(v)) {
            if (--indegree[w] == 0) ready.push(w);
        }
        order.push_back(std::move(v));
    }
    stats::add_steps(g.size() + g.directed().size());
    return order;
}

}  // namespace cgid
