#include "cgid/separation.hpp"

#include <deque>
#include <map>
#include <vector>

#include "cgid/error.hpp"

namespace cgid {

namespace {

void require_disjoint(const NodeSet& a, const NodeSet& b, const char* what) {
    if (intersects(a, b)) throw PreconditionError(std::string("overlapping sets: ") + what);
}

// The graph with every bidirected edge replaced by a latent parent of both
// endpoints. Observed nodes come first, latents after.
struct Expanded {
    std::vector<std::vector<int>> parents;
    std::vector<std::vector<int>> children;
    std::map<NodeId, int> index;
};

Expanded expand(const CausalGraph& g) {
    Expanded e;
    int n = 0;
    for (const auto& v : g.observed()) e.index[v] = n++;
    const int total = n + static_cast<int>(g.bidirected().size());
    e.parents.resize(total);
    e.children.resize(total);
    for (const auto& [from, to] : g.directed()) {
        int a = e.index.at(from);
        int b = e.index.at(to);
        e.children[a].push_back(b);
        e.parents[b].push_back(a);
    }
    int latent = n;
    for (const auto& [a, b] : g.bidirected()) {
        for (int child : {e.index.at(a), e.index.at(b)}) {
            e.children[latent].push_back(child);
            e.parents[child].push_back(latent);
        }
        ++latent;
    }
    return e;
}

}  // namespace

bool d_separated(const CausalGraph& g, const NodeSet& x, const NodeSet& y, const NodeSet& z) {
    require_known(g, x);
    require_known(g, y);
    require_known(g, z);
    if (x.empty() || y.empty()) throw PreconditionError("d_separated needs nonempty x and y");
    require_disjoint(x, y, "x and y");
    require_disjoint(x, z, "x and z");
    require_disjoint(y, z, "y and z");

    const Expanded e = expand(g);
    const std::size_t total = e.parents.size();
    std::vector<char> in_z(total, 0);
    std::vector<char> in_y(total, 0);
    for (const auto& v : z) in_z[e.index.at(v)] = 1;
    for (const auto& v : y) in_y[e.index.at(v)] = 1;

    // Ancestors of z, which decide whether a collider is open.
    std::vector<char> anc_z(total, 0);
    std::deque<int> queue;
    for (const auto& v : z) {
        int i = e.index.at(v);
        anc_z[i] = 1;
        queue.push_back(i);
    }
    std::uint64_t steps = 0;
    while (!queue.empty()) {
        int v = queue.front();
        queue.pop_front();
        for (int p : e.parents[v]) {
            ++steps;
            if (!anc_z[p]) {
                anc_z[p] = 1;
                queue.push_back(p);
            }
        }
    }

    // Reachability over (node, direction). up = entered from a child,
    // down = entered from a parent.
    enum Dir { kUp = 0, kDown = 1 };
    std::vector<char> visited(total * 2, 0);
    std::deque<std::pair<int, Dir>> frontier;
    for (const auto& v : x) frontier.emplace_back(e.index.at(v), kUp);

    bool separated = true;
    while (!frontier.empty()) {
        auto [v, dir] = frontier.front();
        frontier.pop_front();
        if (visited[v * 2 + dir]) continue;
        visited[v * 2 + dir] = 1;
        ++steps;
        if (!in_z[v] && in_y[v]) {
            separated = false;
            break;
        }
        if (dir == kUp) {
            if (in_z[v]) continue;
            for (int p : e.parents[v]) frontier.emplace_back(p, kUp);
            for (int c : e.children[v]) frontier.emplace_back(c, kDown);
        } else {
            if (!in_z[v]) {
                for (int c : e.children[v]) frontier.emplace_back(c, kDown);
            }
            if (anc_z[v]) {
                for (int p : e.parents[v]) frontier.emplace_back(p, kUp);
            }
        }
    }
    stats::add_steps(steps);
    return separated;
}

namespace {

void require_rule_sets(const NodeSet& x, const NodeSet& y, const NodeSet& z, const NodeSet& w) {
    require_disjoint(x, y, "x and y");
    require_disjoint(x, z, "x and z");
    require_disjoint(x, w, "x and w");
    require_disjoint(y, z, "y and z");
    require_disjoint(y, w, "y and w");
    require_disjoint(z, w, "z and w");
}

}  // namespace

bool rule1_holds(const CausalGraph& g, const NodeSet& x, const NodeSet& y, const NodeSet& z,
                 const NodeSet& w) {
    require_rule_sets(x, y, z, w);
    if (z.empty() || y.empty()) return true;
    return d_separated(edge_subgraph(g, x, {}), z, y, set_union(x, w));
}

bool rule2_holds(const CausalGraph& g, const NodeSet& x, const NodeSet& y, const NodeSet& z,
                 const NodeSet& w) {
    require_rule_sets(x, y, z, w);
    if (z.empty() || y.empty()) return true;
    return d_separated(edge_subgraph(g, x, z), z, y, set_union(x, w));
}

bool rule3_holds(const CausalGraph& g, const NodeSet& x, const NodeSet& y, const NodeSet& z,
                 const NodeSet& w) {
    require_rule_sets(x, y, z, w);
    if (z.empty() || y.empty()) return true;
    const NodeSet z_w = set_difference(z, ancestors(edge_subgraph(g, x, {}), w));
    return d_separated(edge_subgraph(g, set_union(x, z_w), {}), z, y, set_union(x, w));
}

}  // namespace cgid
