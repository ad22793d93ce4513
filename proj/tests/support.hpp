#pragma once

// Fixtures and brute-force oracles shared by the test binaries. Nothing here
// calls the separation or identification code under test.

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "cgid/graph.hpp"
#include "cgid/sem.hpp"

namespace support {

using cgid::CausalGraph;
using cgid::NodeSet;

inline CausalGraph crossed() {
    return CausalGraph({"X1", "X2", "Y1", "Y2"}, {{"X1", "Y1"}, {"X2", "Y2"}}, {{"X1", "X2"}, {"X1", "Y1"}});
}

inline CausalGraph zigzag() {
    return CausalGraph({"X1", "Z1", "Z2", "W1", "Y1"},
                       {{"X1", "Z1"}, {"Z2", "Z1"}, {"W1", "Z2"}, {"Y1", "W1"}},
                       {{"X1", "Z1"}, {"W1", "Y1"}});
}

inline CausalGraph bow() { return CausalGraph({"X", "Y"}, {{"X", "Y"}}, {{"X", "Y"}}); }

inline CausalGraph backdoor() {
    return CausalGraph({"X", "Y", "Z"}, {{"Z", "X"}, {"X", "Y"}, {"Z", "Y"}}, {});
}

inline CausalGraph chain() { return CausalGraph({"X", "Y", "Z"}, {{"X", "Z"}, {"Z", "Y"}}, {}); }

inline CausalGraph frontdoor() {
    return CausalGraph({"M", "X", "Y"}, {{"X", "M"}, {"M", "Y"}}, {{"X", "Y"}});
}

// ---------------------------------------------------------------------------
// d-separation by enumerating every simple path of the graph in which each
// bidirected edge is replaced by its own latent parent.

struct Expanded {
    std::vector<std::string> names;
    std::vector<std::vector<int>> kids;
    std::vector<std::vector<int>> pas;
};

inline Expanded expand(const CausalGraph& g) {
    Expanded e;
    std::map<std::string, int> id;
    for (const auto& v : g.observed()) {
        id[v] = static_cast<int>(e.names.size());
        e.names.push_back(v);
    }
    auto add = [&](int a, int b) {
        e.kids.resize(e.names.size());
        e.pas.resize(e.names.size());
        e.kids[a].push_back(b);
        e.pas[b].push_back(a);
    };
    e.kids.resize(e.names.size());
    e.pas.resize(e.names.size());
    for (const auto& [a, b] : g.directed()) add(id[a], id[b]);
    for (const auto& [a, b] : g.bidirected()) {
        const int u = static_cast<int>(e.names.size());
        e.names.push_back("#" + a + "_" + b);
        add(u, id[a]);
        add(u, id[b]);
    }
    return e;
}

inline bool paths_separated(const CausalGraph& g, const NodeSet& x, const NodeSet& y, const NodeSet& z) {
    const Expanded e = expand(g);
    const int n = static_cast<int>(e.names.size());
    std::vector<char> in_z(n, 0), in_y(n, 0);
    for (int i = 0; i < n; ++i) {
        in_z[i] = z.count(e.names[i]) != 0;
        in_y[i] = y.count(e.names[i]) != 0;
    }
    // Nodes with a descendant (reflexive) in z.
    std::vector<char> anc_z(n, 0);
    std::function<bool(int, std::vector<char>&)> reaches_z = [&](int v, std::vector<char>& seen) {
        if (in_z[v]) return true;
        seen[v] = 1;
        for (int c : e.kids[v]) {
            if (!seen[c] && reaches_z(c, seen)) return true;
        }
        return false;
    };
    for (int v = 0; v < n; ++v) {
        std::vector<char> seen(n, 0);
        anc_z[v] = reaches_z(v, seen);
    }
    auto is_edge = [&](int a, int b) {
        return std::find(e.kids[a].begin(), e.kids[a].end(), b) != e.kids[a].end();
    };
    std::vector<int> path;
    std::vector<char> on_path(n, 0);
    bool open_found = false;
    std::function<void(int)> walk = [&](int v) {
        if (open_found) return;
        if (path.size() > 1 && in_y[v]) {
            bool blocked = false;
            for (std::size_t k = 1; k + 1 < path.size(); ++k) {
                const int prev = path[k - 1], mid = path[k], next = path[k + 1];
                const bool collider = is_edge(prev, mid) && is_edge(next, mid);
                if (collider ? !anc_z[mid] : in_z[mid]) {
                    blocked = true;
                    break;
                }
            }
            if (!blocked) open_found = true;
            return;
        }
        std::vector<int> nbrs = e.kids[v];
        nbrs.insert(nbrs.end(), e.pas[v].begin(), e.pas[v].end());
        for (int w : nbrs) {
            if (on_path[w]) continue;
            on_path[w] = 1;
            path.push_back(w);
            walk(w);
            path.pop_back();
            on_path[w] = 0;
        }
    };
    for (int s = 0; s < n && !open_found; ++s) {
        if (!x.count(e.names[s])) continue;
        path = {s};
        on_path.assign(n, 0);
        on_path[s] = 1;
        walk(s);
    }
    return !open_found;
}

// ---------------------------------------------------------------------------
// Semantics by direct enumeration of (u, v) from the model's tables.

inline double cpt_entry(const cgid::DiscreteSEM& m, std::size_t i, const std::map<std::string, int>& v,
                        const std::vector<int>& u) {
    const auto& cpt = m.cpts[i];
    std::size_t row = 0;
    for (const auto& p : cpt.parents) {
        const std::size_t card = static_cast<std::size_t>(m.observed.cards()[m.observed.position(p)]);
        row = row * card + static_cast<std::size_t>(v.at(p));
    }
    for (std::size_t l : cpt.latents) row = row * static_cast<std::size_t>(m.latents[l].card) + static_cast<std::size_t>(u[l]);
    return cpt.rows[row][static_cast<std::size_t>(v.at(cpt.node))];
}

inline void for_each_assignment(const std::vector<std::string>& vars, const std::vector<int>& cards,
                                const std::function<void(const std::map<std::string, int>&)>& f) {
    std::map<std::string, int> a;
    for (const auto& v : vars) a[v] = 0;
    while (true) {
        f(a);
        std::size_t k = vars.size();
        while (true) {
            if (k == 0) return;
            --k;
            if (++a[vars[k]] < cards[k]) break;
            a[vars[k]] = 0;
        }
    }
}

/// P(v) of the model after setting `x` (truncated product with the x
/// factors dropped; v must agree with x), for every v, by enumeration.
inline std::map<std::map<std::string, int>, double> brute_joint(const cgid::DiscreteSEM& m,
                                                                const std::map<std::string, int>& x) {
    std::map<std::map<std::string, int>, double> out;
    std::vector<std::string> lat_names;
    std::vector<int> lat_cards;
    for (const auto& l : m.latents) {
        lat_names.push_back(l.name);
        lat_cards.push_back(l.card);
    }
    for_each_assignment(m.observed.vars(), m.observed.cards(), [&](const std::map<std::string, int>& v) {
        for (const auto& [k, val] : x) {
            if (v.at(k) != val) return;
        }
        double total = 0.0;
        for_each_assignment(lat_names, lat_cards, [&](const std::map<std::string, int>& ua) {
            std::vector<int> u;
            double w = 1.0;
            for (std::size_t l = 0; l < m.latents.size(); ++l) {
                u.push_back(ua.at(lat_names[l]));
                w *= m.latents[l].marginal[static_cast<std::size_t>(u.back())];
            }
            for (std::size_t i = 0; i < m.cpts.size(); ++i) {
                if (!x.count(m.cpts[i].node)) w *= cpt_entry(m, i, v, u);
            }
            total += w;
        });
        out[v] = total;
    });
    return out;
}

/// P_x(y | z) at the given y and z values, from brute_joint.
inline double brute_interventional(const cgid::DiscreteSEM& m, const std::map<std::string, int>& x,
                                   const std::map<std::string, int>& y, const std::map<std::string, int>& z) {
    const auto p = brute_joint(m, x);
    double num = 0.0, den = 0.0;
    for (const auto& [v, pv] : p) {
        bool z_ok = true;
        for (const auto& [k, val] : z) z_ok = z_ok && v.at(k) == val;
        if (!z_ok) continue;
        den += pv;
        bool y_ok = true;
        for (const auto& [k, val] : y) y_ok = y_ok && v.at(k) == val;
        if (y_ok) num += pv;
    }
    return num / den;
}

/// Every assignment of `vars` for the model's domains.
inline std::vector<cgid::Assignment> assignments(const cgid::DiscreteSEM& m, const NodeSet& vars) {
    std::vector<std::string> names(vars.begin(), vars.end());
    std::vector<int> cards;
    for (const auto& v : names) cards.push_back(m.observed.cards()[m.observed.position(v)]);
    std::vector<cgid::Assignment> out;
    for_each_assignment(names, cards, [&](const std::map<std::string, int>& a) { out.push_back(a); });
    return out;
}

inline cgid::Assignment restrict(const cgid::Assignment& a, const NodeSet& vars) {
    cgid::Assignment out;
    for (const auto& v : vars) out[v] = a.at(v);
    return out;
}

/// Full realization extending `a` with zeros.
inline cgid::Assignment complete(const CausalGraph& g, const cgid::Assignment& a) {
    cgid::Assignment out;
    for (const auto& v : g.observed()) out[v] = a.count(v) ? a.at(v) : 0;
    return out;
}

/// Pairwise disjoint random (x, y, z) with y nonempty.
struct RandomQuery {
    NodeSet x, y, z;
};

inline RandomQuery random_query(const CausalGraph& g, std::mt19937_64& rng, double px = 0.3, double pz = 0.25) {
    RandomQuery q;
    std::vector<std::string> nodes(g.observed().begin(), g.observed().end());
    std::shuffle(nodes.begin(), nodes.end(), rng);
    q.y.insert(nodes[0]);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    for (std::size_t i = 1; i < nodes.size(); ++i) {
        const double c = coin(rng);
        if (c < px) {
            q.x.insert(nodes[i]);
        } else if (c < px + pz) {
            q.z.insert(nodes[i]);
        } else if (c < px + pz + 0.15) {
            q.y.insert(nodes[i]);
        }
    }
    return q;
}

}  // namespace support
