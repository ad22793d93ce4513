#include "cgid/random_graph.hpp"

#include <algorithm>
#include <numeric>
#include <string>
#include <vector>

namespace cgid {

CausalGraph random_graph(const RandomGraphOptions& options, std::mt19937_64& rng) {
    const int n = options.nodes;
    std::vector<NodeId> names;
    for (int i = 0; i < n; ++i) names.push_back("N" + std::to_string(i));
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);

    std::bernoulli_distribution coin(options.directed_probability);
    std::vector<DirectedEdge> directed;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            if (coin(rng)) directed.emplace_back(names[order[i]], names[order[j]]);
        }
    }

    std::vector<BidirectedEdge> pairs;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) pairs.emplace_back(names[i], names[j]);
    }
    std::shuffle(pairs.begin(), pairs.end(), rng);
    int max_bi = std::min<int>(options.max_bidirected, static_cast<int>(pairs.size()));
    std::uniform_int_distribution<int> count(0, std::max(0, max_bi));
    pairs.resize(max_bi > 0 ? count(rng) : 0);

    return CausalGraph(NodeSet(names.begin(), names.end()), directed, pairs);
}

NodeSet random_subset(const NodeSet& pool, double p, std::mt19937_64& rng) {
    std::bernoulli_distribution coin(p);
    NodeSet out;
    for (const auto& v : pool) {
        if (coin(rng)) out.insert(v);
    }
    return out;
}

}  // namespace cgid
