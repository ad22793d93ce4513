#pragma once

#include <cstdint>
#include <random>

#include "cgid/graph.hpp"

namespace cgid {

struct RandomGraphOptions {
    int nodes = 5;
    double directed_probability = 0.4;
    /// Number of bidirected edges is drawn uniformly from [0, max_bidirected].
    int max_bidirected = 3;
};

/// Random ADMG over nodes N0..N{n-1}. The causal order is a random
/// permutation, so name order says nothing about edge direction.
CausalGraph random_graph(const RandomGraphOptions& options, std::mt19937_64& rng);

/// Uniform random subset; each member kept with probability p.
NodeSet random_subset(const NodeSet& pool, double p, std::mt19937_64& rng);

}  // namespace cgid
