#include "doctest.h"

#include <random>

#include "checks.hpp"

using namespace cgid;

TEST_CASE("do-calculus rules are sound on random models") {
    std::mt19937_64 rng(71);
    int held[4] = {0, 0, 0, 0};
    for (std::uint64_t trial = 0; trial < 300; ++trial) {
        const auto t = checks::rule_trial(rng, trial + 1);
        if (!t.holds) continue;
        ++held[t.rule];
        REQUIRE(t.error < 1e-9);
    }
    CHECK(held[1] > 0);
    CHECK(held[2] > 0);
    CHECK(held[3] > 0);
}

TEST_CASE("hedges exist exactly when identification fails") {
    CHECK(checks::hedge_equivalence(support::crossed()).discrepancies == 0);
    CHECK(checks::hedge_equivalence(support::zigzag()).discrepancies == 0);
    CHECK(checks::hedge_equivalence(support::bow()).discrepancies == 0);
    std::mt19937_64 rng(73);
    std::size_t hedges = 0;
    for (int trial = 0; trial < 40; ++trial) {
        RandomGraphOptions opt;
        opt.nodes = 2 + trial % 5;
        opt.max_bidirected = 4;
        const auto r = checks::hedge_equivalence(random_graph(opt, rng));
        CHECK_MESSAGE(r.discrepancies == 0, r.first_discrepancy);
        hedges += r.hedges;
    }
    CHECK(hedges > 0);
}
