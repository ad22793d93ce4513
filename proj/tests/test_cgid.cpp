#include "doctest.h"

#include <random>

#include "cgid/cgid.hpp"
#include "cgid/error.hpp"
#include "cgid/random_graph.hpp"
#include "cgid/sem.hpp"
#include "cgid/separation.hpp"
#include "support.hpp"

using namespace cgid;

namespace {

QSpec spec_v(const CausalGraph& g) { return QSpec::from_sets({g.observed()}); }

// Joint rule-2 statement for moving all of w at once.
bool jointly_movable(const CausalGraph& g, const ConditionalQuery& q, const NodeSet& w) {
    if (w.empty()) return true;
    return d_separated(edge_subgraph(g, q.x, w), q.y, w, set_union(q.x, set_difference(q.z, w)));
}

double conditional_error(const DiscreteSEM& m, const QSpec& spec, const ConditionalQuery& q, const Estimand& e) {
    std::vector<DistTable> tables;
    for (const auto& entry : spec.entries) tables.push_back(q_eval(m, entry.set));
    EstimandEvaluator ev(std::move(tables));
    const DistTable truth = interventional_family(m, q.x, q.y, q.z);
    double worst = 0.0;
    for (const auto& a : support::assignments(m, set_union(q.x, set_union(q.y, q.z)))) {
        worst = std::max(worst, std::abs(ev.at(e, support::complete(m.graph, a)) - truth.at(a)));
    }
    return worst;
}

}  // namespace

TEST_CASE("max_bi examples") {
    CHECK(max_bi({{"X1"}, {"Y1"}, {}}, support::zigzag()).empty());
    CHECK(max_bi({{"X"}, {"Y"}, {"Z"}}, support::chain()) == NodeSet{"Z"});
    CHECK(max_bi({{"X1"}, {"Y1"}, {"Z1", "Z2"}}, support::zigzag()) == NodeSet{"Z1"});
    // Bow: X cannot move into the intervention when conditioning on it.
    CHECK(max_bi({{}, {"Y"}, {"X"}}, support::bow()).empty());
    // Chain without intervening on X: both conditioning variables move.
    CHECK(max_bi({{}, {"Y"}, {"Z", "X"}}, support::chain()) == NodeSet{"X", "Z"});
}

TEST_CASE("max_bi result is jointly valid and maximal") {
    std::mt19937_64 rng(43);
    for (int trial = 0; trial < 400; ++trial) {
        RandomGraphOptions opt;
        opt.nodes = 2 + trial % 6;
        opt.max_bidirected = 4;
        const CausalGraph g = random_graph(opt, rng);
        const auto rq = support::random_query(g, rng, 0.25, 0.4);
        const ConditionalQuery q{rq.x, rq.y, rq.z};
        const NodeSet w = max_bi(q, g);
        CHECK(is_subset(w, q.z));
        CHECK(jointly_movable(g, q, w));
        for (const auto& extra : set_difference(q.z, w)) {
            NodeSet bigger = w;
            bigger.insert(extra);
            CHECK_FALSE(jointly_movable(g, q, bigger));
        }
    }
}

TEST_CASE("zigzag conditional query") {
    const CausalGraph g = support::zigzag();
    const ConditionalQuery q{{"X1"}, {"Y1"}, {"Z1", "Z2"}};
    const Verdict v = cgid_decide(q, spec_v(g), g);
    REQUIRE(v.identifiable());
    CHECK(v.moved_to_intervention == NodeSet{"Z1"});
    CHECK(v.estimand().kind() == Estimand::Kind::ratio);
    for (std::uint64_t seed = 1; seed <= 30; ++seed) {
        const DiscreteSEM m = random_model(g, seed);
        CHECK(conditional_error(m, spec_v(g), q, v.estimand()) < 1e-9);
        // Σ_{W1} Q[Y1,W1,Z2] / Σ_{W1,Y1} Q[Y1,W1,Z2] with Q taken straight
        // from the model.
        const DistTable qa = q_eval(m, {"Y1", "W1", "Z2"});
        EstimandEvaluator ev({q_eval(m, g.observed())});
        for (const auto& a : support::assignments(m, g.observed())) {
            double num = 0, den = 0;
            for (int w = 0; w < 2; ++w) {
                for (int y = 0; y < 2; ++y) {
                    auto b = a;
                    b["W1"] = w;
                    b["Y1"] = y;
                    den += qa.at(b);
                    if (y == a.at("Y1")) num += qa.at(b);
                }
            }
            CHECK(std::abs(ev.at(v.estimand(), a) - num / den) < 1e-9);
        }
    }
}

TEST_CASE("empty z matches gid exactly") {
    const CausalGraph g = support::zigzag();
    const QSpec spec = spec_v(g);
    const Verdict a = cgid_decide({{"X1", "Z1"}, {"Y1", "Z2"}, {}}, spec, g);
    const Verdict b = gid_decide({"X1", "Z1"}, {"Y1", "Z2"}, spec, g);
    REQUIRE(a.identifiable());
    CHECK(structurally_equal(a.estimand(), b.estimand()));
    CHECK(a.moved_to_intervention.empty());

    const Verdict bow = cgid_decide({{"X"}, {"Y"}, {}}, spec_v(support::bow()), support::bow());
    CHECK_FALSE(bow.identifiable());
}

TEST_CASE("moved set is reported on both outcomes") {
    const CausalGraph g = support::bow();
    // P(Y | X): the bidirected edge keeps X in the conditioning set and the
    // joint is identifiable.
    const Verdict v = cgid_decide({{}, {"Y"}, {"X"}}, spec_v(g), g);
    CHECK(v.identifiable());
    CHECK(v.moved_to_intervention.empty());

    std::mt19937_64 rng(53);
    int failures_with_moves = 0;
    for (int trial = 0; trial < 300; ++trial) {
        RandomGraphOptions opt;
        opt.nodes = 3 + trial % 4;
        opt.max_bidirected = 4;
        const CausalGraph r = random_graph(opt, rng);
        const auto rq = support::random_query(r, rng, 0.25, 0.4);
        const ConditionalQuery q{rq.x, rq.y, rq.z};
        const Verdict d = cgid_decide(q, spec_v(r), r);
        CHECK(d.moved_to_intervention == max_bi(q, r));
        if (!d.identifiable() && !d.moved_to_intervention.empty()) ++failures_with_moves;
    }
    CHECK(failures_with_moves > 0);
}

TEST_CASE("query validation") {
    const CausalGraph g = support::chain();
    CHECK_THROWS_AS(max_bi({{"X"}, {}, {"Z"}}, g), PreconditionError);
    CHECK_THROWS_AS(max_bi({{"X"}, {"Y"}, {"X"}}, g), PreconditionError);
    CHECK_THROWS_AS(cgid_decide({{"X"}, {"Y"}, {"Nope"}}, spec_v(g), g), GraphError);
}

TEST_CASE("identified conditionals match mutilation") {
    std::mt19937_64 rng(47);
    int identified = 0;
    for (int trial = 0; identified < 200; ++trial) {
        RandomGraphOptions opt;
        opt.nodes = 2 + trial % 5;
        opt.max_bidirected = 3;
        const CausalGraph g = random_graph(opt, rng);
        const auto rq = support::random_query(g, rng, 0.25, 0.35);
        const ConditionalQuery q{rq.x, rq.y, rq.z};
        std::vector<NodeSet> sets{g.observed()};
        NodeSet extra = random_subset(g.observed(), 0.5, rng);
        if (!extra.empty() && extra != g.observed()) sets.push_back(extra);
        const QSpec spec = QSpec::from_sets(sets);
        const Verdict v = cgid_decide(q, spec, g);
        if (!v.identifiable()) continue;
        ++identified;
        const DiscreteSEM m = random_model(g, static_cast<std::uint64_t>(trial) + 77, 3);
        REQUIRE(conditional_error(m, spec, q, v.estimand()) < 1e-9);
    }
}
