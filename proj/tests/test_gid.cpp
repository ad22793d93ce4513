#include "doctest.h"

#include <random>

#include "cgid/error.hpp"
#include "cgid/gid.hpp"
#include "cgid/random_graph.hpp"
#include "cgid/sem.hpp"
#include "support.hpp"

using namespace cgid;

namespace {

QSpec spec_v(const CausalGraph& g) { return QSpec::from_sets({g.observed()}); }

// Max over x ∪ y realizations of |estimand − P_x(y)|.
double effect_error(const DiscreteSEM& m, const QSpec& spec, const NodeSet& x, const NodeSet& y,
                    const Estimand& e) {
    std::vector<DistTable> tables;
    for (const auto& entry : spec.entries) tables.push_back(q_eval(m, entry.set));
    EstimandEvaluator ev(std::move(tables));
    const DistTable truth = interventional_family(m, x, y, {});
    double worst = 0.0;
    for (const auto& a : support::assignments(m, set_union(x, y))) {
        worst = std::max(worst, std::abs(ev.at(e, support::complete(m.graph, a)) - truth.at(a)));
    }
    return worst;
}

}  // namespace

TEST_CASE("back-door adjustment") {
    const CausalGraph g = support::backdoor();
    const Verdict v = gid_decide({"X"}, {"Y"}, spec_v(g), g);
    REQUIRE(v.identifiable());
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        const DiscreteSEM m = random_model(g, seed, 3);
        const auto p = support::brute_joint(m, {});
        EstimandEvaluator ev({q_eval(m, g.observed())});
        for (const auto& a : support::assignments(m, {"X", "Y"})) {
            // Σ_z P(z) P(y | x, z) from the joint.
            double adjusted = 0.0;
            for (const auto& zc : support::assignments(m, {"Z"})) {
                double pz = 0, pxz = 0, pxyz = 0;
                for (const auto& [vv, pv] : p) {
                    if (vv.at("Z") != zc.at("Z")) continue;
                    pz += pv;
                    if (vv.at("X") != a.at("X")) continue;
                    pxz += pv;
                    if (vv.at("Y") == a.at("Y")) pxyz += pv;
                }
                adjusted += pz * pxyz / pxz;
            }
            REQUIRE(std::abs(ev.at(v.estimand(), support::complete(g, a)) - adjusted) < 1e-9);
        }
    }
}

TEST_CASE("bow graph") {
    const CausalGraph g = support::bow();
    SUBCASE("target given as an input") {
        const QSpec spec = QSpec::from_sets({g.observed(), {"Y"}});
        const Verdict v = gid_decide({"X"}, {"Y"}, spec, g);
        REQUIRE(v.identifiable());
        CHECK(structurally_equal(v.estimand(), Estimand::input(1, {"Y"}, g.observed())));
        REQUIRE(v.identified().chosen_inputs.size() == 1);
        CHECK(v.identified().chosen_inputs[0].input == 1);
    }
    SUBCASE("observational input only") {
        const Verdict v = gid_decide({"X"}, {"Y"}, spec_v(g), g);
        REQUIRE_FALSE(v.identifiable());
        const auto& f = v.failure();
        CHECK(f.failing_component == NodeSet{"Y"});
        REQUIRE(f.reasons.size() == 1);
        CHECK(f.reasons[0].reason == InputFailure::Reason::not_identifiable);
        REQUIRE(f.reasons[0].hedge);
        CHECK(f.reasons[0].hedge->inner == NodeSet{"X", "Y"});
        CHECK(id_decide({"X"}, {"Y"}, g).identifiable() == false);
    }
}

TEST_CASE("zigzag unconditional targets are not identifiable") {
    const CausalGraph g = support::zigzag();
    CHECK_FALSE(gid_decide({"X1"}, {"Y1", "Z1", "Z2"}, spec_v(g), g).identifiable());
    CHECK_FALSE(gid_decide({"X1"}, {"Z1", "Z2"}, spec_v(g), g).identifiable());
    const Verdict v = gid_decide({"X1", "Z1"}, {"Y1", "Z2"}, spec_v(g), g);
    CHECK(v.identifiable());
}

TEST_CASE("first working input wins and reasons are recorded") {
    const CausalGraph g = support::zigzag();
    const QSpec spec = QSpec::from_sets({{"X1", "Z1"}, g.observed(), {"W1", "Y1", "Z2"}});
    const Verdict v = gid_decide({"X1", "Z1"}, {"Y1", "Z2"}, spec, g);
    REQUIRE(v.identifiable());
    for (const auto& c : v.identified().chosen_inputs) CHECK(c.input == 1);

    const QSpec only_small = QSpec::from_sets({{"X1"}, {"Z1", "X1"}});
    const Verdict bad = gid_decide({"X1"}, {"Z1"}, only_small, g);
    REQUIRE_FALSE(bad.identifiable());
    REQUIRE(bad.failure().reasons.size() == 2);
    CHECK(bad.failure().reasons[0].reason == InputFailure::Reason::not_superset);
}

TEST_CASE("empty intervention is a marginal") {
    const CausalGraph g = support::bow();
    const Verdict v = gid_decide({}, {"Y"}, spec_v(g), g);
    REQUIRE(v.identifiable());
    const DiscreteSEM m = random_model(g, 4);
    CHECK(effect_error(m, spec_v(g), {}, {"Y"}, v.estimand()) < 1e-12);
}

TEST_CASE("argument errors") {
    const CausalGraph g = support::bow();
    CHECK_THROWS_AS(gid_decide({"X"}, {}, spec_v(g), g), PreconditionError);
    CHECK_THROWS_AS(gid_decide({"X"}, {"X"}, spec_v(g), g), PreconditionError);
    CHECK_THROWS_AS(gid_decide({"Q"}, {"Y"}, spec_v(g), g), GraphError);
    CHECK_THROWS_AS(gid_decide({"X"}, {"Y"}, QSpec::from_sets({{"Y"}, {"Y"}}), g), PreconditionError);
    CHECK_THROWS_AS(gid_decide({"X"}, {"Y"}, QSpec::from_sets(std::vector<NodeSet>{NodeSet{}}), g), PreconditionError);
}

TEST_CASE("observational input agrees with classical identification") {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 300; ++trial) {
        RandomGraphOptions opt;
        opt.nodes = 2 + trial % 6;
        opt.max_bidirected = 4;
        const CausalGraph g = random_graph(opt, rng);
        const auto q = support::random_query(g, rng, 0.35, 0.0);
        const Verdict a = gid_decide(q.x, q.y, spec_v(g), g);
        const Verdict b = id_decide(q.x, q.y, g);
        REQUIRE(a.identifiable() == b.identifiable());
        if (a.identifiable()) CHECK(structurally_equal(a.estimand(), b.estimand()));
    }
}

TEST_CASE("adding inputs never loses identifiability") {
    std::mt19937_64 rng(37);
    for (int trial = 0; trial < 300; ++trial) {
        RandomGraphOptions opt;
        opt.nodes = 2 + trial % 6;
        opt.max_bidirected = 4;
        const CausalGraph g = random_graph(opt, rng);
        const auto q = support::random_query(g, rng, 0.35, 0.0);
        std::vector<NodeSet> sets;
        NodeSet first = random_subset(g.observed(), 0.7, rng);
        if (first.empty()) first = g.observed();
        sets.push_back(first);
        bool before = gid_decide(q.x, q.y, QSpec::from_sets(sets), g).identifiable();
        for (int k = 0; k < 3; ++k) {
            NodeSet extra = random_subset(g.observed(), 0.6, rng);
            if (extra.empty() || std::find(sets.begin(), sets.end(), extra) != sets.end()) continue;
            sets.push_back(extra);
            const bool after = gid_decide(q.x, q.y, QSpec::from_sets(sets), g).identifiable();
            CHECK((!before || after));
            before = after;
        }
    }
}

TEST_CASE("identified effects match mutilation") {
    std::mt19937_64 rng(41);
    int identified = 0;
    for (int trial = 0; identified < 150; ++trial) {
        RandomGraphOptions opt;
        opt.nodes = 2 + trial % 5;
        opt.max_bidirected = 3;
        const CausalGraph g = random_graph(opt, rng);
        const auto q = support::random_query(g, rng, 0.35, 0.0);
        std::vector<NodeSet> sets{g.observed()};
        for (int k = 0; k < 2; ++k) {
            NodeSet extra = random_subset(g.observed(), 0.5, rng);
            if (!extra.empty() && std::find(sets.begin(), sets.end(), extra) == sets.end()) sets.push_back(extra);
        }
        const QSpec spec = QSpec::from_sets(sets);
        const Verdict v = gid_decide(q.x, q.y, spec, g);
        if (!v.identifiable()) continue;
        ++identified;
        const DiscreteSEM m = random_model(g, static_cast<std::uint64_t>(trial) + 1000, 3);
        REQUIRE(effect_error(m, spec, q.x, q.y, v.estimand()) < 1e-9);
    }
}
