#include "doctest.h"

#include <random>

#include "cgid/components.hpp"
#include "cgid/error.hpp"
#include "cgid/identify.hpp"
#include "cgid/random_graph.hpp"
#include "cgid/sem.hpp"
#include "support.hpp"

using namespace cgid;
using support::crossed;
using support::zigzag;

namespace {

Estimand q_of(const CausalGraph& g, const NodeSet& a) { return Estimand::input(0, a, g.observed()); }

// Max |estimand − direct| over every realization, with the estimand
// evaluated on the single input table Q[a].
double max_error(const DiscreteSEM& m, const NodeSet& a, const Estimand& e, const DistTable& direct) {
    EstimandEvaluator ev({q_eval(m, a)});
    const auto got = ev.table(e);
    double worst = 0.0;
    for (std::size_t i = 0; i < got.size(); ++i) worst = std::max(worst, std::abs(got[i] - direct.values[i]));
    return worst;
}

}  // namespace

TEST_CASE("estimand construction checks scopes") {
    const NodeSet v{"A", "B"};
    const Estimand q = Estimand::input(0, v, v);
    CHECK(q.scope() == v);
    const Estimand s = Estimand::sum({"A"}, q);
    CHECK(s.scope() == NodeSet{"B"});
    CHECK_THROWS_AS(Estimand::sum({"C"}, q), PreconditionError);
    CHECK_THROWS_AS(Estimand::sum({"A"}, s), PreconditionError);
    CHECK_THROWS_AS(Estimand::ratio(s, q), PreconditionError);
    CHECK(Estimand::ratio(q, s).scope() == v);
    CHECK(Estimand::product({}).kind() == Estimand::Kind::one);
    CHECK_THROWS_AS(Estimand::input(0, {"C"}, v), PreconditionError);
}

TEST_CASE("simplify rewrites") {
    const NodeSet v{"A", "B", "C"};
    const Estimand q = Estimand::input(0, v, v);
    CHECK(structurally_equal(simplify(Estimand::sum({}, q)), q));

    const Estimand r = simplify(Estimand::ratio(q, q));
    CHECK(r.kind() == Estimand::Kind::one);
    CHECK(r.scope() == v);

    const Estimand nested = Estimand::sum({"A"}, Estimand::sum({"B"}, q));
    const Estimand merged = simplify(nested);
    REQUIRE(merged.kind() == Estimand::Kind::sum);
    CHECK(merged.vars() == NodeSet{"A", "B"});
    CHECK(structurally_equal(merged.children()[0], q));

    const Estimand flat = simplify(Estimand::product({q, Estimand::product({q, q})}));
    CHECK(flat.children().size() == 3);
}

TEST_CASE("telescoping product simplifies to one ratio with the same values") {
    const CausalGraph g = zigzag();
    const Estimand qv = q_of(g, g.observed());
    const auto parts = q_decompose(g, g.observed(), qv);
    std::vector<Estimand> all;
    for (const auto& [_, e] : parts) all.push_back(e);
    const Estimand product = Estimand::product(all);
    const Estimand simple = simplify(product);
    CHECK(dag_size(simple) < dag_size(product));
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const DiscreteSEM m = random_model(g, seed);
        EstimandEvaluator ev({q_eval(m, g.observed())});
        const auto a = ev.table(product);
        const auto b = ev.table(simple);
        for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-12));
    }
}

TEST_CASE("q_decompose") {
    SUBCASE("no bidirected edges gives conditionals") {
        const CausalGraph g = support::chain();
        const auto parts = q_decompose(g, g.observed(), q_of(g, g.observed()));
        REQUIRE(parts.size() == 3);
        for (const auto& [comp, e] : parts) {
            CHECK(comp.size() == 1);
            CHECK(e.kind() == Estimand::Kind::ratio);
        }
    }
    SUBCASE("two-node component is a product of two ratios") {
        const CausalGraph g = zigzag();
        const auto parts = q_decompose(g, g.observed(), q_of(g, g.observed()));
        const auto it = std::find_if(parts.begin(), parts.end(), [](const auto& p) { return p.first == NodeSet{"X1", "Z1"}; });
        REQUIRE(it != parts.end());
        CHECK(it->second.kind() == Estimand::Kind::product);
        CHECK(it->second.children().size() == 2);
        for (std::uint64_t seed = 1; seed <= 10; ++seed) {
            const DiscreteSEM m = random_model(g, seed, 3);
            CHECK(max_error(m, g.observed(), it->second, q_eval(m, {"X1", "Z1"})) < 1e-9);
        }
    }
    SUBCASE("product over components equals Q[a]") {
        const CausalGraph g = crossed();
        for (std::uint64_t seed = 1; seed <= 10; ++seed) {
            const DiscreteSEM m = random_model(g, seed, 3);
            for (const NodeSet& a : {g.observed(), NodeSet{"X1", "X2", "Y2"}, NodeSet{"X1", "Y1"}}) {
                std::vector<Estimand> all;
                for (const auto& [comp, e] : q_decompose(g, a, q_of(g, a))) {
                    all.push_back(e);
                    CHECK(max_error(m, a, e, q_eval(m, comp)) < 1e-9);
                }
                CHECK(max_error(m, a, Estimand::product(all), q_eval(m, a)) < 1e-9);
            }
        }
    }
}

TEST_CASE("identify_q examples") {
    SUBCASE("identity") {
        const CausalGraph g = support::bow();
        const Estimand q = q_of(g, g.observed());
        const auto r = identify_q(g.observed(), g.observed(), g, q);
        REQUIRE(r.identifiable());
        CHECK(structurally_equal(*r.estimand, q));
    }
    SUBCASE("bow") {
        const CausalGraph g = support::bow();
        const auto r = identify_q({"Y"}, g.observed(), g, q_of(g, g.observed()));
        CHECK_FALSE(r.identifiable());
        CHECK(r.failing_set == NodeSet{"X", "Y"});
    }
    SUBCASE("zigzag targets") {
        const CausalGraph g = zigzag();
        const Estimand qv = q_of(g, g.observed());
        const auto z1 = identify_q({"Z1"}, g.observed(), g, qv);
        CHECK_FALSE(z1.identifiable());
        CHECK(z1.failing_set == NodeSet{"X1", "Z1"});

        const auto wy = identify_q({"W1", "Y1"}, g.observed(), g, qv);
        REQUIRE(wy.identifiable());
        for (std::uint64_t seed = 1; seed <= 20; ++seed) {
            const DiscreteSEM m = random_model(g, seed);
            CHECK(max_error(m, g.observed(), *wy.estimand, q_eval(m, {"W1", "Y1"})) < 1e-9);
        }
        const auto z2 = identify_q({"Z2"}, {"Y1", "W1", "Z2"}, g, q_of(g, {"Y1", "W1", "Z2"}));
        REQUIRE(z2.identifiable());
    }
    SUBCASE("preconditions") {
        const CausalGraph g = zigzag();
        const Estimand qv = q_of(g, g.observed());
        CHECK_THROWS_AS(identify_q({"Z1", "Y1"}, g.observed(), g, qv), PreconditionError);
        CHECK_THROWS_AS(identify_q({"Z1"}, {"Y1"}, g, qv), PreconditionError);
        CHECK_THROWS_AS(identify_q({}, g.observed(), g, qv), PreconditionError);
    }
}

TEST_CASE("identify_q soundness on random graphs") {
    std::mt19937_64 rng(23);
    int identified = 0;
    int trials = 0;
    while (identified < 300) {
        ++trials;
        RandomGraphOptions opt;
        opt.nodes = 2 + trials % 5;
        opt.max_bidirected = 4;
        const CausalGraph g = random_graph(opt, rng);
        const NodeSet a = random_subset(g.observed(), 0.8, rng);
        if (a.empty()) continue;
        const auto comps = c_components(g, a);
        std::uniform_int_distribution<std::size_t> pick(0, comps.size() - 1);
        // A random single c-component inside a component of G[a].
        const NodeSet host = comps[pick(rng)];
        NodeSet s;
        for (const auto& c : c_components(g, random_subset(host, 0.6, rng))) {
            s = c;
            break;
        }
        if (s.empty()) s = {*host.begin()};
        const auto r = identify_q(s, a, g, q_of(g, a));
        if (!r.identifiable()) continue;
        ++identified;
        const DiscreteSEM m = random_model(g, static_cast<std::uint64_t>(trials), 3);
        REQUIRE(max_error(m, a, *r.estimand, q_eval(m, s)) < 1e-9);
    }
    CHECK(identified == 300);
}

TEST_CASE("estimand value depends only on its scope") {
    const CausalGraph g = zigzag();
    const auto parts = q_decompose(g, g.observed(), q_of(g, g.observed()));
    const DiscreteSEM m = random_model(g, 99);
    EstimandEvaluator ev({q_eval(m, g.observed())});
    std::vector<Estimand> subterms;
    for (const auto& [_, e] : parts) {
        subterms.push_back(e);
        for (const auto& c : e.children()) subterms.push_back(c);
    }
    subterms.push_back(Estimand::sum({"W1", "Y1"}, q_of(g, g.observed())));
    for (const auto& e : subterms) {
        for (const auto& v : support::assignments(m, g.observed())) {
            for (const auto& name : set_difference(g.observed(), e.scope())) {
                auto w = v;
                w[name] = 1 - w[name];
                CHECK(ev.at(e, v) == ev.at(e, w));
            }
        }
    }
}

TEST_CASE("text and json rendering") {
    const NodeSet v{"W1", "Y1", "Z2"};
    const Estimand q = Estimand::input(0, v, v);
    const Estimand e = Estimand::ratio(Estimand::sum({"W1"}, q), Estimand::sum({"W1", "Y1"}, q));
    CHECK(to_text(e) == "Σ_{W1} Q[W1,Y1,Z2] / Σ_{W1,Y1} Q[W1,Y1,Z2]");
    const auto j = to_json(e);
    CHECK(j["kind"] == "ratio");
    CHECK(j["num"]["kind"] == "sum");
    CHECK(j["num"]["over"] == nlohmann::json::array({"W1"}));
    CHECK(j["num"]["body"]["kind"] == "input");
    CHECK(j["num"]["body"]["index"] == 0);

    const Estimand labeled = Estimand::sum({"W1"}, q).labeled("Q[Y1,Z2]");
    const LabeledText t = to_labeled_text(Estimand::product({labeled, labeled}));
    CHECK(t.expression == "Q[Y1,Z2] · Q[Y1,Z2]");
    REQUIRE(t.definitions.size() == 1);
    CHECK(t.definitions[0].second == "Σ_{W1} Q[W1,Y1,Z2]");
    CHECK(to_json(labeled)["label"] == "Q[Y1,Z2]");
}
