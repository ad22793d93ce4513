#include "cgid/sem.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "cgid/error.hpp"

namespace cgid {

Domain::Domain(std::vector<NodeId> vars, std::vector<int> cards)
    : vars_(std::move(vars)), cards_(std::move(cards)), strides_(vars_.size(), 1) {
    if (vars_.size() != cards_.size()) throw PreconditionError("domain needs one card per variable");
    for (std::size_t i = vars_.size(); i-- > 0;) {
        if (cards_[i] < 1) throw PreconditionError("domain size of " + vars_[i] + " must be positive");
        strides_[i] = size_;
        size_ *= static_cast<std::size_t>(cards_[i]);
    }
}

std::size_t Domain::position(const NodeId& v) const {
    auto it = std::find(vars_.begin(), vars_.end(), v);
    if (it == vars_.end()) throw EvalError("variable '" + v + "' not in table");
    return static_cast<std::size_t>(it - vars_.begin());
}

std::size_t Domain::encode(std::span<const int> digits) const {
    std::size_t index = 0;
    for (std::size_t i = 0; i < vars_.size(); ++i) index += strides_[i] * static_cast<std::size_t>(digits[i]);
    return index;
}

void Domain::decode(std::size_t index, std::span<int> digits) const {
    for (std::size_t i = 0; i < vars_.size(); ++i) {
        digits[i] = static_cast<int>(index / strides_[i]);
        index %= strides_[i];
    }
}

std::size_t Domain::encode(const Assignment& a) const {
    std::size_t index = 0;
    for (std::size_t i = 0; i < vars_.size(); ++i) {
        auto it = a.find(vars_[i]);
        if (it == a.end()) throw EvalError("assignment lacks '" + vars_[i] + "'");
        if (it->second < 0 || it->second >= cards_[i])
            throw EvalError("value of '" + vars_[i] + "' out of range");
        index += strides_[i] * static_cast<std::size_t>(it->second);
    }
    return index;
}

void DiscreteSEM::index() {
    for (auto& cpt : cpts) {
        cpt.parent_positions.clear();
        for (const auto& p : cpt.parents) cpt.parent_positions.push_back(observed.position(p));
    }
}

std::size_t DiscreteSEM::row_index(std::size_t i, std::span<const int> v, std::span<const int> u) const {
    const Cpt& cpt = cpts[i];
    const auto& cards = observed.cards();
    std::size_t row = 0;
    for (std::size_t p : cpt.parent_positions) row = row * static_cast<std::size_t>(cards[p]) + static_cast<std::size_t>(v[p]);
    for (std::size_t l : cpt.latents) row = row * static_cast<std::size_t>(latents[l].card) + static_cast<std::size_t>(u[l]);
    return row;
}

namespace {

bool row_ok(const std::vector<double>& row, std::size_t card, bool positive, std::string& why) {
    if (row.size() != card) {
        why = "row has wrong length";
        return false;
    }
    double sum = 0.0;
    for (double p : row) {
        if (!(p >= 0.0)) {
            why = "negative or NaN probability";
            return false;
        }
        if (positive && p < kMinEntry) {
            why = "probability below positivity floor";
            return false;
        }
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-12) {
        why = "row does not sum to one";
        return false;
    }
    return true;
}

}  // namespace

std::string DiscreteSEM::check(bool require_positive) const {
    const auto& vars = observed.vars();
    if (vars != std::vector<NodeId>(graph.observed().begin(), graph.observed().end()))
        return "observed variables differ from the graph";
    if (cpts.size() != vars.size()) return "one CPT per observed variable required";
    if (latents.size() != graph.bidirected().size()) return "one latent per bidirected edge required";
    for (std::size_t l = 0; l < latents.size(); ++l) {
        const auto& lat = latents[l];
        if (!graph.has_bidirected(lat.children.first, lat.children.second))
            return "latent " + lat.name + " does not match a bidirected edge";
        if (lat.card < 2) return "latent " + lat.name + " needs at least two states";
        std::string why;
        if (!row_ok(lat.marginal, static_cast<std::size_t>(lat.card), require_positive, why))
            return "latent " + lat.name + ": " + why;
    }
    for (std::size_t i = 0; i < vars.size(); ++i) {
        const Cpt& cpt = cpts[i];
        if (cpt.node != vars[i]) return "CPT order differs from variable order";
        if (cpt.card != observed.cards()[i]) return "CPT of " + cpt.node + " has wrong domain size";
        if (cpt.card < 2 || cpt.card > kMaxCard) return "domain size of " + cpt.node + " outside [2, 4]";
        const NodeSet& pa = graph.parents_of(cpt.node);
        if (std::vector<NodeId>(pa.begin(), pa.end()) != cpt.parents) return "CPT parents of " + cpt.node + " differ from graph";
        if (cpt.parent_positions.size() != cpt.parents.size()) return "model not indexed";
        std::vector<std::size_t> expected;
        for (std::size_t l = 0; l < latents.size(); ++l) {
            if (latents[l].children.first == cpt.node || latents[l].children.second == cpt.node) expected.push_back(l);
        }
        std::sort(expected.begin(), expected.end(),
                  [&](std::size_t a, std::size_t b) { return latents[a].name < latents[b].name; });
        if (expected != cpt.latents) return "CPT latents of " + cpt.node + " differ from graph";
        std::size_t rows = 1;
        for (std::size_t p : cpt.parent_positions) rows *= static_cast<std::size_t>(observed.cards()[p]);
        for (std::size_t l : cpt.latents) rows *= static_cast<std::size_t>(latents[l].card);
        if (cpt.rows.size() != rows) return "CPT of " + cpt.node + " has wrong row count";
        for (const auto& row : cpt.rows) {
            std::string why;
            if (!row_ok(row, static_cast<std::size_t>(cpt.card), require_positive, why)) return "CPT of " + cpt.node + ": " + why;
        }
    }
    return {};
}

DiscreteSEM uniform_model(const CausalGraph& g, const std::map<NodeId, int>& cards, int latent_card) {
    DiscreteSEM m;
    m.graph = g;
    std::vector<NodeId> vars(g.observed().begin(), g.observed().end());
    std::vector<int> card_list;
    for (const auto& v : vars) {
        auto it = cards.find(v);
        card_list.push_back(it == cards.end() ? 2 : it->second);
    }
    m.observed = Domain(vars, card_list);

    for (const auto& e : g.bidirected()) {
        LatentFactor lat;
        lat.name = "U_" + e.first + "_" + e.second;
        lat.children = e;
        lat.card = latent_card;
        lat.marginal.assign(static_cast<std::size_t>(latent_card), 1.0 / latent_card);
        m.latents.push_back(std::move(lat));
    }
    for (std::size_t i = 0; i < vars.size(); ++i) {
        Cpt cpt;
        cpt.node = vars[i];
        cpt.card = card_list[i];
        const NodeSet& pa = g.parents_of(vars[i]);
        cpt.parents.assign(pa.begin(), pa.end());
        for (std::size_t l = 0; l < m.latents.size(); ++l) {
            if (m.latents[l].children.first == vars[i] || m.latents[l].children.second == vars[i]) cpt.latents.push_back(l);
        }
        std::sort(cpt.latents.begin(), cpt.latents.end(),
                  [&](std::size_t a, std::size_t b) { return m.latents[a].name < m.latents[b].name; });
        m.cpts.push_back(std::move(cpt));
    }
    m.index();
    for (auto& cpt : m.cpts) {
        std::size_t rows = 1;
        for (std::size_t p : cpt.parent_positions) rows *= static_cast<std::size_t>(card_list[p]);
        for (std::size_t l : cpt.latents) rows *= static_cast<std::size_t>(m.latents[l].card);
        cpt.rows.assign(rows, std::vector<double>(static_cast<std::size_t>(cpt.card), 1.0 / cpt.card));
    }
    return m;
}

namespace {

void sample_simplex(std::vector<double>& row, std::mt19937_64& rng) {
    std::exponential_distribution<double> draw(1.0);
    double sum = 0.0;
    for (double& p : row) {
        p = draw(rng);
        sum += p;
    }
    double floored = 0.0;
    for (double& p : row) {
        p = std::max(p / sum, kPositivityFloor);
        floored += p;
    }
    for (double& p : row) p /= floored;
}

}  // namespace

DiscreteSEM random_model(const CausalGraph& g, std::uint64_t seed, int max_card, int latent_card) {
    if (max_card < 2 || max_card > kMaxCard) throw PreconditionError("max_card must be in [2, 4]");
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> card(2, max_card);
    std::map<NodeId, int> cards;
    for (const auto& v : g.observed()) cards[v] = card(rng);
    DiscreteSEM m = uniform_model(g, cards, latent_card);
    for (auto& lat : m.latents) sample_simplex(lat.marginal, rng);
    for (auto& cpt : m.cpts) {
        for (auto& row : cpt.rows) sample_simplex(row, rng);
    }
    return m;
}

namespace {

// Σ_u Π_{l relevant} P(u_l) Π_{i ∈ nodes} P(v_i | pa_i, u) for every v.
std::vector<double> sum_over_latents(const DiscreteSEM& m, const std::vector<std::size_t>& nodes, std::size_t budget) {
    std::vector<std::size_t> relevant;
    for (std::size_t i : nodes) {
        for (std::size_t l : m.cpts[i].latents) relevant.push_back(l);
    }
    std::sort(relevant.begin(), relevant.end());
    relevant.erase(std::unique(relevant.begin(), relevant.end()), relevant.end());

    std::size_t latent_states = 1;
    for (std::size_t l : relevant) latent_states *= static_cast<std::size_t>(m.latents[l].card);
    const std::size_t v_states = m.observed.size();
    if (v_states > budget || latent_states > budget / std::max<std::size_t>(v_states, 1))
        throw BudgetError("state space of " + std::to_string(v_states) + " x " + std::to_string(latent_states) +
                          " exceeds budget " + std::to_string(budget));

    std::vector<double> out(v_states, 0.0);
    std::vector<int> v(m.observed.vars().size());
    std::vector<int> u(m.latents.size(), 0);
    for (std::size_t vi = 0; vi < v_states; ++vi) {
        m.observed.decode(vi, v);
        double total = 0.0;
        for (std::size_t ui = 0; ui < latent_states; ++ui) {
            std::size_t rest = ui;
            double weight = 1.0;
            for (std::size_t k = relevant.size(); k-- > 0;) {
                const auto& lat = m.latents[relevant[k]];
                u[relevant[k]] = static_cast<int>(rest % static_cast<std::size_t>(lat.card));
                rest /= static_cast<std::size_t>(lat.card);
                weight *= lat.marginal[static_cast<std::size_t>(u[relevant[k]])];
            }
            for (std::size_t i : nodes) {
                weight *= m.cpts[i].rows[m.row_index(i, v, u)][static_cast<std::size_t>(v[i])];
            }
            total += weight;
        }
        out[vi] = total;
    }
    return out;
}

std::vector<std::size_t> positions_of(const DiscreteSEM& m, const NodeSet& s) {
    std::vector<std::size_t> out;
    for (const auto& v : s) out.push_back(m.observed.position(v));
    return out;
}

Domain subdomain(const DiscreteSEM& m, const NodeSet& vars) {
    std::vector<NodeId> names(vars.begin(), vars.end());
    std::vector<int> cards;
    for (const auto& v : names) cards.push_back(m.observed.cards()[m.observed.position(v)]);
    return Domain(std::move(names), std::move(cards));
}

}  // namespace

DistTable q_eval(const DiscreteSEM& m, const NodeSet& s, std::size_t budget) {
    require_known(m.graph, s);
    DistTable t;
    t.domain = m.observed;
    t.values = sum_over_latents(m, positions_of(m, s), budget);
    t.normalization = s == m.graph.observed() ? DistTable::Normalization::joint : DistTable::Normalization::conditional;
    return t;
}

DistTable joint(const DiscreteSEM& m, std::size_t budget) {
    DistTable t = q_eval(m, m.graph.observed(), budget);
    t.normalization = DistTable::Normalization::joint;
    return t;
}

DistTable q_cond_eval(const DiscreteSEM& m, const NodeSet& s1, const NodeSet& s2, std::size_t budget) {
    if (intersects(s1, s2)) throw PreconditionError("q_cond_eval needs disjoint sets");
    DistTable t = q_eval(m, set_union(s1, s2), budget);
    const auto pos = positions_of(m, s1);
    std::vector<int> v(m.observed.vars().size());
    // Normalizer keyed by v with the s1 coordinates zeroed.
    std::vector<double> norm(t.values.size(), 0.0);
    auto key = [&](std::size_t vi) {
        m.observed.decode(vi, v);
        for (std::size_t p : pos) v[p] = 0;
        return m.observed.encode(v);
    };
    for (std::size_t vi = 0; vi < t.values.size(); ++vi) norm[key(vi)] += t.values[vi];
    for (std::size_t vi = 0; vi < t.values.size(); ++vi) {
        double den = norm[key(vi)];
        if (!(den > 0.0)) throw EvalError("zero normalizer in conditional Q");
        t.values[vi] /= den;
    }
    t.normalization = DistTable::Normalization::conditional;
    return t;
}

DiscreteSEM mutilate(const DiscreteSEM& m, const Assignment& x) {
    DiscreteSEM out = m;
    NodeSet fixed;
    for (const auto& [name, value] : x) {
        std::size_t i = m.observed.position(name);
        if (value < 0 || value >= out.cpts[i].card) throw EvalError("value of '" + name + "' out of range");
        Cpt& cpt = out.cpts[i];
        cpt.parents.clear();
        cpt.latents.clear();
        cpt.rows.assign(1, std::vector<double>(static_cast<std::size_t>(cpt.card), 0.0));
        cpt.rows[0][static_cast<std::size_t>(value)] = 1.0;
        fixed.insert(name);
    }
    out.graph = edge_subgraph(m.graph, fixed, {});
    out.index();
    return out;
}

DistTable interventional(const DiscreteSEM& m, const Assignment& x, const NodeSet& y, const NodeSet& z,
                         std::size_t budget) {
    NodeSet x_set;
    for (const auto& [name, _] : x) x_set.insert(name);
    require_known(m.graph, x_set);
    require_known(m.graph, y);
    require_known(m.graph, z);
    if (intersects(x_set, y) || intersects(x_set, z) || intersects(y, z))
        throw PreconditionError("x, y and z must be pairwise disjoint");

    const DiscreteSEM mutilated = mutilate(m, x);
    const DistTable p = joint(mutilated, budget);

    DistTable out;
    out.domain = subdomain(m, set_union(y, z));
    out.values.assign(out.domain.size(), 0.0);
    std::vector<std::size_t> proj;
    for (const auto& name : out.domain.vars()) proj.push_back(m.observed.position(name));
    std::vector<int> v(m.observed.vars().size());
    std::vector<int> digits(proj.size());
    for (std::size_t vi = 0; vi < p.values.size(); ++vi) {
        m.observed.decode(vi, v);
        for (std::size_t k = 0; k < proj.size(); ++k) digits[k] = v[proj[k]];
        out.values[out.domain.encode(digits)] += p.values[vi];
    }
    if (z.empty()) return out;

    // Condition on z: divide by the marginal of each z value.
    std::vector<std::size_t> y_pos;
    for (std::size_t k = 0; k < out.domain.vars().size(); ++k) {
        if (y.count(out.domain.vars()[k])) y_pos.push_back(k);
    }
    std::vector<double> mass(out.values.size(), 0.0);
    auto key = [&](std::size_t i) {
        out.domain.decode(i, digits);
        for (std::size_t k : y_pos) digits[k] = 0;
        return out.domain.encode(digits);
    };
    for (std::size_t i = 0; i < out.values.size(); ++i) mass[key(i)] += out.values[i];
    for (std::size_t i = 0; i < out.values.size(); ++i) {
        double den = mass[key(i)];
        if (!(den > 0.0)) throw EvalError("conditioning event has zero probability");
        out.values[i] /= den;
    }
    out.normalization = DistTable::Normalization::conditional;
    return out;
}

DistTable interventional_family(const DiscreteSEM& m, const NodeSet& x, const NodeSet& y, const NodeSet& z,
                                std::size_t budget) {
    DistTable out;
    out.domain = subdomain(m, set_union(x, set_union(y, z)));
    out.values.assign(out.domain.size(), 0.0);
    out.normalization = DistTable::Normalization::conditional;
    const Domain xs = subdomain(m, x);
    std::vector<int> xd(xs.vars().size());
    for (std::size_t xi = 0; xi < xs.size(); ++xi) {
        xs.decode(xi, xd);
        Assignment a;
        for (std::size_t k = 0; k < xd.size(); ++k) a[xs.vars()[k]] = xd[k];
        const DistTable cond = interventional(m, a, y, z, budget);
        std::vector<int> cd(cond.domain.vars().size());
        for (std::size_t ci = 0; ci < cond.values.size(); ++ci) {
            cond.domain.decode(ci, cd);
            Assignment full = a;
            for (std::size_t k = 0; k < cd.size(); ++k) full[cond.domain.vars()[k]] = cd[k];
            out.values[out.domain.encode(full)] = cond.values[ci];
        }
    }
    return out;
}

EstimandEvaluator::EstimandEvaluator(std::vector<DistTable> inputs) : inputs_(std::move(inputs)) {
    if (inputs_.empty()) throw EvalError("no input tables");
    domain_ = inputs_.front().domain;
    for (const auto& t : inputs_) {
        if (t.domain.vars() != domain_.vars() || t.domain.cards() != domain_.cards())
            throw EvalError("input tables disagree on variables");
        if (t.values.size() != domain_.size()) throw EvalError("input table has wrong size");
        for (double p : t.values) {
            if (!(p > 0.0)) throw EvalError("input table is not strictly positive");
        }
    }
}

double EstimandEvaluator::at(const Estimand& e, std::size_t v) {
    if (retained_.empty() || retained_.back().id() != e.id()) retained_.push_back(e);
    return compute(e, v);
}

double EstimandEvaluator::at(const Estimand& e, const Assignment& v) { return at(e, domain_.encode(v)); }

std::vector<double> EstimandEvaluator::table(const Estimand& e) {
    retained_.push_back(e);
    std::vector<double> out(domain_.size());
    for (std::size_t v = 0; v < out.size(); ++v) out[v] = compute(e, v);
    return out;
}

double EstimandEvaluator::compute(const Estimand& e, std::size_t v) {
    const Key key{e.id(), v};
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    double value = 0.0;
    switch (e.kind()) {
        case Estimand::Kind::input: {
            if (e.input_index() >= inputs_.size()) throw EvalError("estimand refers to a missing input");
            value = inputs_[e.input_index()].values[v];
            break;
        }
        case Estimand::Kind::one:
            value = 1.0;
            break;
        case Estimand::Kind::sum: {
            std::vector<int> digits(domain_.vars().size());
            domain_.decode(v, digits);
            std::vector<std::size_t> pos;
            for (const auto& name : e.vars()) pos.push_back(domain_.position(name));
            std::size_t combos = 1;
            for (std::size_t p : pos) combos *= static_cast<std::size_t>(domain_.cards()[p]);
            for (std::size_t c = 0; c < combos; ++c) {
                std::size_t rest = c;
                for (std::size_t k = pos.size(); k-- > 0;) {
                    auto card = static_cast<std::size_t>(domain_.cards()[pos[k]]);
                    digits[pos[k]] = static_cast<int>(rest % card);
                    rest /= card;
                }
                value += compute(e.children()[0], domain_.encode(digits));
            }
            break;
        }
        case Estimand::Kind::product:
            value = 1.0;
            for (const auto& c : e.children()) value *= compute(c, v);
            break;
        case Estimand::Kind::ratio: {
            double num = compute(e.children()[0], v);
            double den = compute(e.children()[1], v);
            if (!(den > 0.0)) throw EvalError("division by a non-positive value");
            value = num / den;
            break;
        }
    }
    memo_.emplace(key, value);
    return value;
}

double eval_estimand(const Estimand& e, const std::vector<DistTable>& tables, const Assignment& v) {
    EstimandEvaluator evaluator(tables);
    return evaluator.at(e, v);
}

}  // namespace cgid
