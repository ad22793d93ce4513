#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "cgid/estimand.hpp"
#include "cgid/graph.hpp"

namespace cgid {

/// Floor applied to every sampled probability before renormalization.
inline constexpr double kPositivityFloor = 0.01;
/// Smallest entry a positive model may hold: the floor after
/// renormalization over the largest supported domain.
inline constexpr double kMinEntry = kPositivityFloor / 4.0;
inline constexpr int kMaxCard = 4;
inline constexpr std::size_t kDefaultStateBudget = 10'000'000;

using Assignment = std::map<NodeId, int>;

/// Mixed-radix index over a list of finite variables; the last variable
/// varies fastest.
class Domain {
public:
    Domain() = default;
    Domain(std::vector<NodeId> vars, std::vector<int> cards);

    const std::vector<NodeId>& vars() const { return vars_; }
    const std::vector<int>& cards() const { return cards_; }
    std::size_t size() const { return size_; }
    std::size_t position(const NodeId& v) const;

    std::size_t encode(std::span<const int> digits) const;
    void decode(std::size_t index, std::span<int> digits) const;
    std::size_t encode(const Assignment& a) const;

private:
    std::vector<NodeId> vars_;
    std::vector<int> cards_;
    std::vector<std::size_t> strides_;
    std::size_t size_ = 1;
};

/// Dense table over the joint realizations of its variables.
struct DistTable {
    /// joint: entries sum to one. conditional: a family of distributions
    /// (normalized per conditioning value) or a Q-table over dom(V).
    enum class Normalization { joint, conditional };

    Domain domain;
    std::vector<double> values;
    Normalization normalization = Normalization::joint;

    double at(const Assignment& a) const { return values[domain.encode(a)]; }
};

/// One latent common cause per bidirected edge.
struct LatentFactor {
    std::string name;
    BidirectedEdge children;
    int card = 2;
    std::vector<double> marginal;
};

/// P(node | observed parents, incident latents). Rows are indexed by the
/// parents (sorted by name) followed by the latents (sorted by name), last
/// varying fastest.
struct Cpt {
    NodeId node;
    int card = 2;
    std::vector<NodeId> parents;
    std::vector<std::size_t> latents;  // indices into DiscreteSEM::latents
    std::vector<std::vector<double>> rows;
    /// Positions of `parents` in the observed domain; filled by
    /// DiscreteSEM::index().
    std::vector<std::size_t> parent_positions;
};

/// Finite-domain semi-Markovian model: observed variables in name order
/// with one CPT each.
struct DiscreteSEM {
    CausalGraph graph;
    Domain observed;              // all observed variables, sorted by name
    std::vector<LatentFactor> latents;
    std::vector<Cpt> cpts;        // aligned with observed.vars()

    /// Recomputes the derived Cpt::parent_positions. Call after editing
    /// structure by hand.
    void index();

    /// Row of the CPT for variable `i` under full realization `v` and
    /// latent realization `u`.
    std::size_t row_index(std::size_t i, std::span<const int> v, std::span<const int> u) const;

    /// Empty string when the model is well formed; otherwise the first
    /// problem found. With `require_positive`, every entry must be at least
    /// kMinEntry.
    std::string check(bool require_positive = true) const;
};

/// Skeleton with the structure of g: given domain sizes, latent domain size,
/// and uniform tables.
DiscreteSEM uniform_model(const CausalGraph& g, const std::map<NodeId, int>& cards, int latent_card = 2);

/// Random positive model; deterministic in `seed`. Domain sizes are drawn
/// from [2, max_card]; tables come from a flat Dirichlet floored at
/// kPositivityFloor and renormalized.
DiscreteSEM random_model(const CausalGraph& g, std::uint64_t seed, int max_card = 2, int latent_card = 2);

/// P(v) by full enumeration of the latents. Same summation as q_eval(m, V).
DistTable joint(const DiscreteSEM& m, std::size_t budget = kDefaultStateBudget);

/// Q[s](v) = Σ_u Π_{S ∈ s} P(s | pa_s) Π P(u), a table over dom(V).
DistTable q_eval(const DiscreteSEM& m, const NodeSet& s, std::size_t budget = kDefaultStateBudget);

/// Q[s1 | s2](v) = Q[s](v) / Σ_{s1'} Q[s](v with s1 replaced by s1'), s = s1 ∪ s2.
DistTable q_cond_eval(const DiscreteSEM& m, const NodeSet& s1, const NodeSet& s2,
                      std::size_t budget = kDefaultStateBudget);

/// The model with each equation of `x` replaced by the constant it is set
/// to. The result is not positive and only meant for evaluation.
DiscreteSEM mutilate(const DiscreteSEM& m, const Assignment& x);

/// P_x(y | z) by mutilation, a table over y ∪ z.
DistTable interventional(const DiscreteSEM& m, const Assignment& x, const NodeSet& y, const NodeSet& z,
                         std::size_t budget = kDefaultStateBudget);

/// P_x(y | z) for every value of x, a table over x ∪ y ∪ z.
DistTable interventional_family(const DiscreteSEM& m, const NodeSet& x, const NodeSet& y, const NodeSet& z,
                                std::size_t budget = kDefaultStateBudget);

/// Evaluates estimands against Q[A_i] tables over dom(V). Each (node,
/// realization) pair is computed once, so shared subtrees cost nothing
/// extra.
class EstimandEvaluator {
public:
    /// Throws EvalError if a table is not over the same variables as the
    /// first one or holds a non-positive entry.
    explicit EstimandEvaluator(std::vector<DistTable> inputs);

    const Domain& domain() const { return domain_; }

    /// Value at the full realization with index `v` in domain().
    double at(const Estimand& e, std::size_t v);
    double at(const Estimand& e, const Assignment& v);

    /// Values at every realization of domain().
    std::vector<double> table(const Estimand& e);

private:
    struct Key {
        const void* node;
        std::size_t v;
        bool operator==(const Key& o) const { return node == o.node && v == o.v; }
    };
    struct KeyHash {
        std::size_t operator()(const Key& k) const {
            return std::hash<const void*>()(k.node) ^ (k.v * 0x9e3779b97f4a7c15ULL);
        }
    };

    double compute(const Estimand& e, std::size_t v);

    std::vector<DistTable> inputs_;
    Domain domain_;
    // Keeps evaluated trees alive so memo keys (node addresses) stay unique.
    std::vector<Estimand> retained_;
    std::unordered_map<Key, double, KeyHash> memo_;
};

/// Single-point convenience wrapper around EstimandEvaluator.
double eval_estimand(const Estimand& e, const std::vector<DistTable>& tables, const Assignment& v);

}  // namespace cgid
