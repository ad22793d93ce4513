#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "cgid/components.hpp"
#include "cgid/estimand.hpp"
#include "cgid/graph.hpp"

namespace cgid {

/// The collection of available distributions Q[A_0], ..., Q[A_m].
struct QSpec {
    struct Entry {
        std::string label;  // e.g. "A0"
        NodeSet set;
    };
    std::vector<Entry> entries;

    /// Throws PreconditionError for an empty or duplicate set and GraphError
    /// for unknown nodes.
    void validate(const CausalGraph& g) const;

    /// Entries labeled A0, A1, ... in the given order.
    static QSpec from_sets(const std::vector<NodeSet>& sets);
};

/// Which input identified which c-component.
struct ChosenInput {
    NodeSet component;
    std::size_t input = 0;
};

/// Why one input could not identify the failing component.
struct InputFailure {
    enum class Reason { not_superset, not_identifiable };
    std::size_t input = 0;
    Reason reason = Reason::not_superset;
    /// For not_identifiable: the set T on which the identification got stuck.
    NodeSet stuck_at;
    /// For not_identifiable, when the hedge search fit in its budget.
    std::optional<HedgeWitness> hedge;
};

struct Identifiable {
    Estimand estimand;
    std::vector<ChosenInput> chosen_inputs;
};

struct NotIdentifiable {
    NodeSet failing_component;
    std::vector<InputFailure> reasons;
    /// Components identified before the failing one was reached.
    std::vector<ChosenInput> chosen_inputs;
    /// Reference to a model-pair witness, filled by callers that ran one.
    std::optional<std::string> model_witness;
};

struct Verdict {
    std::variant<Identifiable, NotIdentifiable> outcome;
    /// Conditioning variables moved into the intervention (conditional
    /// queries only).
    NodeSet moved_to_intervention;

    bool identifiable() const { return std::holds_alternative<Identifiable>(outcome); }
    const Identifiable& identified() const { return std::get<Identifiable>(outcome); }
    const NotIdentifiable& failure() const { return std::get<NotIdentifiable>(outcome); }
    const Estimand& estimand() const { return identified().estimand; }
};

struct GidOptions {
    /// Attach a hedge witness to every not_identifiable reason when the
    /// search fits in `hedge`'s limits.
    bool collect_hedges = true;
    HedgeSearchOptions hedge;
};

/// Decides whether P_x(y) is computable from {Q[A_i]} in every positive
/// model of g and, if so, builds the estimand Σ_{D\y} Π_i Q[S_i] where D are
/// the ancestors of y in G[V \ x] and S_i the c-components of G[D].
Verdict gid_decide(const NodeSet& x, const NodeSet& y, const QSpec& spec, const CausalGraph& g,
                   const GidOptions& options = {});

/// Classical identification of P_x(y) from P(V) alone.
Verdict id_decide(const NodeSet& x, const NodeSet& y, const CausalGraph& g);

}  // namespace cgid
