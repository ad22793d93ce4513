#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "cgid/graph.hpp"

namespace cgid {

/// Symbolic expression over the input distributions Q[A_i]. Every
/// expression denotes a function of a full realization v of the observed
/// variables; `scope()` lists the coordinates the value may depend on.
///
/// Trees are immutable and share subtrees, so copying an Estimand is cheap
/// and evaluation can memoize on node identity.
class Estimand {
public:
    enum class Kind { input, sum, product, ratio, one };

    struct Node;

    /// Q[A_index] given as input. Its scope is the full variable set.
    static Estimand input(std::size_t index, NodeSet members, NodeSet universe);
    /// Σ over `vars` of body. Throws PreconditionError unless vars ⊆ scope(body).
    static Estimand sum(NodeSet vars, Estimand body);
    /// Product of factors; an empty list is the constant one over no variables.
    static Estimand product(std::vector<Estimand> factors);
    /// num / den. Throws PreconditionError unless scope(den) ⊆ scope(num).
    static Estimand ratio(Estimand num, Estimand den);
    /// The constant 1 carried over `scope`.
    static Estimand one(NodeSet scope);

    /// Same expression tagged with a display name such as "Q[W1,Y1]". Labels
    /// only affect rendering.
    Estimand labeled(std::string label) const;

    Kind kind() const;
    const NodeSet& scope() const;
    /// Summed variables (sum) or member set (input).
    const NodeSet& vars() const;
    const std::vector<Estimand>& children() const;
    std::size_t input_index() const;
    const std::string& label() const;

    /// Node identity, stable for the lifetime of the tree.
    const Node* id() const { return node_.get(); }

private:
    explicit Estimand(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

    std::shared_ptr<const Node> node_;
};

struct Estimand::Node {
    Kind kind;
    NodeSet scope;
    NodeSet vars;
    std::vector<Estimand> children;
    std::size_t index = 0;
    std::string label;
};

/// Structural equality ignoring labels.
bool structurally_equal(const Estimand& a, const Estimand& b);

/// Number of distinct nodes (shared subtrees counted once).
std::size_t dag_size(const Estimand& e);

/// Semantics-preserving rewrites: drop empty sums, merge nested sums,
/// flatten products, turn products of ratios into one ratio and cancel
/// identical factors between numerator and denominator, Ratio(e, e) -> 1.
/// Cancellation relies on strictly positive inputs.
Estimand simplify(const Estimand& e);

/// Q-notation rendering with every node expanded down to the inputs.
std::string to_text(const Estimand& e);

struct LabeledText {
    std::string expression;
    /// (label, definition) pairs in order of first use.
    std::vector<std::pair<std::string, std::string>> definitions;
};

/// Rendering in which labeled subexpressions appear by name, with one
/// definition per label.
LabeledText to_labeled_text(const Estimand& e);

/// {"kind": "input"|"sum"|"prod"|"ratio"|"one", ...}
nlohmann::json to_json(const Estimand& e);

}  // namespace cgid
