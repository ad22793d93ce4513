#include "cgid/estimand.hpp"

#include <functional>
#include <map>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "cgid/error.hpp"

namespace cgid {

Estimand Estimand::input(std::size_t index, NodeSet members, NodeSet universe) {
    if (!is_subset(members, universe)) throw PreconditionError("input set outside the variable universe");
    auto n = std::make_shared<Node>();
    n->kind = Kind::input;
    n->index = index;
    n->vars = std::move(members);
    n->scope = std::move(universe);
    return Estimand(std::move(n));
}

Estimand Estimand::sum(NodeSet vars, Estimand body) {
    if (!is_subset(vars, body.scope()))
        throw PreconditionError("summed variables " + to_string(vars) + " not in scope " +
                                to_string(body.scope()));
    auto n = std::make_shared<Node>();
    n->kind = Kind::sum;
    n->scope = set_difference(body.scope(), vars);
    n->vars = std::move(vars);
    n->children.push_back(std::move(body));
    return Estimand(std::move(n));
}

Estimand Estimand::product(std::vector<Estimand> factors) {
    auto n = std::make_shared<Node>();
    if (factors.empty()) {
        n->kind = Kind::one;
        return Estimand(std::move(n));
    }
    n->kind = Kind::product;
    for (const auto& f : factors) n->scope.insert(f.scope().begin(), f.scope().end());
    n->children = std::move(factors);
    return Estimand(std::move(n));
}

Estimand Estimand::ratio(Estimand num, Estimand den) {
    if (!is_subset(den.scope(), num.scope()))
        throw PreconditionError("ratio denominator scope exceeds numerator scope");
    auto n = std::make_shared<Node>();
    n->kind = Kind::ratio;
    n->scope = num.scope();
    n->children.push_back(std::move(num));
    n->children.push_back(std::move(den));
    return Estimand(std::move(n));
}

Estimand Estimand::one(NodeSet scope) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::one;
    n->scope = std::move(scope);
    return Estimand(std::move(n));
}

Estimand Estimand::labeled(std::string label) const {
    auto n = std::make_shared<Node>(*node_);
    n->label = std::move(label);
    return Estimand(std::move(n));
}

Estimand::Kind Estimand::kind() const { return node_->kind; }
const NodeSet& Estimand::scope() const { return node_->scope; }
const NodeSet& Estimand::vars() const { return node_->vars; }
const std::vector<Estimand>& Estimand::children() const { return node_->children; }
std::size_t Estimand::input_index() const { return node_->index; }
const std::string& Estimand::label() const { return node_->label; }

namespace {

struct PairHash {
    std::size_t operator()(const std::pair<const void*, const void*>& p) const {
        return std::hash<const void*>()(p.first) * 31 + std::hash<const void*>()(p.second);
    }
};

class EqualityChecker {
public:
    bool equal(const Estimand& a, const Estimand& b) {
        if (a.id() == b.id()) return true;
        auto key = std::make_pair(static_cast<const void*>(a.id()), static_cast<const void*>(b.id()));
        if (auto it = memo_.find(key); it != memo_.end()) return it->second;
        bool result = a.kind() == b.kind() && a.scope() == b.scope() && a.vars() == b.vars() &&
                      a.input_index() == b.input_index() &&
                      a.children().size() == b.children().size();
        for (std::size_t i = 0; result && i < a.children().size(); ++i) {
            result = equal(a.children()[i], b.children()[i]);
        }
        memo_[key] = result;
        return result;
    }

private:
    std::unordered_map<std::pair<const void*, const void*>, bool, PairHash> memo_;
};

}  // namespace

bool structurally_equal(const Estimand& a, const Estimand& b) {
    EqualityChecker checker;
    return checker.equal(a, b);
}

std::size_t dag_size(const Estimand& e) {
    std::unordered_set<const void*> seen;
    std::vector<Estimand> stack{e};
    while (!stack.empty()) {
        Estimand cur = stack.back();
        stack.pop_back();
        if (!seen.insert(cur.id()).second) continue;
        for (const auto& c : cur.children()) stack.push_back(c);
    }
    return seen.size();
}

namespace {

// Keeps `e`'s value but restores a scope that a rewrite narrowed.
Estimand pad_scope(const Estimand& e, const NodeSet& scope) {
    NodeSet missing = set_difference(scope, e.scope());
    if (missing.empty()) return e;
    if (e.kind() == Estimand::Kind::one && e.label().empty()) return Estimand::one(set_union(e.scope(), scope));
    return Estimand::product({e, Estimand::one(std::move(missing))});
}

class Simplifier {
public:
    Estimand run(const Estimand& e) {
        if (auto it = memo_.find(e.id()); it != memo_.end()) return it->second;
        Estimand out = rewrite(e);
        if (!e.label().empty() && out.label().empty()) out = out.labeled(e.label());
        memo_.emplace(e.id(), out);
        return out;
    }

private:
    Estimand rewrite(const Estimand& e) {
        switch (e.kind()) {
            case Estimand::Kind::input:
            case Estimand::Kind::one:
                return e;
            case Estimand::Kind::sum: {
                Estimand body = run(e.children()[0]);
                NodeSet vars = e.vars();
                if (vars.empty()) return body;
                if (body.kind() == Estimand::Kind::sum && body.label().empty()) {
                    vars = set_union(vars, body.vars());
                    body = body.children()[0];
                }
                return Estimand::sum(std::move(vars), pad_scope(body, set_union(e.scope(), e.vars())));
            }
            case Estimand::Kind::product: {
                std::vector<Estimand> factors;
                flatten(e, factors);
                bool has_ratio = false;
                for (const auto& f : factors) has_ratio |= f.kind() == Estimand::Kind::ratio;
                if (has_ratio) {
                    std::vector<Estimand> nums;
                    std::vector<Estimand> dens;
                    for (const auto& f : factors) {
                        if (f.kind() == Estimand::Kind::ratio) {
                            nums.push_back(f.children()[0]);
                            dens.push_back(f.children()[1]);
                        } else {
                            nums.push_back(f);
                        }
                    }
                    return pad_scope(cancel(std::move(nums), std::move(dens)), e.scope());
                }
                return pad_scope(make_product(std::move(factors)), e.scope());
            }
            case Estimand::Kind::ratio: {
                Estimand num = run(e.children()[0]);
                Estimand den = run(e.children()[1]);
                std::vector<Estimand> nums;
                std::vector<Estimand> dens;
                split(num, nums, dens);
                std::vector<Estimand> den_nums;
                std::vector<Estimand> den_dens;
                split(den, den_nums, den_dens);
                // (a/b) / (c/d) = (a·d) / (b·c)
                nums.insert(nums.end(), den_dens.begin(), den_dens.end());
                dens.insert(dens.end(), den_nums.begin(), den_nums.end());
                return pad_scope(cancel(std::move(nums), std::move(dens)), e.scope());
            }
        }
        return e;
    }

    void flatten(const Estimand& e, std::vector<Estimand>& out) {
        for (const auto& c : e.children()) {
            Estimand s = run(c);
            if (s.kind() == Estimand::Kind::product && s.label().empty()) {
                for (const auto& g : s.children()) out.push_back(g);
            } else {
                out.push_back(s);
            }
        }
    }

    // Splits an already simplified expression into numerator and
    // denominator factor lists.
    void split(const Estimand& e, std::vector<Estimand>& nums, std::vector<Estimand>& dens) {
        if (e.kind() == Estimand::Kind::ratio && e.label().empty()) {
            split_product(e.children()[0], nums);
            split_product(e.children()[1], dens);
        } else {
            split_product(e, nums);
        }
    }

    void split_product(const Estimand& e, std::vector<Estimand>& out) {
        if (e.kind() == Estimand::Kind::product && e.label().empty()) {
            out.insert(out.end(), e.children().begin(), e.children().end());
        } else {
            out.push_back(e);
        }
    }

    Estimand make_product(std::vector<Estimand> factors) {
        NodeSet scope;
        for (const auto& f : factors) scope.insert(f.scope().begin(), f.scope().end());
        NodeSet kept_scope;
        std::vector<Estimand> kept;
        for (const auto& f : factors) {
            if (f.kind() == Estimand::Kind::one) continue;
            kept_scope.insert(f.scope().begin(), f.scope().end());
            kept.push_back(f);
        }
        if (kept.empty()) return Estimand::one(std::move(scope));
        Estimand out = kept.size() == 1 ? kept.front() : Estimand::product(std::move(kept));
        return pad_scope(out, scope);
    }

    Estimand cancel(std::vector<Estimand> nums, std::vector<Estimand> dens) {
        NodeSet scope;
        for (const auto& f : nums) scope.insert(f.scope().begin(), f.scope().end());
        std::vector<char> den_used(dens.size(), 0);
        std::vector<Estimand> kept_nums;
        for (const auto& n : nums) {
            bool cancelled = false;
            for (std::size_t j = 0; j < dens.size() && !cancelled; ++j) {
                if (!den_used[j] && checker_.equal(n, dens[j])) {
                    den_used[j] = 1;
                    cancelled = true;
                }
            }
            if (!cancelled) kept_nums.push_back(n);
        }
        std::vector<Estimand> kept_dens;
        for (std::size_t j = 0; j < dens.size(); ++j) {
            if (!den_used[j]) kept_dens.push_back(dens[j]);
        }
        Estimand num = make_product(std::move(kept_nums));
        if (kept_dens.empty()) return pad_scope(num, scope);
        Estimand den = make_product(std::move(kept_dens));
        return pad_scope(Estimand::ratio(pad_scope(num, den.scope()), den), scope);
    }

    std::unordered_map<const void*, Estimand> memo_;
    EqualityChecker checker_;
};

std::string join(const NodeSet& s) {
    std::string out;
    for (const auto& v : s) {
        if (!out.empty()) out += ",";
        out += v;
    }
    return out;
}

class TextRenderer {
public:
    explicit TextRenderer(bool use_labels) : use_labels_(use_labels) {}

    std::string render(const Estimand& e, bool is_definition_root = false) {
        if (use_labels_ && !is_definition_root && !e.label().empty()) {
            if (!defined_.count(e.label())) {
                defined_.insert(e.label());
                std::string def = render(e, true);
                definitions_.emplace_back(e.label(), std::move(def));
            }
            return e.label();
        }
        switch (e.kind()) {
            case Estimand::Kind::input:
                return "Q[" + join(e.vars()) + "]";
            case Estimand::Kind::one:
                return "1";
            case Estimand::Kind::sum: {
                const Estimand& body = e.children()[0];
                std::string inner = render(body);
                if (needs_parens_in_sum(body)) inner = "(" + inner + ")";
                return "Σ_{" + join(e.vars()) + "} " + inner;
            }
            case Estimand::Kind::product: {
                std::string out;
                const auto& kids = e.children();
                for (std::size_t i = 0; i < kids.size(); ++i) {
                    std::string part = render(kids[i]);
                    bool last = i + 1 == kids.size();
                    if (needs_parens_in_product(kids[i], last)) part = "(" + part + ")";
                    if (i) out += " · ";
                    out += part;
                }
                return out;
            }
            case Estimand::Kind::ratio: {
                std::string num = render(e.children()[0]);
                std::string den = render(e.children()[1]);
                if (is_ratio(e.children()[0])) num = "(" + num + ")";
                if (is_ratio(e.children()[1]) || is_product(e.children()[1])) den = "(" + den + ")";
                return num + " / " + den;
            }
        }
        return {};
    }

    std::vector<std::pair<std::string, std::string>> take_definitions() { return std::move(definitions_); }

private:
    bool shown_by_label(const Estimand& e) const { return use_labels_ && !e.label().empty(); }
    bool is_ratio(const Estimand& e) const { return !shown_by_label(e) && e.kind() == Estimand::Kind::ratio; }
    bool is_product(const Estimand& e) const { return !shown_by_label(e) && e.kind() == Estimand::Kind::product; }
    bool needs_parens_in_sum(const Estimand& body) const { return is_ratio(body); }
    bool needs_parens_in_product(const Estimand& f, bool last) const {
        if (shown_by_label(f)) return false;
        if (f.kind() == Estimand::Kind::ratio || f.kind() == Estimand::Kind::product) return true;
        return f.kind() == Estimand::Kind::sum && !last;
    }

    bool use_labels_;
    std::set<std::string> defined_;
    std::vector<std::pair<std::string, std::string>> definitions_;
};

}  // namespace

Estimand simplify(const Estimand& e) {
    Simplifier s;
    return s.run(e);
}

std::string to_text(const Estimand& e) {
    TextRenderer r(false);
    return r.render(e);
}

LabeledText to_labeled_text(const Estimand& e) {
    TextRenderer r(true);
    LabeledText out;
    out.expression = r.render(e, true);
    out.definitions = r.take_definitions();
    return out;
}

nlohmann::json to_json(const Estimand& e) {
    nlohmann::json j;
    switch (e.kind()) {
        case Estimand::Kind::input:
            j["kind"] = "input";
            j["index"] = e.input_index();
            j["set"] = e.vars();
            break;
        case Estimand::Kind::one:
            j["kind"] = "one";
            j["scope"] = e.scope();
            break;
        case Estimand::Kind::sum:
            j["kind"] = "sum";
            j["over"] = e.vars();
            j["body"] = to_json(e.children()[0]);
            break;
        case Estimand::Kind::product: {
            j["kind"] = "prod";
            auto factors = nlohmann::json::array();
            for (const auto& c : e.children()) factors.push_back(to_json(c));
            j["factors"] = std::move(factors);
            break;
        }
        case Estimand::Kind::ratio:
            j["kind"] = "ratio";
            j["num"] = to_json(e.children()[0]);
            j["den"] = to_json(e.children()[1]);
            break;
    }
    if (!e.label().empty()) j["label"] = e.label();
    return j;
}

}  // namespace cgid
