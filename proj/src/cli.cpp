#include "cgid/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "cgid/cgid.hpp"
#include "cgid/components.hpp"
#include "cgid/dsl.hpp"
#include "cgid/error.hpp"
#include "cgid/model_io.hpp"
#include "cgid/sem.hpp"
#include "cgid/separation.hpp"
#include "cgid/verdict_json.hpp"
#include "cgid/witness.hpp"

namespace cgid {

namespace {

using nlohmann::json;

constexpr int kYes = 0;
constexpr int kError = 1;
constexpr int kNo = 2;

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot read '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

struct GraphArgs {
    std::string file;
    std::string text;

    void add(CLI::App* cmd) {
        auto* f = cmd->add_option("--graph", file, "Graph file in the cgid graph language");
        auto* t = cmd->add_option("--graph-text", text, "Graph given inline");
        f->excludes(t);
    }
    CausalGraph load() const {
        if (file.empty() && text.empty()) throw Error("one of --graph or --graph-text is required");
        const std::string src = file.empty() ? text : read_file(file);
        try {
            return parse_graph(src);
        } catch (const ParseError& e) {
            throw Error((file.empty() ? std::string("graph") : file) + ":" + e.what());
        }
    }
};

struct QueryArgs {
    std::string x, y, z;

    void add(CLI::App* cmd, bool with_z) {
        cmd->add_option("--x", x, "Intervened variables, e.g. X1,X2");
        cmd->add_option("--y", y, "Outcome variables")->required();
        if (with_z) cmd->add_option("--z", z, "Conditioning variables");
    }
    ConditionalQuery load(const CausalGraph& g) const {
        ConditionalQuery q{parse_node_list(x, g), parse_node_list(y, g), parse_node_list(z, g)};
        q.validate(g);
        return q;
    }
};

void print_verdict(std::ostream& out, const Verdict& v, const QSpec& spec, bool conditional) {
    if (conditional) out << "moved to intervention: " << to_string(v.moved_to_intervention) << '\n';
    if (v.identifiable()) {
        const auto& ok = v.identified();
        out << "identifiable\n";
        const LabeledText text = to_labeled_text(ok.estimand);
        out << "estimand: " << text.expression << '\n';
        for (const auto& [label, def] : text.definitions) out << "  " << label << " = " << def << '\n';
        for (const auto& c : ok.chosen_inputs)
            out << "  " << to_string(c.component) << " from " << spec.entries[c.input].label << '\n';
        return;
    }
    const auto& bad = v.failure();
    out << "not identifiable\n";
    out << "failing component: " << to_string(bad.failing_component) << '\n';
    for (const auto& r : bad.reasons) {
        const std::string& label = spec.entries[r.input].label;
        const NodeSet& set = spec.entries[r.input].set;
        if (r.reason == InputFailure::Reason::not_superset) {
            out << "  " << label << " " << to_string(set) << ": does not contain the component\n";
            continue;
        }
        out << "  " << label << " " << to_string(set) << ": stuck at " << to_string(r.stuck_at);
        if (r.hedge) out << "; hedge " << to_string(r.hedge->roots) << " in " << to_string(r.hedge->inner);
        out << '\n';
    }
}

std::string assignment_text(const Assignment& a) {
    std::string s;
    for (const auto& [k, v] : a) s += (s.empty() ? "" : ",") + k + "=" + std::to_string(v);
    return "{" + s + "}";
}

int run(CLI::App& app, const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    app.require_subcommand(1);
    bool as_json = false;

    // dsep
    auto* dsep = app.add_subcommand("dsep", "Test (x ⟂ y | z) by d-separation");
    GraphArgs dsep_graph;
    dsep_graph.add(dsep);
    std::string dx, dy, dz;
    dsep->add_option("--x", dx)->required();
    dsep->add_option("--y", dy)->required();
    dsep->add_option("--z", dz);
    dsep->add_flag("--json", as_json);

    // ccomp
    auto* ccomp = app.add_subcommand("ccomp", "C-components of G[nodes]");
    GraphArgs cc_graph;
    cc_graph.add(ccomp);
    std::string cc_nodes = "V";
    ccomp->add_option("--nodes", cc_nodes, "Subset to split (default: all)");
    ccomp->add_flag("--json", as_json);

    // id / gid / cgid
    GraphArgs id_graph, gid_graph, cgid_graph;
    QueryArgs id_query, gid_query, cgid_query;
    std::string gid_spec, cgid_spec;
    std::size_t hedge_budget = 0;
    bool simplified = false;
    auto* id = app.add_subcommand("id", "Identify P_x(y) from the observational distribution");
    id_graph.add(id);
    id_query.add(id, false);
    auto* gid = app.add_subcommand("gid", "Identify P_x(y) from the given Q[A_i]");
    gid_graph.add(gid);
    gid_query.add(gid, false);
    gid->add_option("--spec", gid_spec, "Available inputs, e.g. \"A0=V; A1=Y1,Z2\"")->required();
    auto* cgid = app.add_subcommand("cgid", "Identify P_x(y | z) from the given Q[A_i]");
    cgid_graph.add(cgid);
    cgid_query.add(cgid, true);
    cgid->add_option("--spec", cgid_spec, "Available inputs")->required();
    for (auto* cmd : {id, gid, cgid}) {
        cmd->add_flag("--json", as_json);
        cmd->add_option("--budget", hedge_budget, "Hedge candidates to examine per input (0: unlimited)");
        cmd->add_flag("--simplify", simplified, "Apply algebraic simplification to the estimand");
    }

    // eval
    auto* eval = app.add_subcommand("eval", "Evaluate the estimand on a model and compare with mutilation");
    GraphArgs eval_graph;
    QueryArgs eval_query;
    std::string eval_spec = "V", model_file;
    std::uint64_t eval_seed = 1;
    int max_card = 2;
    std::size_t eval_budget = kDefaultStateBudget;
    eval_graph.add(eval);
    eval_query.add(eval, true);
    eval->add_option("--spec", eval_spec, "Available inputs (default: V)");
    eval->add_option("--model", model_file, "Model JSON; a random model is drawn when absent");
    eval->add_option("--seed", eval_seed, "Seed of the random model");
    eval->add_option("--max-card", max_card, "Largest domain of the random model")->check(CLI::Range(2, kMaxCard));
    eval->add_option("--budget", eval_budget, "State-space limit");
    eval->add_flag("--json", as_json);

    // witness
    auto* wit = app.add_subcommand("witness", "Search for two models that agree on every input but not on the target");
    GraphArgs wit_graph;
    QueryArgs wit_query;
    std::string wit_spec, wit_out;
    WitnessOptions wopt;
    wit_graph.add(wit);
    wit_query.add(wit, true);
    wit->add_option("--spec", wit_spec, "Available inputs")->required();
    wit->add_option("--seed", wopt.seed);
    wit->add_option("--restarts", wopt.restarts);
    wit->add_option("--time-limit", wopt.time_limit_seconds, "Seconds");
    wit->add_option("--threads", wopt.threads)->check(CLI::PositiveNumber);
    wit->add_option("--budget", wopt.state_budget, "State-space limit");
    wit->add_option("--out", wit_out, "Write both models and the check to this file");
    wit->add_flag("--json", as_json);

    // show
    auto* show = app.add_subcommand("show", "Print the graph in canonical form");
    GraphArgs show_graph;
    bool emit_dot = false;
    show_graph.add(show);
    show->add_flag("--emit-dot", emit_dot, "Graphviz output");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kYes : kError;
    }

    try {
        if (dsep->parsed()) {
            const CausalGraph g = dsep_graph.load();
            const bool sep = d_separated(g, parse_node_list(dx, g), parse_node_list(dy, g), parse_node_list(dz, g));
            if (as_json) {
                out << json{{"separated", sep}}.dump() << '\n';
            } else {
                out << (sep ? "true" : "false") << '\n';
            }
            return sep ? kYes : kNo;
        }
        if (ccomp->parsed()) {
            const CausalGraph g = cc_graph.load();
            const auto comps = c_components(g, parse_node_list(cc_nodes, g));
            if (as_json) {
                json arr = json::array();
                for (const auto& c : comps) arr.push_back(set_to_json(c));
                out << json{{"components", arr}}.dump() << '\n';
            } else {
                for (const auto& c : comps) out << to_string(c) << '\n';
            }
            return kYes;
        }
        if (id->parsed() || gid->parsed() || cgid->parsed()) {
            const bool conditional = cgid->parsed();
            const GraphArgs& ga = id->parsed() ? id_graph : gid->parsed() ? gid_graph : cgid_graph;
            const QueryArgs& qa = id->parsed() ? id_query : gid->parsed() ? gid_query : cgid_query;
            const CausalGraph g = ga.load();
            const ConditionalQuery q = qa.load(g);
            const QSpec spec = id->parsed() ? QSpec::from_sets({g.observed()})
                                            : parse_spec(gid->parsed() ? gid_spec : cgid_spec, g);
            spec.validate(g);
            GidOptions opt;
            opt.hedge.max_candidates = hedge_budget;
            Verdict v = cgid_decide(q, spec, g, opt);
            if (simplified && v.identifiable()) {
                auto& ok = std::get<Identifiable>(v.outcome);
                ok.estimand = simplify(ok.estimand);
            }
            if (as_json) {
                out << verdict_to_json(v, spec).dump(2) << '\n';
            } else {
                print_verdict(out, v, spec, conditional);
            }
            return v.identifiable() ? kYes : kNo;
        }
        if (eval->parsed()) {
            const CausalGraph g = eval_graph.load();
            const ConditionalQuery q = eval_query.load(g);
            const QSpec spec = parse_spec(eval_spec, g);
            spec.validate(g);
            const DiscreteSEM m = model_file.empty() ? random_model(g, eval_seed, max_card)
                                                     : model_from_json(json::parse(read_file(model_file)), g);
            const Verdict v = cgid_decide(q, spec, g);
            if (!v.identifiable()) {
                if (as_json) {
                    out << verdict_to_json(v, spec).dump(2) << '\n';
                } else {
                    print_verdict(out, v, spec, !q.z.empty());
                }
                return kNo;
            }
            std::vector<DistTable> tables;
            for (const auto& entry : spec.entries) tables.push_back(q_eval(m, entry.set, eval_budget));
            EstimandEvaluator ev(std::move(tables));
            const DistTable truth = interventional_family(m, q.x, q.y, q.z, eval_budget);
            json rows = json::array();
            double worst = 0.0;
            std::vector<int> digits(truth.domain.vars().size());
            for (std::size_t i = 0; i < truth.values.size(); ++i) {
                truth.domain.decode(i, digits);
                Assignment a;
                for (std::size_t k = 0; k < digits.size(); ++k) a[truth.domain.vars()[k]] = digits[k];
                Assignment full;
                for (const auto& name : g.observed()) full[name] = a.count(name) ? a[name] : 0;
                const double got = ev.at(v.estimand(), full);
                worst = std::max(worst, std::abs(got - truth.values[i]));
                if (as_json) {
                    json ja = json::object();
                    for (const auto& [k, val] : a) ja[k] = val;
                    rows.push_back({{"at", ja}, {"estimand", got}, {"mutilation", truth.values[i]}});
                } else {
                    out << assignment_text(a) << "  estimand " << std::setprecision(12) << got << "  mutilation "
                        << truth.values[i] << '\n';
                }
            }
            if (as_json) {
                out << json{{"rows", rows}, {"max_abs_error", worst}}.dump(2) << '\n';
            } else {
                out << "max abs error: " << worst << '\n';
            }
            return kYes;
        }
        if (wit->parsed()) {
            const CausalGraph g = wit_graph.load();
            const ConditionalQuery q = wit_query.load(g);
            const QSpec spec = parse_spec(wit_spec, g);
            const auto pair = witness_search(g, spec, q, wopt);
            if (!pair) {
                if (as_json) {
                    out << json{{"found", false}}.dump() << '\n';
                } else {
                    out << "no witness found\n";
                }
                return kNo;
            }
            json j = witness_to_json(*pair);
            if (!wit_out.empty()) {
                std::ofstream f(wit_out);
                if (!f) throw Error("cannot write '" + wit_out + "'");
                f << j.dump(2) << '\n';
            }
            if (as_json) {
                j["found"] = true;
                out << j.dump(2) << '\n';
            } else {
                out << "found model pair (restart " << pair->restart << ")\n"
                    << "input mismatch: " << pair->check.input_mismatch << '\n'
                    << "target gap: " << pair->check.gap << " at " << assignment_text(pair->check.realization)
                    << " (" << pair->check.target_first << " vs " << pair->check.target_second << ")\n";
            }
            return kYes;
        }
        if (show->parsed()) {
            const CausalGraph g = show_graph.load();
            out << (emit_dot ? to_dot(g) : render_graph(g));
            return kYes;
        }
    } catch (const json::exception& e) {
        err << "error: " << e.what() << '\n';
        return kError;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kError;
    }
    return kError;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Causal effect identification from available distributions", "cgid"};
    return run(app, args, out, err);
}

}  // namespace cgid
