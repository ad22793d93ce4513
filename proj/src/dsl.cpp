#include "cgid/dsl.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <sstream>

#include "cgid/error.hpp"

namespace cgid {

namespace {

enum class Tok { ident, lbrace, rbrace, colon, semi, comma, arrow, biarrow, equals, end };

struct Token {
    Tok kind;
    std::string text;
    std::size_t line;
    std::size_t column;
};

const char* describe(Tok t) {
    switch (t) {
        case Tok::ident: return "name";
        case Tok::lbrace: return "'{'";
        case Tok::rbrace: return "'}'";
        case Tok::colon: return "':'";
        case Tok::semi: return "';'";
        case Tok::comma: return "','";
        case Tok::arrow: return "'->'";
        case Tok::biarrow: return "'<->'";
        case Tok::equals: return "'='";
        case Tok::end: return "end of input";
    }
    return "?";
}

std::vector<Token> lex(std::string_view text) {
    std::vector<Token> out;
    std::size_t line = 1, col = 1, i = 0;
    auto advance = [&](std::size_t n) {
        for (std::size_t k = 0; k < n; ++k) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
            ++i;
        }
    };
    while (i < text.size()) {
        const char c = text[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            advance(1);
            continue;
        }
        if (c == '#') {
            while (i < text.size() && text[i] != '\n') advance(1);
            continue;
        }
        const std::size_t l = line, cc = col;
        if (std::isalnum(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t j = i;
            while (j < text.size() && (std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == '_')) ++j;
            out.push_back({Tok::ident, std::string(text.substr(i, j - i)), l, cc});
            advance(j - i);
            continue;
        }
        if (text.substr(i, 3) == "<->") {
            out.push_back({Tok::biarrow, "<->", l, cc});
            advance(3);
            continue;
        }
        if (text.substr(i, 2) == "->") {
            out.push_back({Tok::arrow, "->", l, cc});
            advance(2);
            continue;
        }
        Tok kind;
        switch (c) {
            case '{': kind = Tok::lbrace; break;
            case '}': kind = Tok::rbrace; break;
            case ':': kind = Tok::colon; break;
            case ';': kind = Tok::semi; break;
            case ',': kind = Tok::comma; break;
            case '=': kind = Tok::equals; break;
            default: throw ParseError(l, cc, std::string("unexpected character '") + c + "'");
        }
        out.push_back({kind, std::string(1, c), l, cc});
        advance(1);
    }
    out.push_back({Tok::end, "", line, col});
    return out;
}

bool is_reserved(const std::string& name) {
    return name == "graph" || name == "nodes" || name == "latent" || name == "V";
}

class Cursor {
public:
    explicit Cursor(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

    const Token& peek(std::size_t ahead = 0) const {
        return tokens_[std::min(pos_ + ahead, tokens_.size() - 1)];
    }
    bool at(Tok kind) const { return peek().kind == kind; }
    const Token& take() {
        const Token& t = tokens_[pos_];
        if (pos_ + 1 < tokens_.size()) ++pos_;
        return t;
    }
    const Token& expect(Tok kind) {
        if (!at(kind)) fail(std::string("expected ") + describe(kind) + ", found " + found());
        return take();
    }
    const Token& expect_keyword(const char* word) {
        if (!at(Tok::ident) || peek().text != word) fail(std::string("expected '") + word + "', found " + found());
        return take();
    }
    [[noreturn]] void fail(const std::string& message) const {
        throw ParseError(peek().line, peek().column, message);
    }

private:
    std::string found() const {
        if (peek().kind == Tok::ident) return "'" + peek().text + "'";
        return describe(peek().kind);
    }

    std::vector<Token> tokens_;
    std::size_t pos_ = 0;
};

[[noreturn]] void fail_at(const Token& t, const std::string& message) {
    throw ParseError(t.line, t.column, message);
}

std::string name_checked(const Token& t) {
    if (is_reserved(t.text)) fail_at(t, "'" + t.text + "' is a reserved name");
    if (!is_valid_node_id(t.text)) fail_at(t, "invalid name '" + t.text + "'");
    return t.text;
}

}  // namespace

CausalGraph GraphDoc::to_graph() const {
    RawLatentGraph raw;
    raw.observed = NodeSet(nodes.begin(), nodes.end());
    raw.directed = directed;
    for (const auto& lat : latents) {
        raw.latent.insert(lat.name);
        for (const auto& child : lat.children) raw.directed.emplace_back(lat.name, child);
    }
    const CausalGraph projected = latent_project(raw);
    std::set<BidirectedEdge> bi = projected.bidirected();
    for (const auto& [a, b] : bidirected) bi.insert(make_bidirected(a, b));
    return CausalGraph(raw.observed, directed, std::vector<BidirectedEdge>(bi.begin(), bi.end()));
}

GraphDoc parse_graph_doc(std::string_view text) {
    Cursor cur(lex(text));
    GraphDoc doc;
    std::map<NodeId, const Token*> declared;
    std::map<NodeId, const Token*> latent_names;
    // Every node reference with its token, checked once all declarations
    // are known.
    std::vector<const Token*> references;
    std::map<DirectedEdge, const Token*> directed_at;
    std::set<BidirectedEdge> bidirected_seen;

    cur.expect_keyword("graph");
    cur.expect(Tok::lbrace);
    while (!cur.at(Tok::rbrace)) {
        if (cur.at(Tok::end)) cur.fail("expected '}', found end of input");
        const Token& head = cur.expect(Tok::ident);
        if (head.text == "nodes" && cur.at(Tok::colon)) {
            cur.take();
            while (!cur.at(Tok::semi)) {
                if (cur.at(Tok::comma)) {
                    cur.take();
                    continue;
                }
                const Token& t = cur.expect(Tok::ident);
                const NodeId name = name_checked(t);
                if (declared.count(name)) fail_at(t, "node '" + name + "' declared twice");
                declared[name] = &t;
                doc.nodes.push_back(name);
            }
            cur.take();
            continue;
        }
        if (head.text == "latent" && cur.at(Tok::ident)) {
            const Token& t = cur.take();
            GraphDoc::Latent lat{name_checked(t), {}};
            if (latent_names.count(lat.name)) fail_at(t, "latent '" + lat.name + "' declared twice");
            latent_names[lat.name] = &t;
            cur.expect(Tok::arrow);
            while (!cur.at(Tok::semi)) {
                if (cur.at(Tok::comma)) {
                    cur.take();
                    continue;
                }
                const Token& c = cur.expect(Tok::ident);
                if (std::find(lat.children.begin(), lat.children.end(), c.text) != lat.children.end())
                    fail_at(c, "duplicate edge " + lat.name + " -> " + c.text);
                references.push_back(&c);
                lat.children.push_back(c.text);
            }
            cur.take();
            if (lat.children.empty()) fail_at(t, "latent '" + lat.name + "' has no children");
            doc.latents.push_back(std::move(lat));
            continue;
        }
        // Edge chain: A -> B <-> C ... ;
        const Token* left = &head;
        references.push_back(left);
        if (!cur.at(Tok::arrow) && !cur.at(Tok::biarrow)) cur.fail("expected '->' or '<->' after '" + head.text + "'");
        while (cur.at(Tok::arrow) || cur.at(Tok::biarrow)) {
            const Token& op = cur.take();
            const Token& right = cur.expect(Tok::ident);
            references.push_back(&right);
            if (left->text == right.text) fail_at(op, "self-loop on '" + right.text + "'");
            if (op.kind == Tok::arrow) {
                DirectedEdge e{left->text, right.text};
                if (directed_at.count(e)) fail_at(op, "duplicate edge " + e.first + " -> " + e.second);
                directed_at[e] = &op;
                doc.directed.push_back(e);
            } else {
                BidirectedEdge e = make_bidirected(left->text, right.text);
                if (!bidirected_seen.insert(e).second)
                    fail_at(op, "duplicate edge " + e.first + " <-> " + e.second);
                doc.bidirected.push_back(e);
            }
            left = &right;
        }
        cur.expect(Tok::semi);
    }
    cur.take();
    cur.expect(Tok::end);

    for (const auto& [name, t] : latent_names) {
        if (declared.count(name)) fail_at(*t, "latent '" + name + "' clashes with an observed node");
    }
    for (const Token* t : references) {
        if (!declared.count(t->text)) fail_at(*t, "unknown node '" + t->text + "'");
    }
    const auto cycle = find_directed_cycle(NodeSet(doc.nodes.begin(), doc.nodes.end()), doc.directed);
    if (!cycle.empty()) {
        std::string walk;
        for (std::size_t k = 0; k < cycle.size(); ++k) walk += (k ? " -> " : "") + cycle[k];
        fail_at(*directed_at.at({cycle[0], cycle[1]}), "directed cycle: " + walk);
    }
    return doc;
}

CausalGraph parse_graph(std::string_view text) { return parse_graph_doc(text).to_graph(); }

std::string render_graph(const CausalGraph& g) {
    std::ostringstream out;
    out << "graph {\n  nodes:";
    for (const auto& v : g.observed()) out << ' ' << v;
    out << ";\n";
    for (const auto& [a, b] : g.directed()) out << "  " << a << " -> " << b << ";\n";
    for (const auto& [a, b] : g.bidirected()) out << "  " << a << " <-> " << b << ";\n";
    out << "}\n";
    return out.str();
}

std::string to_dot(const CausalGraph& g) {
    std::ostringstream out;
    out << "digraph G {\n";
    for (const auto& v : g.observed()) out << "  \"" << v << "\";\n";
    for (const auto& [a, b] : g.directed()) out << "  \"" << a << "\" -> \"" << b << "\";\n";
    for (const auto& [a, b] : g.bidirected())
        out << "  \"" << a << "\" -> \"" << b << "\" [dir=both, style=dashed, constraint=false];\n";
    out << "}\n";
    return out.str();
}

namespace {

// Reads names up to `stop` (or end); braces optional, commas optional.
NodeSet read_list(Cursor& cur, const CausalGraph& g, Tok stop) {
    NodeSet out;
    const bool braced = cur.at(Tok::lbrace);
    if (braced) cur.take();
    while (!(braced ? cur.at(Tok::rbrace) : (cur.at(stop) || cur.at(Tok::end)))) {
        if (cur.at(Tok::comma)) {
            cur.take();
            continue;
        }
        const Token& t = cur.expect(Tok::ident);
        if (t.text == "V") {
            out.insert(g.observed().begin(), g.observed().end());
        } else if (g.has_node(t.text)) {
            out.insert(t.text);
        } else {
            fail_at(t, "unknown node '" + t.text + "'");
        }
    }
    if (braced) cur.take();
    return out;
}

}  // namespace

NodeSet parse_node_list(std::string_view text, const CausalGraph& g) {
    Cursor cur(lex(text));
    NodeSet out = read_list(cur, g, Tok::end);
    cur.expect(Tok::end);
    return out;
}

QSpec parse_spec(std::string_view text, const CausalGraph& g) {
    Cursor cur(lex(text));
    QSpec spec;
    while (!cur.at(Tok::end)) {
        if (cur.at(Tok::semi)) {
            cur.take();
            continue;
        }
        const Token& start = cur.peek();
        std::string label = "A" + std::to_string(spec.entries.size());
        if (cur.at(Tok::ident) && cur.peek(1).kind == Tok::equals) {
            label = cur.take().text;
            cur.take();
        }
        NodeSet set = read_list(cur, g, Tok::semi);
        if (set.empty()) fail_at(start, "empty input set");
        for (const auto& e : spec.entries) {
            if (e.label == label) fail_at(start, "duplicate label '" + label + "'");
            if (e.set == set) fail_at(start, "duplicate input set " + to_string(set));
        }
        spec.entries.push_back({label, std::move(set)});
        if (!cur.at(Tok::end)) cur.expect(Tok::semi);
    }
    if (spec.entries.empty()) throw ParseError(1, 1, "no input sets");
    return spec;
}

std::string render_spec(const QSpec& spec) {
    std::string out;
    for (std::size_t i = 0; i < spec.entries.size(); ++i) {
        if (i) out += "; ";
        out += spec.entries[i].label + "=" + to_string(spec.entries[i].set);
    }
    return out;
}

}  // namespace cgid
