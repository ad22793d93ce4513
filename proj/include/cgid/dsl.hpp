#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "cgid/gid.hpp"
#include "cgid/graph.hpp"

namespace cgid {

/// Parsed graph text before latent projection.
///
///   graph {
///     nodes: X1 X2 Y1;     # observed variables
///     X1 -> Y1;            # chains like A -> B -> C are allowed
///     X1 <-> X2;
///     latent U -> X1 Y1;   # explicit latent; projected to X1 <-> Y1
///   }
struct GraphDoc {
    struct Latent {
        NodeId name;
        std::vector<NodeId> children;
    };

    std::vector<NodeId> nodes;  // declaration order
    std::vector<DirectedEdge> directed;
    std::vector<BidirectedEdge> bidirected;
    std::vector<Latent> latents;

    /// Projects latents to bidirected edges. A bidirected edge stated both
    /// explicitly and through a latent appears once.
    CausalGraph to_graph() const;
};

/// Throws ParseError (with line and column) on syntax errors, unknown or
/// reserved names, duplicate declarations or edges, self-loops and directed
/// cycles.
GraphDoc parse_graph_doc(std::string_view text);
CausalGraph parse_graph(std::string_view text);

/// Canonical text: nodes, directed and bidirected edges each in sorted
/// order. parse_graph(render_graph(g)) == g.
std::string render_graph(const CausalGraph& g);

std::string to_dot(const CausalGraph& g);

/// "X1,X2", "{X1, X2}", "X1 X2" or "" (empty set). `V` stands for every
/// observed node. Throws ParseError on unknown names.
NodeSet parse_node_list(std::string_view text, const CausalGraph& g);

/// "A0=V; A1={Y1,W1}" or, without labels, "V; Y1,W1" (labeled A0, A1, ...).
QSpec parse_spec(std::string_view text, const CausalGraph& g);
std::string render_spec(const QSpec& spec);

}  // namespace cgid
