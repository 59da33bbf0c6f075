#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "uspread/rational.hpp"

namespace uspread {

// One stored edge u->v with value p represents the antisymmetric pair
// {(u->v, p), (v->u, -p)}; antisymmetry is structural, never re-checked.
// Parallel stored edges between the same endpoints are distinct edges.
struct EdgePair {
    int u = 0;
    int v = 0;
    Rational p;
};

class FlowGraph {
public:
    FlowGraph() = default;
    explicit FlowGraph(int vertex_count);

    int vertex_count() const { return n_; }
    int edge_count() const { return static_cast<int>(edges_.size()); }

    int add_edge(int u, int v, Rational p);
    const EdgePair& edge(int id) const { return edges_[static_cast<std::size_t>(id)]; }
    const std::vector<EdgePair>& edges() const { return edges_; }
    void set_value(int id, Rational p) { edges_[static_cast<std::size_t>(id)].p = std::move(p); }

    // R_v = sum of values of edges starting at v (each stored edge contributes
    // +p at u and -p at v; a self-loop contributes nothing).
    std::vector<Rational> divergences() const;

    bool all_integer() const;

private:
    int n_ = 0;
    std::vector<EdgePair> edges_;
};

// Text format:
//   flowgraph v=<n> e=<m>
//   u v p        (edge u->v valued p; reverse edge implied with -p)
// p is decimal text (read exactly) or "a/b". '#' begins a comment line.
FlowGraph read_flow_graph(std::istream& in);
FlowGraph read_flow_graph_file(const std::string& path);
void write_flow_graph(std::ostream& out, const FlowGraph& g);
void write_flow_graph_file(const std::string& path, const FlowGraph& g);

} // namespace uspread
