#pragma once

#include <optional>

#include "uspread/flow_graph.hpp"

namespace uspread {

// A simple cycle through the fractional-valued subgraph. steps[k] traverses
// edge `edge_id` from vertices[k] to vertices[(k+1) % size]; `forward` says
// whether that traversal follows the stored orientation (value +p) or the
// implied reverse (value -p). Length >= 3 with pairwise distinct vertices, or
// length 2 through two distinct parallel stored edges.
struct Cycle {
    struct Step {
        int edge_id;
        bool forward;
    };
    std::vector<int> vertices;
    std::vector<Step> steps;
};

// Deterministic search (smallest-id DFS) for a bad cycle: a simple cycle all
// of whose traversed values are non-integer. Self-loop edges never take part.
std::optional<Cycle> find_bad_cycle(const FlowGraph& g);

// Subtracts the minimum traversed fractional part along the cycle direction
// (adding it along the reverses). Preserves every divergence exactly and makes
// at least one traversed edge integer. Throws ContractError if the cycle is
// not bad in g.
FlowGraph eliminate_cycle(FlowGraph g, const Cycle& cycle);

// Rounds the remaining fractional edges assuming they form a forest: each tree
// is processed in BFS order from its smallest vertex, every edge set to floor
// or floor+1 (floor preferred) keeping each processed vertex's divergence
// within distance < 1 of its original value. Fractional self-loops are set to
// their floor (they never affect a divergence). Throws ContractError if the
// fractional subgraph has a cycle.
FlowGraph round_forest(FlowGraph g);

struct RoundedFlow {
    FlowGraph graph;  // all edge values integer

    long long t(int edge_id) const { return graph.edge(edge_id).p.num(); }
};

// Full rounding: bad-cycle elimination until none remain, then forest
// rounding. The result satisfies, exactly:
//   t_e in {floor(p_e), floor(p_e)+1}, t_e = -t_{-e}, and at every vertex with
//   integer divergence, sum_{e in E_v} t_e = R_v (vertices with non-integer
//   divergence end within < 1).
RoundedFlow round_flow(FlowGraph g);

} // namespace uspread
