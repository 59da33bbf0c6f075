#include "uspread/flow_round.hpp"

#include <algorithm>
#include <deque>

namespace uspread {

namespace {

struct Arc {
    int other;
    int edge_id;
    bool forward;
};

// Sorted adjacency over the fractional, non-loop edges.
std::vector<std::vector<Arc>> fractional_adjacency(const FlowGraph& g) {
    std::vector<std::vector<Arc>> adj(static_cast<std::size_t>(g.vertex_count()));
    for (int id = 0; id < g.edge_count(); ++id) {
        const EdgePair& e = g.edge(id);
        if (e.p.is_integer() || e.u == e.v) continue;
        adj[static_cast<std::size_t>(e.u)].push_back(Arc{e.v, id, true});
        adj[static_cast<std::size_t>(e.v)].push_back(Arc{e.u, id, false});
    }
    for (auto& list : adj)
        std::sort(list.begin(), list.end(), [](const Arc& a, const Arc& b) {
            return a.other != b.other ? a.other < b.other : a.edge_id < b.edge_id;
        });
    return adj;
}

Rational traversed_value(const FlowGraph& g, const Cycle::Step& s) {
    const Rational& p = g.edge(s.edge_id).p;
    return s.forward ? p : -p;
}

} // namespace

std::optional<Cycle> find_bad_cycle(const FlowGraph& g) {
    auto adj = fractional_adjacency(g);
    const int n = g.vertex_count();

    std::vector<int> state(static_cast<std::size_t>(n), 0);  // 0 new, 1 on stack, 2 done
    struct Frame {
        int vertex;
        std::size_t next_arc;
        int in_edge;  // edge id used to enter, -1 at root
        bool in_forward;
    };

    for (int root = 0; root < n; ++root) {
        if (state[static_cast<std::size_t>(root)] != 0 ||
            adj[static_cast<std::size_t>(root)].empty())
            continue;
        std::vector<Frame> stack;
        std::vector<int> pos_on_stack(static_cast<std::size_t>(n), -1);
        stack.push_back(Frame{root, 0, -1, true});
        state[static_cast<std::size_t>(root)] = 1;
        pos_on_stack[static_cast<std::size_t>(root)] = 0;

        while (!stack.empty()) {
            Frame& f = stack.back();
            auto& arcs = adj[static_cast<std::size_t>(f.vertex)];
            if (f.next_arc == arcs.size()) {
                state[static_cast<std::size_t>(f.vertex)] = 2;
                pos_on_stack[static_cast<std::size_t>(f.vertex)] = -1;
                stack.pop_back();
                continue;
            }
            const Arc arc = arcs[f.next_arc++];
            if (arc.edge_id == f.in_edge) continue;  // do not re-traverse the entry edge
            int w = arc.other;
            if (state[static_cast<std::size_t>(w)] == 1) {
                // back edge: cycle from w up the stack to f.vertex, closed by arc
                Cycle c;
                int from = pos_on_stack[static_cast<std::size_t>(w)];
                for (std::size_t k = static_cast<std::size_t>(from); k < stack.size(); ++k) {
                    c.vertices.push_back(stack[k].vertex);
                    if (k + 1 < stack.size())
                        c.steps.push_back(Cycle::Step{stack[k + 1].in_edge, stack[k + 1].in_forward});
                }
                c.steps.push_back(Cycle::Step{arc.edge_id, arc.forward});
                return c;
            }
            if (state[static_cast<std::size_t>(w)] == 0) {
                state[static_cast<std::size_t>(w)] = 1;
                pos_on_stack[static_cast<std::size_t>(w)] = static_cast<int>(stack.size());
                stack.push_back(Frame{w, 0, arc.edge_id, arc.forward});
            }
        }
    }
    return std::nullopt;
}

FlowGraph eliminate_cycle(FlowGraph g, const Cycle& cycle) {
    if (cycle.steps.size() < 2)
        throw ContractError("eliminate_cycle: cycle must have at least two steps");
    Rational tau;
    bool first = true;
    for (const auto& s : cycle.steps) {
        Rational q = traversed_value(g, s);
        if (q.is_integer())
            throw ContractError("eliminate_cycle: cycle traverses an integer edge");
        Rational f = q.frac();
        if (first || f < tau) tau = f;
        first = false;
    }
    for (const auto& s : cycle.steps) {
        const Rational& p = g.edge(s.edge_id).p;
        g.set_value(s.edge_id, s.forward ? p - tau : p + tau);
    }
    return g;
}

FlowGraph round_forest(FlowGraph g) {
    // Self-loops never change a divergence; floor keeps them in range.
    for (int id = 0; id < g.edge_count(); ++id) {
        const EdgePair& e = g.edge(id);
        if (e.u == e.v && !e.p.is_integer()) g.set_value(id, Rational(e.p.floor()));
    }

    auto adj = fractional_adjacency(g);
    const int n = g.vertex_count();
    std::vector<Rational> delta(static_cast<std::size_t>(n), Rational(0));
    std::vector<bool> seen(static_cast<std::size_t>(n), false);
    std::vector<bool> edge_done(static_cast<std::size_t>(g.edge_count()), false);

    for (int root = 0; root < n; ++root) {
        if (seen[static_cast<std::size_t>(root)] || adj[static_cast<std::size_t>(root)].empty())
            continue;
        std::deque<int> queue{root};
        seen[static_cast<std::size_t>(root)] = true;
        while (!queue.empty()) {
            int v = queue.front();
            queue.pop_front();
            for (const Arc& arc : adj[static_cast<std::size_t>(v)]) {
                if (edge_done[static_cast<std::size_t>(arc.edge_id)]) continue;
                if (seen[static_cast<std::size_t>(arc.other)])
                    throw ContractError("round_forest: fractional subgraph contains a cycle");
                edge_done[static_cast<std::size_t>(arc.edge_id)] = true;

                // Round the edge v -> arc.other, protecting v's divergence.
                Rational q = arc.forward ? g.edge(arc.edge_id).p : -g.edge(arc.edge_id).p;
                Rational one(1);
                Rational t_floor(q.floor());
                Rational change = t_floor - q;  // in (-1, 0]
                Rational t = t_floor;
                Rational& dv = delta[static_cast<std::size_t>(v)];
                if (!((dv + change).abs() < one)) {
                    t = t_floor + one;
                    change += one;
                }
                if (!((dv + change).abs() < one))
                    throw ContractError("round_forest: no legal rounding choice");
                dv += change;
                delta[static_cast<std::size_t>(arc.other)] -= change;
                g.set_value(arc.edge_id, arc.forward ? t : -t);

                seen[static_cast<std::size_t>(arc.other)] = true;
                queue.push_back(arc.other);
            }
        }
    }
    return g;
}

RoundedFlow round_flow(FlowGraph g) {
    const FlowGraph original = g;

    while (auto cycle = find_bad_cycle(g)) g = eliminate_cycle(std::move(g), *cycle);
    g = round_forest(std::move(g));

    // Verify the rounding identities before handing the result out.
    for (int id = 0; id < g.edge_count(); ++id) {
        const Rational& p0 = original.edge(id).p;
        const Rational& t = g.edge(id).p;
        if (!t.is_integer()) throw ContractError("round_flow: non-integer result edge");
        long long f = p0.floor();
        if (p0.is_integer() ? t.num() != f : (t.num() != f && t.num() != f + 1))
            throw ContractError("round_flow: edge value left its rounding range");
    }
    auto before = original.divergences();
    auto after = g.divergences();
    for (std::size_t v = 0; v < before.size(); ++v) {
        if (before[v].is_integer()) {
            if (after[v] != before[v])
                throw ContractError("round_flow: integer divergence not preserved at vertex " +
                                    std::to_string(v));
        } else if (!((after[v] - before[v]).abs() < Rational(1))) {
            throw ContractError("round_flow: divergence drifted by >= 1 at vertex " +
                                std::to_string(v));
        }
    }
    return RoundedFlow{std::move(g)};
}

} // namespace uspread
