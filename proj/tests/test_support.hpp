#pragma once

#include <initializer_list>

#include "uspread/flow_graph.hpp"
#include "uspread/generators.hpp"

namespace testsupport {

inline uspread::Point pt(std::initializer_list<double> cs) {
    uspread::Point p(static_cast<Eigen::Index>(cs.size()));
    Eigen::Index j = 0;
    for (double c : cs) p[j++] = c;
    return p;
}

// Random rounding instance: a random integer flow (integer divergences for
// free) with random simple cycles of fractional flow superposed on top, which
// keeps every divergence integer while making edges fractional.
inline uspread::FlowGraph random_flow_graph(std::uint64_t seed, int max_vertices, int max_edges) {
    using uspread::Rational;
    uspread::SplitMix64 rng(seed);
    const int n = 2 + static_cast<int>(rng.next() % static_cast<std::uint64_t>(max_vertices - 1));
    uspread::FlowGraph g(n);

    const int m = 1 + static_cast<int>(rng.next() % static_cast<std::uint64_t>(max_edges));
    for (int e = 0; e < m; ++e) {
        int u = static_cast<int>(rng.next() % static_cast<std::uint64_t>(n));
        int v = static_cast<int>(rng.next() % static_cast<std::uint64_t>(n));
        long long val = static_cast<long long>(rng.next() % 11) - 5;
        g.add_edge(u, v, Rational(val));
    }

    const Rational fractions[] = {Rational(1, 2), Rational(1, 3), Rational(2, 3),
                                  Rational(1, 4), Rational(3, 4), Rational(2, 5),
                                  Rational(5, 7)};
    const int cycles = 1 + static_cast<int>(rng.next() % 6);
    for (int c = 0; c < cycles; ++c) {
        int len = 2 + static_cast<int>(rng.next() % 5);
        std::vector<int> verts;
        for (int k = 0; k < len; ++k)
            verts.push_back(static_cast<int>(rng.next() % static_cast<std::uint64_t>(n)));
        Rational tau = fractions[rng.next() % 7];
        for (int k = 0; k < len; ++k) {
            int a = verts[static_cast<std::size_t>(k)];
            int b = verts[static_cast<std::size_t>((k + 1) % len)];
            if (a == b) continue;
            // reuse an existing edge between a and b if any, else add one
            int found = -1;
            bool forward = true;
            for (int id = 0; id < g.edge_count(); ++id) {
                const uspread::EdgePair& e = g.edge(id);
                if (e.u == a && e.v == b) {
                    found = id;
                    forward = true;
                    break;
                }
                if (e.u == b && e.v == a) {
                    found = id;
                    forward = false;
                    break;
                }
            }
            if (found == -1) {
                g.add_edge(a, b, tau);
            } else {
                const Rational& p = g.edge(found).p;
                g.set_value(found, forward ? p + tau : p - tau);
            }
        }
    }
    return g;
}

} // namespace testsupport
