#include "uspread/matching.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <unordered_map>

namespace uspread {

double point_dist(const Point& a, const Point& b, Norm norm) {
    return norm == Norm::Linf ? linf_dist(a, b) : l2_dist(a, b);
}

namespace {

// Hopcroft-Karp maximum matching on explicit left->right adjacency.
// Returns the matching size; match_left/match_right get -1 for unmatched.
int hopcroft_karp(const std::vector<std::vector<int>>& adj, int n_right,
                  std::vector<int>& match_left, std::vector<int>& match_right) {
    const int n_left = static_cast<int>(adj.size());
    const int INF = std::numeric_limits<int>::max();
    match_left.assign(static_cast<std::size_t>(n_left), -1);
    match_right.assign(static_cast<std::size_t>(n_right), -1);
    std::vector<int> dist(static_cast<std::size_t>(n_left));
    std::vector<int> queue;
    queue.reserve(static_cast<std::size_t>(n_left));

    auto bfs = [&]() {
        queue.clear();
        for (int u = 0; u < n_left; ++u) {
            if (match_left[static_cast<std::size_t>(u)] == -1) {
                dist[static_cast<std::size_t>(u)] = 0;
                queue.push_back(u);
            } else {
                dist[static_cast<std::size_t>(u)] = INF;
            }
        }
        bool reachable = false;
        for (std::size_t qi = 0; qi < queue.size(); ++qi) {
            int u = queue[qi];
            for (int w : adj[static_cast<std::size_t>(u)]) {
                int next = match_right[static_cast<std::size_t>(w)];
                if (next == -1) {
                    reachable = true;
                } else if (dist[static_cast<std::size_t>(next)] == INF) {
                    dist[static_cast<std::size_t>(next)] = dist[static_cast<std::size_t>(u)] + 1;
                    queue.push_back(next);
                }
            }
        }
        return reachable;
    };

    std::function<bool(int)> try_augment = [&](int u) {
        for (int w : adj[static_cast<std::size_t>(u)]) {
            int next = match_right[static_cast<std::size_t>(w)];
            if (next == -1 || (dist[static_cast<std::size_t>(next)] ==
                                   dist[static_cast<std::size_t>(u)] + 1 &&
                               try_augment(next))) {
                match_left[static_cast<std::size_t>(u)] = w;
                match_right[static_cast<std::size_t>(w)] = u;
                return true;
            }
        }
        dist[static_cast<std::size_t>(u)] = INF;
        return false;
    };

    int size = 0;
    while (bfs())
        for (int u = 0; u < n_left; ++u)
            if (match_left[static_cast<std::size_t>(u)] == -1 && try_augment(u)) ++size;
    return size;
}

MatchingResult bottleneck_impl(const std::vector<Point>& A, const std::vector<Point>& B,
                               Norm norm, bool one_sided) {
    const int na = static_cast<int>(A.size());
    const int nb = static_cast<int>(B.size());
    if (!one_sided && na != nb)
        throw InputError("bottleneck_matching: sizes differ (" + std::to_string(na) + " vs " +
                         std::to_string(nb) + ")");
    if (one_sided && na > nb)
        throw InputError("bottleneck_matching: left side larger than right");

    MatchingResult res;
    if (na == 0) {
        res.feasible = true;
        return res;
    }

    Eigen::MatrixXd dist(na, nb);
    std::vector<double> candidates;
    candidates.reserve(static_cast<std::size_t>(na) * static_cast<std::size_t>(nb));
    for (int i = 0; i < na; ++i)
        for (int j = 0; j < nb; ++j) {
            dist(i, j) = point_dist(A[static_cast<std::size_t>(i)],
                                    B[static_cast<std::size_t>(j)], norm);
            candidates.push_back(dist(i, j));
        }
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

    auto feasible_at = [&](double r, std::vector<int>* out_left) {
        std::vector<std::vector<int>> adj(static_cast<std::size_t>(na));
        for (int i = 0; i < na; ++i)
            for (int j = 0; j < nb; ++j)
                if (dist(i, j) <= r) adj[static_cast<std::size_t>(i)].push_back(j);
        std::vector<int> ml, mr;
        int size = hopcroft_karp(adj, nb, ml, mr);
        if (out_left) *out_left = ml;
        return size == na;
    };

    // smallest candidate distance admitting a perfect (left-perfect) matching
    std::size_t lo = 0, hi = candidates.size() - 1;
    if (!feasible_at(candidates[hi], nullptr))
        return res;  // infeasible even with every pair allowed; cannot happen with na<=nb
    while (lo < hi) {
        std::size_t mid = (lo + hi) / 2;
        if (feasible_at(candidates[mid], nullptr))
            hi = mid;
        else
            lo = mid + 1;
    }
    std::vector<int> match_left;
    feasible_at(candidates[lo], &match_left);
    res.feasible = true;
    res.c_star = candidates[lo];
    for (int i = 0; i < na; ++i) res.pairs.emplace_back(i, match_left[static_cast<std::size_t>(i)]);
    return res;
}

} // namespace

MatchingResult bottleneck_matching(const std::vector<Point>& A, const std::vector<Point>& B,
                                   Norm norm) {
    return bottleneck_impl(A, B, norm, false);
}

MatchingResult bottleneck_matching_one_sided(const std::vector<Point>& A,
                                             const std::vector<Point>& B, Norm norm) {
    return bottleneck_impl(A, B, norm, true);
}

namespace {

double boundary_distance(const Point& p, const Box& w) {
    double d = std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < p.size(); ++j)
        d = std::min(d, std::min(p[j] - w.lo[j], w.hi[j] - p[j]));
    return d;
}

} // namespace

WithinBoundMatching detail_match_shifted_within(const std::vector<Point>& all,
                                                const std::vector<int>& core_ids,
                                                const Point& shift, double L,
                                                const Box& bucket_window, Norm norm) {
    const int d = static_cast<int>(shift.size());

    // bucket the candidate side by cells of side L for O(1) neighbourhoods
    std::unordered_map<GridIndex, std::vector<int>, IndexHash, IndexEq> buckets;
    const Point& bucket_origin = bucket_window.lo;
    for (std::size_t k = 0; k < all.size(); ++k)
        buckets[cube_index(all[k], L, bucket_origin)].push_back(static_cast<int>(k));

    std::vector<std::vector<int>> adj(core_ids.size());
    for (std::size_t ci = 0; ci < core_ids.size(); ++ci) {
        Point shifted = all[static_cast<std::size_t>(core_ids[ci])] + shift;
        GridIndex base = cube_index(shifted, L, bucket_origin);
        // cells within one step cover the open l_inf (hence any-norm) ball of radius L
        std::vector<std::pair<double, int>> near;
        GridIndex cell(d);
        std::function<void(int)> visit = [&](int dim_at) {
            if (dim_at == d) {
                auto it = buckets.find(cell);
                if (it == buckets.end()) return;
                for (int id : it->second) {
                    double dd = point_dist(shifted, all[static_cast<std::size_t>(id)], norm);
                    if (dd < L) near.emplace_back(dd, id);
                }
                return;
            }
            for (int off = -1; off <= 1; ++off) {
                cell[dim_at] = base[dim_at] + off;
                visit(dim_at + 1);
            }
        };
        visit(0);
        std::sort(near.begin(), near.end());
        for (const auto& [dd, id] : near) adj[ci].push_back(id);
    }

    WithinBoundMatching out;
    out.candidate_counts.reserve(adj.size());
    for (const auto& list : adj) out.candidate_counts.push_back(static_cast<int>(list.size()));
    std::vector<int> match_right;
    int size = hopcroft_karp(adj, static_cast<int>(all.size()), out.match_of_core, match_right);
    out.complete = size == static_cast<int>(core_ids.size());
    return out;
}

ShiftCheckResult check_shift_invariance(const PointSet& set, const Point& x, double L,
                                        Norm norm) {
    if (x.size() != set.dim()) throw InputError("check_shift_invariance: shift dimension mismatch");
    if (L <= 0.0) throw InputError("check_shift_invariance: bound L must be positive");

    const double shift_norm = x.size() == 0 ? 0.0 : x.cwiseAbs().maxCoeff();
    const double margin = shift_norm + L;

    ShiftCheckResult res;
    res.bound = L;
    res.margin = margin;

    std::vector<Point> all = set.expanded();
    std::vector<int> core_ids;
    for (std::size_t k = 0; k < all.size(); ++k)
        if (boundary_distance(all[k], set.window()) > margin)
            core_ids.push_back(static_cast<int>(k));
    res.core_size = static_cast<long long>(core_ids.size());
    if (core_ids.empty())
        throw InputError("check_shift_invariance: window too small for |x| + L margin " +
                         num_to_string(margin));

    auto matching = detail_match_shifted_within(all, core_ids, x, L, set.window(), norm);
    if (matching.complete) {
        res.holds = true;
        for (std::size_t ci = 0; ci < core_ids.size(); ++ci)
            res.witness.emplace_back(core_ids[ci], matching.match_of_core[ci]);
    } else {
        int best = -1;
        for (std::size_t ci = 0; ci < core_ids.size(); ++ci) {
            if (matching.match_of_core[ci] != -1) continue;
            if (best == -1 || matching.candidate_counts[ci] <
                                  matching.candidate_counts[static_cast<std::size_t>(best)])
                best = static_cast<int>(ci);
        }
        res.violation = all[static_cast<std::size_t>(core_ids[static_cast<std::size_t>(best)])];
        res.violation_candidates = matching.candidate_counts[static_cast<std::size_t>(best)];
    }
    return res;
}

} // namespace uspread
