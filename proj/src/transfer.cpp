#include "uspread/transfer.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <unordered_map>

namespace uspread {

PointSet rescale_to_unit_density(const PointSet& set, double d_hat) {
    if (d_hat <= 0.0) throw InputError("rescale_to_unit_density: density must be positive");
    const double f = std::pow(d_hat, 1.0 / set.dim());
    Box w{set.window().lo * f, set.window().hi * f};
    return PointSet(set.coords() * f, set.mults(), std::move(w));
}

int GridFlow::interior_cell_count() const {
    return static_cast<int>(grid.interior_cells());
}

std::size_t GridFlow::interior_linear(const GridIndex& i) const {
    std::size_t pos = 0;
    for (int j = 0; j < grid.dim(); ++j)
        pos = pos * static_cast<std::size_t>(grid.int_hi[j] - grid.int_lo[j]) +
              static_cast<std::size_t>(i[j] - grid.int_lo[j]);
    return pos;
}

GridIndex GridFlow::interior_unlinear(std::size_t pos) const {
    GridIndex i(grid.dim());
    for (int j = grid.dim() - 1; j >= 0; --j) {
        std::size_t w = static_cast<std::size_t>(grid.int_hi[j] - grid.int_lo[j]);
        i[j] = grid.int_lo[j] + static_cast<int>(pos % w);
        pos /= w;
    }
    return i;
}

namespace {

// Dinic max-flow with exact rational capacities.
class Dinic {
public:
    explicit Dinic(int n) : adj_(static_cast<std::size_t>(n)) {}

    struct ArcRef {
        int from;
        int index;
    };

    ArcRef add_arc(int u, int v, Rational cap) {
        adj_[static_cast<std::size_t>(u)].push_back(
            Arc{v, static_cast<int>(adj_[static_cast<std::size_t>(v)].size()), cap, cap});
        adj_[static_cast<std::size_t>(v)].push_back(
            Arc{u, static_cast<int>(adj_[static_cast<std::size_t>(u)].size()) - 1, Rational(0),
                Rational(0)});
        return ArcRef{u, static_cast<int>(adj_[static_cast<std::size_t>(u)].size()) - 1};
    }

    Rational flow_on(const ArcRef& ref) const {
        const Arc& a = adj_[static_cast<std::size_t>(ref.from)][static_cast<std::size_t>(ref.index)];
        return a.initial - a.cap;
    }

    Rational max_flow(int s, int t) {
        Rational total(0);
        while (bfs(s, t)) {
            iter_.assign(adj_.size(), 0);
            while (true) {
                Rational pushed = dfs(s, t, Rational(-1));
                if (pushed.is_zero()) break;
                total += pushed;
            }
        }
        return total;
    }

private:
    struct Arc {
        int to;
        int rev;
        Rational cap;
        Rational initial;
    };

    bool bfs(int s, int t) {
        level_.assign(adj_.size(), -1);
        std::vector<int> queue{s};
        level_[static_cast<std::size_t>(s)] = 0;
        for (std::size_t qi = 0; qi < queue.size(); ++qi) {
            int u = queue[qi];
            for (const Arc& a : adj_[static_cast<std::size_t>(u)]) {
                if (a.cap.is_zero() || a.cap < Rational(0)) continue;
                if (level_[static_cast<std::size_t>(a.to)] != -1) continue;
                level_[static_cast<std::size_t>(a.to)] = level_[static_cast<std::size_t>(u)] + 1;
                queue.push_back(a.to);
            }
        }
        return level_[static_cast<std::size_t>(t)] != -1;
    }

    // limit < 0 means unlimited
    Rational dfs(int u, int t, Rational limit) {
        if (u == t) return limit;
        for (std::size_t& i = iter_[static_cast<std::size_t>(u)];
             i < adj_[static_cast<std::size_t>(u)].size(); ++i) {
            Arc& a = adj_[static_cast<std::size_t>(u)][i];
            if (a.cap.is_zero() || a.cap < Rational(0)) continue;
            if (level_[static_cast<std::size_t>(a.to)] !=
                level_[static_cast<std::size_t>(u)] + 1)
                continue;
            Rational pass = (limit < Rational(0) || a.cap < limit) ? a.cap : limit;
            Rational got = dfs(a.to, t, pass);
            if (got.is_zero()) continue;
            a.cap -= got;
            adj_[static_cast<std::size_t>(a.to)][static_cast<std::size_t>(a.rev)].cap += got;
            return got;
        }
        return Rational(0);
    }

    std::vector<std::vector<Arc>> adj_;
    std::vector<int> level_;
    std::vector<std::size_t> iter_;
};

struct FlowNetworkResult {
    bool feasible = false;
    std::vector<Rational> edge_values;  // per GridFlow edge, signed transfer
};

} // namespace

GridFlow solve_fractional_transfers(const CubeGrid& grid, long long target) {
    if (target <= 0) throw InputError("solve_fractional_transfers: target must be positive");
    GridFlow flow;
    flow.grid = grid;
    flow.target = target;

    const int d = grid.dim();
    const int n_interior = static_cast<int>(grid.interior_cells());
    if (n_interior <= 0) throw InputError("solve_fractional_transfers: empty interior");

    flow.excess.resize(static_cast<std::size_t>(n_interior));
    long long sum_excess = 0;
    for (int u = 0; u < n_interior; ++u) {
        GridIndex iu = flow.interior_unlinear(static_cast<std::size_t>(u));
        flow.excess[static_cast<std::size_t>(u)] = grid.count(iu) - target;
        sum_excess += flow.excess[static_cast<std::size_t>(u)];
    }
    flow.has_slack = sum_excess != 0;
    flow.slack_id = flow.has_slack ? n_interior : -1;

    FlowGraph g(n_interior + (flow.has_slack ? 1 : 0));
    std::vector<bool> is_slack;
    // cell-cell edges at l_inf index distance 1, canonical orientation: lower
    // linear id -> higher
    {
        GridIndex off(d);
        for (int u = 0; u < n_interior; ++u) {
            GridIndex iu = flow.interior_unlinear(static_cast<std::size_t>(u));
            std::function<void(int)> visit = [&](int at) {
                if (at == d) {
                    if ((off.array() == 0).all()) return;
                    GridIndex iv = iu + off;
                    if (!((iv.array() >= grid.int_lo.array()).all() &&
                          (iv.array() < grid.int_hi.array()).all()))
                        return;
                    std::size_t v = flow.interior_linear(iv);
                    if (v <= static_cast<std::size_t>(u)) return;
                    g.add_edge(u, static_cast<int>(v), Rational(0));
                    is_slack.push_back(false);
                    return;
                }
                for (int o = -1; o <= 1; ++o) {
                    off[at] = o;
                    visit(at + 1);
                }
            };
            visit(0);
        }
    }
    const int n_grid_edges = g.edge_count();
    if (flow.has_slack) {
        for (int u = 0; u < n_interior; ++u) {
            GridIndex iu = flow.interior_unlinear(static_cast<std::size_t>(u));
            bool outer = false;
            for (int j = 0; j < d; ++j)
                outer = outer || iu[j] == grid.int_lo[j] || iu[j] == grid.int_hi[j] - 1;
            if (outer) {
                g.add_edge(u, flow.slack_id, Rational(0));
                is_slack.push_back(true);
            }
        }
    }
    flow.graph = g;
    flow.edge_is_slack = is_slack;

    // Feasibility of a bound lambda on cell-cell transfers, by max-flow. Slack
    // edges only run with the sign of the total mismatch, capped at `target`.
    long long needed = std::max(0ll, -sum_excess);
    for (long long e : flow.excess) needed += std::max(0ll, e);

    auto probe = [&](const Rational& lambda, bool extract) {
        FlowNetworkResult out;
        const int S = g.vertex_count();
        const int T = S + 1;
        Dinic dinic(S + 2);
        std::vector<std::pair<Dinic::ArcRef, Dinic::ArcRef>> grid_arcs;
        std::vector<Dinic::ArcRef> slack_arcs;
        for (int id = 0; id < g.edge_count(); ++id) {
            const EdgePair& e = g.edge(id);
            if (!is_slack[static_cast<std::size_t>(id)]) {
                auto a1 = dinic.add_arc(e.u, e.v, lambda);
                auto a2 = dinic.add_arc(e.v, e.u, lambda);
                grid_arcs.emplace_back(a1, a2);
            } else if (sum_excess > 0) {
                slack_arcs.push_back(dinic.add_arc(e.u, flow.slack_id, Rational(target)));
            } else {
                slack_arcs.push_back(dinic.add_arc(flow.slack_id, e.u, Rational(target)));
            }
        }
        for (int u = 0; u < n_interior; ++u) {
            long long e = flow.excess[static_cast<std::size_t>(u)];
            if (e > 0) dinic.add_arc(S, u, Rational(e));
            if (e < 0) dinic.add_arc(u, T, Rational(-e));
        }
        if (sum_excess > 0) dinic.add_arc(flow.slack_id, T, Rational(sum_excess));
        if (sum_excess < 0) dinic.add_arc(S, flow.slack_id, Rational(-sum_excess));

        Rational value = dinic.max_flow(S, T);
        out.feasible = value == Rational(needed);
        if (out.feasible && extract) {
            out.edge_values.resize(static_cast<std::size_t>(g.edge_count()));
            std::size_t gi = 0, si = 0;
            for (int id = 0; id < g.edge_count(); ++id) {
                if (!is_slack[static_cast<std::size_t>(id)]) {
                    const auto& [a1, a2] = grid_arcs[gi++];
                    out.edge_values[static_cast<std::size_t>(id)] =
                        dinic.flow_on(a1) - dinic.flow_on(a2);
                } else {
                    Rational f = dinic.flow_on(slack_arcs[si++]);
                    out.edge_values[static_cast<std::size_t>(id)] = sum_excess > 0 ? f : -f;
                }
            }
        }
        return out;
    };

    // Minimal integer bound first.
    Rational bound(0);
    if (!probe(Rational(0), false).feasible) {
        long long hi = 1;
        long long hi_cap = 1;
        for (long long e : flow.excess) hi_cap += std::llabs(e);
        while (hi <= hi_cap && !probe(Rational(hi), false).feasible) hi *= 2;
        if (hi > hi_cap && !probe(Rational(hi_cap), false).feasible)
            throw PlanInfeasible("solve_fractional_transfers: window imbalance exceeds the "
                                 "boundary slack capacity");
        long long lo = hi / 2;  // infeasible
        hi = std::min(hi, hi_cap);
        while (lo + 1 < hi) {
            long long mid = lo + (hi - lo) / 2;
            (probe(Rational(mid), false).feasible ? hi : lo) = mid;
        }
        // Exact rational optimum in (hi-1, hi]: Stern-Brocot descent. The
        // optimum is excess(S)/|cut edges| for some cut, so its denominator is
        // at most the number of cell-cell edges.
        long long base = hi - 1;
        long long an = 0, ad = 1;  // infeasible offset
        long long cn = 1, cd = 1;  // feasible offset
        while (ad + cd <= n_grid_edges) {
            long long mn = an + cn, md = ad + cd;
            if (probe(Rational(base) + Rational(mn, md), false).feasible) {
                cn = mn;
                cd = md;
            } else {
                an = mn;
                ad = md;
            }
        }
        bound = Rational(base) + Rational(cn, cd);
    }

    FlowNetworkResult final = probe(bound, true);
    if (!final.feasible) throw ContractError("solve_fractional_transfers: final probe infeasible");
    for (int id = 0; id < g.edge_count(); ++id)
        flow.graph.set_value(id, final.edge_values[static_cast<std::size_t>(id)]);

    // divergence identity, exactly, at every interior cell
    auto div = flow.graph.divergences();
    for (int u = 0; u < n_interior; ++u)
        if (div[static_cast<std::size_t>(u)] != Rational(flow.excess[static_cast<std::size_t>(u)]))
            throw ContractError("solve_fractional_transfers: divergence identity violated at cell " +
                                std::to_string(u));

    flow.bottleneck = Rational(0);
    for (int id = 0; id < g.edge_count(); ++id)
        if (!is_slack[static_cast<std::size_t>(id)])
            flow.bottleneck = max(flow.bottleneck, flow.graph.edge(id).p.abs());
    return flow;
}

void write_grid_flow(std::ostream& out, const GridFlow& flow) {
    out << "flowgraph v=" << flow.graph.vertex_count() << " e=" << flow.graph.edge_count()
        << "\n";
    out << "# side " << num_to_string(flow.grid.side) << "\n";
    out << "# target " << flow.target << "\n";
    const int n_interior = flow.interior_cell_count();
    for (int u = 0; u < n_interior; ++u) {
        GridIndex i = flow.interior_unlinear(static_cast<std::size_t>(u));
        out << "# cell " << u;
        for (int j = 0; j < flow.grid.dim(); ++j) out << ' ' << i[j];
        out << "\n";
    }
    if (flow.has_slack) out << "# slack " << flow.slack_id << "\n";
    for (const EdgePair& e : flow.graph.edges())
        out << e.u << ' ' << e.v << ' ' << e.p.to_string() << "\n";
}

void write_grid_flow_file(const std::string& path, const GridFlow& flow) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot open output file '" + path + "'");
    write_grid_flow(out, flow);
}

TransferPlan round_transfers(const GridFlow& flow) {
    RoundedFlow rounded = round_flow(flow.graph);
    TransferPlan plan;
    plan.grid = flow.grid;
    plan.target = flow.target;
    plan.has_slack = flow.has_slack;
    plan.slack_id = flow.slack_id;
    plan.graph = std::move(rounded.graph);
    plan.edge_is_slack = flow.edge_is_slack;
    return plan;
}

bool transfer_plan_feasible(const TransferPlan& plan, std::string* why) {
    GridFlow shim;
    shim.grid = plan.grid;
    const int n_interior = static_cast<int>(plan.grid.interior_cells());
    std::vector<long long> load(static_cast<std::size_t>(n_interior), 0);
    for (int id = 0; id < plan.graph.edge_count(); ++id) {
        const EdgePair& e = plan.graph.edge(id);
        long long t = std::llabs(e.p.num());
        if (e.u < n_interior) load[static_cast<std::size_t>(e.u)] += t;
        if (e.v < n_interior) load[static_cast<std::size_t>(e.v)] += t;
    }
    for (int u = 0; u < n_interior; ++u) {
        GridIndex iu = shim.interior_unlinear(static_cast<std::size_t>(u));
        long long p = plan.grid.count(iu);
        if (load[static_cast<std::size_t>(u)] > std::min(p, plan.target)) {
            if (why)
                *why = "sum |t| = " + std::to_string(load[static_cast<std::size_t>(u)]) +
                       " exceeds min(P, target) = " +
                       std::to_string(std::min(p, plan.target)) + " at cube " +
                       format_window(Box{iu.cast<double>(), iu.cast<double>()});
            return false;
        }
    }
    return true;
}

namespace {

struct IndexPairHash {
    std::size_t operator()(const std::pair<GridIndex, GridIndex>& p) const {
        IndexHash h;
        return h(p.first) * 1000003u ^ h(p.second);
    }
};

struct IndexPairEq {
    bool operator()(const std::pair<GridIndex, GridIndex>& a,
                    const std::pair<GridIndex, GridIndex>& b) const {
        IndexEq eq;
        return eq(a.first, b.first) && eq(a.second, b.second);
    }
};

double directional_boundary_ok(const Point& p, const Box& w, const Point& shift, double L) {
    // clearance beyond what the shifted L-ball needs; > 0 means safe
    double c = std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < p.size(); ++j) {
        c = std::min(c, p[j] - (w.lo[j] + std::max(0.0, -shift[j]) + L));
        c = std::min(c, (w.hi[j] - std::max(0.0, shift[j]) - L) - p[j]);
    }
    return c;
}

} // namespace

ShiftTransferSample shift_transfer_sample(const PointSet& set, const CubeGrid& grid,
                                          const GridIndex& x, double L) {
    if (x.size() != grid.dim()) throw InputError("shift_transfer_sample: shift dimension mismatch");
    if (L <= 0.0) throw InputError("shift_transfer_sample: L must be positive");

    ShiftTransferSample sample;
    sample.shift = x;

    const int d = grid.dim();
    const double N = grid.side;
    Point shift = (N * x.cast<double>());

    // valid cube box: cubes all of whose points can be shifted and matched
    // without touching the window boundary
    sample.valid_lo.resize(d);
    sample.valid_hi.resize(d);
    for (int j = 0; j < d; ++j) {
        double lo_edge = grid.window.lo[j] + std::max(0.0, -shift[j]) + L;
        double hi_edge = grid.window.hi[j] - std::max(0.0, shift[j]) - L;
        long long lo = static_cast<long long>(std::ceil((lo_edge - grid.origin[j]) / N));
        while (grid.origin[j] + static_cast<double>(lo) * N < lo_edge) ++lo;
        long long hi = static_cast<long long>(std::floor((hi_edge - grid.origin[j]) / N));
        while (grid.origin[j] + static_cast<double>(hi) * N > hi_edge) --hi;
        sample.valid_lo[j] = std::max(static_cast<int>(lo), grid.cov_lo[j]);
        sample.valid_hi[j] = std::min(static_cast<int>(hi), grid.cov_hi[j]);
    }
    if ((sample.valid_hi.array() <= sample.valid_lo.array()).any()) {
        sample.failure = "no cube clears the |N*x| + L boundary margin";
        return sample;
    }

    // one-sided within-L matching of the shifted core into the set
    std::vector<Point> all = set.expanded();
    std::vector<int> core_ids;
    for (std::size_t k = 0; k < all.size(); ++k)
        if (directional_boundary_ok(all[k], set.window(), shift, L) > 0.0)
            core_ids.push_back(static_cast<int>(k));

    auto matching = detail_match_shifted_within(all, core_ids, shift, L, set.window());
    if (!matching.complete) {
        sample.failure = "no within-L matching for shift; evidence against rough shift "
                         "invariance at this L";
        return sample;
    }
    sample.ok = true;

    // M^x_{j,i}: points of cube j matched into cube i+x
    std::unordered_map<std::pair<GridIndex, GridIndex>, long long, IndexPairHash, IndexPairEq> M;
    for (std::size_t ci = 0; ci < core_ids.size(); ++ci) {
        const Point& a = all[static_cast<std::size_t>(core_ids[ci])];
        const Point& b = all[static_cast<std::size_t>(matching.match_of_core[ci])];
        GridIndex j = cube_index(a, N, grid.origin);
        GridIndex i = cube_index(b, N, grid.origin) - x;
        if ((i.array() == j.array()).all()) continue;  // diagonal carries no transfer
        M[{j, i}] += 1;
        long long dist = (i - j).cwiseAbs().maxCoeff();
        sample.max_support_dist = std::max(sample.max_support_dist, dist);
    }
    sample.support_ok = sample.max_support_dist <= 1;

    auto in_valid = [&](const GridIndex& i) {
        return (i.array() >= sample.valid_lo.array()).all() &&
               (i.array() < sample.valid_hi.array()).all();
    };
    auto m_count = [&](const GridIndex& a, const GridIndex& b) {
        auto it = M.find({a, b});
        return it == M.end() ? 0ll : it->second;
    };

    // p^x_{i,j} = #M_{i,j} - #M_{j,i} on valid pairs with ||i-j|| = 1,
    // canonical orientation: lower covered-linear id first
    std::vector<GridIndex> valid_cells;
    {
        GridIndex cur = sample.valid_lo;
        while (true) {
            valid_cells.push_back(cur);
            int j = d - 1;
            while (j >= 0) {
                if (++cur[j] < sample.valid_hi[j]) break;
                cur[j] = sample.valid_lo[j];
                --j;
            }
            if (j < 0) break;
        }
    }
    GridIndex off(d);
    for (const GridIndex& iu : valid_cells) {
        std::function<void(int)> visit = [&](int at) {
            if (at == d) {
                if ((off.array() == 0).all()) return;
                GridIndex iv = iu + off;
                if (!in_valid(iv)) return;
                std::size_t u = grid.linear(iu), v = grid.linear(iv);
                if (v <= u) return;
                long long pv = m_count(iu, iv) - m_count(iv, iu);
                if (pv != 0) sample.p.emplace_back(u, v, pv);
                return;
            }
            for (int o = -1; o <= 1; ++o) {
                off[at] = o;
                visit(at + 1);
            }
        };
        visit(0);
    }

    // eq residual P_{i+x} - P_i + sum_j p^x_{i,j} where everything is in view
    for (const GridIndex& iu : valid_cells) {
        bool all_neighbors_valid = true;
        long long psum = 0;
        std::function<void(int)> visit = [&](int at) {
            if (at == d) {
                if ((off.array() == 0).all()) return;
                GridIndex iv = iu + off;
                if (!in_valid(iv)) {
                    all_neighbors_valid = false;
                    return;
                }
                psum += m_count(iu, iv) - m_count(iv, iu);
                return;
            }
            for (int o = -1; o <= 1; ++o) {
                off[at] = o;
                visit(at + 1);
            }
        };
        visit(0);
        GridIndex target_cube = iu + x;
        if (!all_neighbors_valid || !grid.in_covered(target_cube)) continue;
        long long residual = grid.count(target_cube) - grid.count(iu) + psum;
        sample.count_residuals.emplace_back(grid.linear(iu), residual);
    }
    return sample;
}

AveragedTransfers average_shift_transfers(const PointSet& set, const CubeGrid& grid, int T,
                                          double L, long long target) {
    if (T < 1) throw InputError("average_shift_transfers: T must be >= 1");
    const int d = grid.dim();

    AveragedTransfers avg;
    avg.T = T;
    avg.max_abs_residual = Rational(0);
    avg.mean_abs_residual = Rational(0);

    std::vector<ShiftTransferSample> samples;
    GridIndex x = GridIndex::Zero(d);
    long long total_shifts = 1;
    for (int j = 0; j < d; ++j) total_shifts *= T;
    for (long long s = 0; s < total_shifts; ++s) {
        long long rem = s;
        for (int j = d - 1; j >= 0; --j) {
            x[j] = static_cast<int>(rem % T);
            rem /= T;
        }
        samples.push_back(shift_transfer_sample(set, grid, x, L));
    }

    avg.valid_lo = GridIndex(d);
    avg.valid_hi = GridIndex(d);
    bool have_valid = false;
    long long ok_count = 0;
    for (const auto& s : samples) {
        if (!s.ok) {
            avg.all_samples_ok = false;
            continue;
        }
        ++ok_count;
        avg.support_ok = avg.support_ok && s.support_ok;
        if (!have_valid) {
            avg.valid_lo = s.valid_lo;
            avg.valid_hi = s.valid_hi;
            have_valid = true;
        } else {
            avg.valid_lo = avg.valid_lo.cwiseMax(s.valid_lo);
            avg.valid_hi = avg.valid_hi.cwiseMin(s.valid_hi);
        }
    }
    if (ok_count == 0) throw PlanInfeasible("average_shift_transfers: no usable sample");

    auto in_common = [&](std::size_t covered_pos) {
        GridIndex i = grid.unlinear(covered_pos);
        return (i.array() >= avg.valid_lo.array()).all() &&
               (i.array() < avg.valid_hi.array()).all();
    };

    std::map<std::pair<std::size_t, std::size_t>, long long> sums;
    for (const auto& s : samples) {
        if (!s.ok) continue;
        for (const auto& [u, v, pv] : s.p)
            if (in_common(u) && in_common(v)) sums[{u, v}] += pv;
    }
    for (const auto& [key, sum] : sums)
        avg.p.emplace_back(key.first, key.second, Rational(sum, ok_count));

    // residuals use pure counts over all T^d shifts
    if (have_valid) {
        std::vector<GridIndex> cells;
        GridIndex cur = avg.valid_lo;
        if ((avg.valid_hi.array() > avg.valid_lo.array()).all()) {
            while (true) {
                cells.push_back(cur);
                int j = d - 1;
                while (j >= 0) {
                    if (++cur[j] < avg.valid_hi[j]) break;
                    cur[j] = avg.valid_lo[j];
                    --j;
                }
                if (j < 0) break;
            }
        }
        Rational sum_abs(0);
        for (const GridIndex& i : cells) {
            long long count_sum = 0;
            bool covered = true;
            GridIndex x2 = GridIndex::Zero(d);
            for (long long s = 0; s < total_shifts && covered; ++s) {
                long long rem = s;
                for (int j = d - 1; j >= 0; --j) {
                    x2[j] = static_cast<int>(rem % T);
                    rem /= T;
                }
                GridIndex ix = i + x2;
                if (!grid.in_covered(ix))
                    covered = false;
                else
                    count_sum += grid.count(ix);
            }
            if (!covered) continue;
            Rational residual = Rational(count_sum, total_shifts) - Rational(target);
            avg.residuals.emplace_back(grid.linear(i), residual);
            avg.max_abs_residual = max(avg.max_abs_residual, residual.abs());
            sum_abs += residual.abs();
        }
        if (!avg.residuals.empty())
            avg.mean_abs_residual = sum_abs / Rational(static_cast<long long>(avg.residuals.size()));
    }
    return avg;
}

} // namespace uspread
