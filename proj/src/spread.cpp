#include "uspread/spread.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <functional>
#include <unordered_map>
#include <unordered_set>

namespace uspread {

namespace {

struct PointKeyHash {
    std::size_t operator()(const std::vector<std::uint64_t>& bits) const {
        std::uint64_t h = 1469598103934665603ull;
        for (std::uint64_t b : bits) {
            h ^= b;
            h *= 1099511628211ull;
        }
        return static_cast<std::size_t>(h);
    }
};

std::vector<std::uint64_t> point_key(const Point& p) {
    std::vector<std::uint64_t> bits(static_cast<std::size_t>(p.size()));
    std::memcpy(bits.data(), p.data(), sizeof(double) * bits.size());
    return bits;
}

// l_inf distance from a point to the closed cube [anchor, anchor+side]
double dist_to_cube(const Point& p, const Point& anchor, double side) {
    double d = 0.0;
    for (Eigen::Index j = 0; j < p.size(); ++j) {
        double below = anchor[j] - p[j];
        double above = p[j] - (anchor[j] + side);
        d = std::max(d, std::max(below, above));
    }
    return std::max(d, 0.0);
}

bool index_lex_less(const GridIndex& a, const GridIndex& b) {
    for (Eigen::Index j = 0; j < a.size(); ++j) {
        if (a[j] != b[j]) return a[j] < b[j];
    }
    return false;
}

} // namespace

MovedSet apply_transfers(const PointSet& set, const CubeGrid& grid, const TransferPlan& plan) {
    if (plan.grid.side != grid.side)
        throw InputError("apply_transfers: plan and grid disagree on cube side");
    const int d = grid.dim();
    const double N = grid.side;
    const double margin = N * 1e-3;

    GridFlow shim;  // for interior index helpers
    shim.grid = plan.grid;
    const int n_interior = static_cast<int>(plan.grid.interior_cells());

    MovedSet out;
    out.original = set.expanded();
    out.current = out.original;
    out.moved.assign(out.original.size(), 0);

    // never-moved original units per covered cube
    std::unordered_map<std::size_t, std::vector<int>> pools;
    for (std::size_t k = 0; k < out.original.size(); ++k) {
        GridIndex i = cube_index(out.original[k], N, grid.origin);
        if (grid.in_covered(i)) pools[grid.linear(i)].push_back(static_cast<int>(k));
    }

    std::unordered_set<std::vector<std::uint64_t>, PointKeyHash> occupied;
    for (const Point& p : out.current) occupied.insert(point_key(p));

    // directional transfers (source cube, destination cube, amount), slack as nullopt
    struct Transfer {
        std::optional<GridIndex> src, dst;
        long long amount;
    };
    std::vector<Transfer> transfers;
    for (int id = 0; id < plan.graph.edge_count(); ++id) {
        const EdgePair& e = plan.graph.edge(id);
        long long t = e.p.num();
        if (t == 0) continue;
        bool slack = plan.edge_is_slack[static_cast<std::size_t>(id)];
        auto cube_of = [&](int vid) -> std::optional<GridIndex> {
            if (vid >= n_interior) return std::nullopt;  // slack
            return shim.interior_unlinear(static_cast<std::size_t>(vid));
        };
        std::optional<GridIndex> a = cube_of(e.u), b = slack ? std::nullopt : cube_of(e.v);
        if (t > 0)
            transfers.push_back(Transfer{a, b, t});
        else
            transfers.push_back(Transfer{b, a, -t});
    }
    std::sort(transfers.begin(), transfers.end(), [](const Transfer& a, const Transfer& b) {
        auto key_less = [](const std::optional<GridIndex>& x, const std::optional<GridIndex>& y) {
            if (x.has_value() != y.has_value()) return x.has_value();  // slack sorts last
            if (!x.has_value()) return false;
            return index_lex_less(*x, *y);
        };
        if (key_less(a.src, b.src)) return true;
        if (key_less(b.src, a.src)) return false;
        return key_less(a.dst, b.dst);
    });

    // ring cells: covered but not interior, adjacent to a given interior cell
    auto ring_neighbors = [&](const GridIndex& i) {
        std::vector<GridIndex> out_cells;
        GridIndex off(d);
        std::function<void(int)> visit = [&](int at) {
            if (at == d) {
                if ((off.array() == 0).all()) return;
                GridIndex n_i = i + off;
                if (grid.in_covered(n_i) && !grid.in_interior(n_i)) out_cells.push_back(n_i);
                return;
            }
            for (int o = -1; o <= 1; ++o) {
                off[at] = o;
                visit(at + 1);
            }
        };
        visit(0);
        std::sort(out_cells.begin(), out_cells.end(), index_lex_less);
        return out_cells;
    };

    auto place_into = [&](const Point& p, const GridIndex& dst) {
        Point anchor = grid.origin + N * dst.cast<double>();
        Point target(d);
        for (int j = 0; j < d; ++j)
            target[j] = std::clamp(p[j], anchor[j] + margin, anchor[j] + N - margin);
        int attempt = 0;
        Point candidate = target;
        while (occupied.count(point_key(candidate))) {
            ++attempt;
            if (attempt > 100000)
                throw ContractError("apply_transfers: cannot find a free position");
            double w = N - 2.0 * margin;
            double base = target[0] - (anchor[0] + margin);
            candidate[0] = anchor[0] + margin +
                           std::fmod(base + static_cast<double>(attempt) * margin * 0.6180339887,
                                     w);
        }
        occupied.insert(point_key(candidate));
        return candidate;
    };

    auto move_unit = [&](int unit, const GridIndex& from_cube, const GridIndex& to_cube) {
        Point from = out.current[static_cast<std::size_t>(unit)];
        Point to = place_into(from, to_cube);
        double disp = linf_dist(from, to);
        if (!(disp <= 2.0 * N))
            throw ContractError("apply_transfers: move displacement exceeds 2N");
        out.current[static_cast<std::size_t>(unit)] = to;
        out.moved[static_cast<std::size_t>(unit)] = 1;
        out.log.push_back(MoveRecord{unit, from_cube, to_cube, from, to, disp});
    };

    // picks the `amount` units of `pool` nearest to cube `toward` (ties by id)
    auto select_nearest = [&](std::vector<int>& pool, const GridIndex& toward, long long amount) {
        Point anchor = grid.origin + N * toward.cast<double>();
        std::vector<std::pair<double, int>> ranked;
        ranked.reserve(pool.size());
        for (int unit : pool)
            ranked.emplace_back(dist_to_cube(out.current[static_cast<std::size_t>(unit)], anchor, N),
                                unit);
        std::sort(ranked.begin(), ranked.end());
        std::vector<int> chosen;
        for (long long k = 0; k < amount; ++k) chosen.push_back(ranked[static_cast<std::size_t>(k)].second);
        for (int unit : chosen) pool.erase(std::find(pool.begin(), pool.end(), unit));
        return chosen;
    };

    for (const Transfer& tr : transfers) {
        if (tr.src && tr.dst) {
            auto& pool = pools[grid.linear(*tr.src)];
            if (static_cast<long long>(pool.size()) < tr.amount)
                throw PlanInfeasible("apply_transfers: pool exhausted at cube " +
                                     format_window(Box{tr.src->cast<double>(), tr.src->cast<double>()}));
            for (int unit : select_nearest(pool, *tr.dst, tr.amount))
                move_unit(unit, *tr.src, *tr.dst);
        } else if (tr.src && !tr.dst) {
            // export: push into the adjacent ring, each unit to its nearest ring cube
            auto ring = ring_neighbors(*tr.src);
            if (ring.empty())
                throw PlanInfeasible("apply_transfers: no ring cube adjacent to exporting cube");
            auto& pool = pools[grid.linear(*tr.src)];
            if (static_cast<long long>(pool.size()) < tr.amount)
                throw PlanInfeasible("apply_transfers: pool exhausted at exporting cube " +
                                     format_window(Box{tr.src->cast<double>(), tr.src->cast<double>()}));
            // rank pool units by distance to the nearest ring cube
            std::vector<std::tuple<double, int, std::size_t>> ranked;
            for (int unit : pool) {
                double best = std::numeric_limits<double>::infinity();
                std::size_t best_ring = 0;
                for (std::size_t r = 0; r < ring.size(); ++r) {
                    Point anchor = grid.origin + N * ring[r].cast<double>();
                    double dd = dist_to_cube(out.current[static_cast<std::size_t>(unit)], anchor, N);
                    if (dd < best) {
                        best = dd;
                        best_ring = r;
                    }
                }
                ranked.emplace_back(best, unit, best_ring);
            }
            std::sort(ranked.begin(), ranked.end());
            for (long long k = 0; k < tr.amount; ++k) {
                auto [dd, unit, r] = ranked[static_cast<std::size_t>(k)];
                pool.erase(std::find(pool.begin(), pool.end(), unit));
                move_unit(unit, *tr.src, ring[r]);
            }
        } else if (!tr.src && tr.dst) {
            // import: draw from the adjacent ring pools, nearest units first
            auto ring = ring_neighbors(*tr.dst);
            std::vector<std::pair<double, int>> ranked;
            Point anchor = grid.origin + N * tr.dst->cast<double>();
            for (const GridIndex& r : ring)
                for (int unit : pools[grid.linear(r)])
                    ranked.emplace_back(
                        dist_to_cube(out.current[static_cast<std::size_t>(unit)], anchor, N), unit);
            std::sort(ranked.begin(), ranked.end());
            if (static_cast<long long>(ranked.size()) < tr.amount)
                throw PlanInfeasible("apply_transfers: ring pools exhausted importing into cube " +
                                     format_window(Box{tr.dst->cast<double>(), tr.dst->cast<double>()}));
            for (long long k = 0; k < tr.amount; ++k) {
                int unit = ranked[static_cast<std::size_t>(k)].second;
                GridIndex from_cube = cube_index(out.current[static_cast<std::size_t>(unit)], N,
                                                 grid.origin);
                auto& pool = pools[grid.linear(from_cube)];
                pool.erase(std::find(pool.begin(), pool.end(), unit));
                move_unit(unit, from_cube, *tr.dst);
            }
        }
    }

    // every interior cube must now hold exactly `target` points
    std::unordered_map<std::size_t, long long> counts;
    for (const Point& p : out.current) {
        GridIndex i = cube_index(p, N, grid.origin);
        if (grid.in_covered(i)) counts[grid.linear(i)]++;
    }
    for (int u = 0; u < n_interior; ++u) {
        GridIndex i = shim.interior_unlinear(static_cast<std::size_t>(u));
        long long c = counts.count(grid.linear(i)) ? counts[grid.linear(i)] : 0;
        if (c != plan.target)
            throw ContractError("apply_transfers: interior cube ended with " + std::to_string(c) +
                                " points, wanted " + std::to_string(plan.target));
    }
    return out;
}

CubeAssignment assign_within_cubes(const MovedSet& moved, const CubeGrid& grid,
                                   long long target) {
    const int d = grid.dim();
    const double N = grid.side;
    long long side_int = std::llround(N);
    if (std::abs(N - static_cast<double>(side_int)) > 1e-9 || side_int < 1)
        throw InputError("assign_within_cubes: cube side must be a positive integer");
    long long expect = 1;
    for (int j = 0; j < d; ++j) expect *= side_int;
    if (expect != target)
        throw InputError("assign_within_cubes: target must equal side^d");
    for (int j = 0; j < d; ++j)
        if (std::abs(grid.origin[j] - std::llround(grid.origin[j])) > 1e-9)
            throw InputError("assign_within_cubes: grid origin must be integral");

    // units per interior cube
    std::unordered_map<std::size_t, std::vector<int>> cells;
    for (std::size_t k = 0; k < moved.current.size(); ++k) {
        GridIndex i = cube_index(moved.current[k], N, grid.origin);
        if (grid.in_covered(i) && grid.in_interior(i))
            cells[grid.linear(i)].push_back(static_cast<int>(k));
    }

    GridFlow shim;
    shim.grid = grid;
    const int n_interior = static_cast<int>(grid.interior_cells());

    CubeAssignment out;
    for (int u = 0; u < n_interior; ++u) {
        GridIndex i = shim.interior_unlinear(static_cast<std::size_t>(u));
        auto it = cells.find(grid.linear(i));
        long long have = it == cells.end() ? 0 : static_cast<long long>(it->second.size());
        if (have != target)
            throw ContractError("assign_within_cubes: cube holds " + std::to_string(have) +
                                " points, wanted " + std::to_string(target));
        const std::vector<int>& units = it->second;

        Point anchor = grid.origin + N * i.cast<double>();
        std::vector<Point> sites;
        sites.reserve(static_cast<std::size_t>(target));
        GridIndex off = GridIndex::Zero(d);
        while (true) {
            sites.push_back(anchor + off.cast<double>());
            int j = d - 1;
            while (j >= 0) {
                if (++off[j] < side_int) break;
                off[j] = 0;
                --j;
            }
            if (j < 0) break;
        }

        std::vector<Point> positions;
        positions.reserve(units.size());
        for (int unit : units) positions.push_back(moved.current[static_cast<std::size_t>(unit)]);
        MatchingResult match = bottleneck_matching(positions, sites, Norm::Linf);
        if (!match.feasible)
            throw ContractError("assign_within_cubes: per-cube matching infeasible");
        if (!(match.c_star < N))
            throw ContractError("assign_within_cubes: assignment displacement reached N");

        for (const auto& [ai, bi] : match.pairs) {
            int unit = units[static_cast<std::size_t>(ai)];
            const Point& site = sites[static_cast<std::size_t>(bi)];
            out.units.push_back(unit);
            out.sites.push_back(site);
            double assign_disp = linf_dist(moved.current[static_cast<std::size_t>(unit)], site);
            double move_disp =
                linf_dist(moved.original[static_cast<std::size_t>(unit)],
                          moved.current[static_cast<std::size_t>(unit)]);
            double total = linf_dist(moved.original[static_cast<std::size_t>(unit)], site);
            out.max_assign_disp = std::max(out.max_assign_disp, assign_disp);
            out.max_move_disp = std::max(out.max_move_disp, move_disp);
            out.max_total_disp = std::max(out.max_total_disp, total);
        }
    }
    return out;
}

SpreadCertificate uniform_spread_certificate(const PointSet& set, const SpreadConfig& cfg) {
    if (set.window().empty()) throw InputError("uniform_spread_certificate: empty window");
    if (set.point_count() == 0) throw InputError("uniform_spread_certificate: empty set");
    if (cfg.initial_side < 2) throw InputError("uniform_spread_certificate: initial side must be >= 2");
    const int d = set.dim();

    SpreadCertificate cert;

    double d_hat;
    if (cfg.density_override) {
        d_hat = *cfg.density_override;
    } else {
        double T = (set.window().hi - set.window().lo).minCoeff();
        long long c = set.count_in(Cube{set.window().lo, T});
        d_hat = static_cast<double>(c) / std::pow(T, d);
    }
    if (d_hat <= 0.0) {
        cert.status = "failed";
        cert.attempts.push_back(SpreadAttempt{0, "density estimate is zero at the largest scale"});
        return cert;
    }
    cert.d_hat = d_hat;
    const double factor = std::pow(d_hat, 1.0 / d);
    cert.scale_factor = factor;
    cert.target_lattice = Lattice{1.0 / factor, d};
    PointSet rescaled = rescale_to_unit_density(set, d_hat);

    for (int attempt = 0; attempt < cfg.max_attempts; ++attempt) {
        long long side = cfg.initial_side << attempt;
        try {
            CubeGrid grid = cube_counts(rescaled, static_cast<double>(side));
            grid.shrink_interior(1);
            long long target = 1;
            for (int j = 0; j < d; ++j) target *= side;

            GridFlow flow = solve_fractional_transfers(grid, target);
            TransferPlan plan = round_transfers(flow);
            std::string why;
            if (!transfer_plan_feasible(plan, &why)) {
                cert.attempts.push_back(SpreadAttempt{side, "transfer feasibility failed: " + why});
                continue;
            }
            MovedSet moved = apply_transfers(rescaled, grid, plan);
            CubeAssignment assign = assign_within_cubes(moved, grid, target);
            if (!(assign.max_total_disp <= 3.0 * static_cast<double>(side)))
                throw ContractError("uniform_spread_certificate: displacement exceeded 3N");

            cert.status = "certified";
            cert.side_used = side;
            cert.grid_origin = grid.origin;
            cert.solver_bottleneck = flow.bottleneck;
            cert.move_phase_max = assign.max_move_disp;
            cert.assign_phase_max = assign.max_assign_disp;
            cert.c_achieved_rescaled = assign.max_total_disp;
            cert.c_achieved = assign.max_total_disp / factor;
            cert.certified_points = static_cast<long long>(assign.units.size());
            cert.uncertified_points =
                set.point_count() - cert.certified_points;
            if (cfg.collect_entries) {
                cert.entries.reserve(assign.units.size());
                for (std::size_t k = 0; k < assign.units.size(); ++k) {
                    int unit = assign.units[k];
                    CertificateEntry e;
                    e.source = moved.original[static_cast<std::size_t>(unit)] / factor;
                    e.target = assign.sites[k] / factor;
                    e.move_disp_rescaled =
                        linf_dist(moved.original[static_cast<std::size_t>(unit)],
                                  moved.current[static_cast<std::size_t>(unit)]);
                    e.assign_disp_rescaled =
                        linf_dist(moved.current[static_cast<std::size_t>(unit)], assign.sites[k]);
                    e.total_disp_rescaled =
                        linf_dist(moved.original[static_cast<std::size_t>(unit)], assign.sites[k]);
                    e.displacement = e.total_disp_rescaled / factor;
                    cert.entries.push_back(std::move(e));
                }
            }
            cert.attempts.push_back(SpreadAttempt{side, "certified"});
            return cert;
        } catch (const PlanInfeasible& ex) {
            cert.attempts.push_back(SpreadAttempt{side, ex.what()});
        } catch (const InputError& ex) {
            cert.attempts.push_back(SpreadAttempt{side, ex.what()});
        }
    }
    cert.status = "escalated";
    return cert;
}

} // namespace uspread
