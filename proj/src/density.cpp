#include "uspread/density.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

namespace uspread {

long long CubeGrid::covered_cells() const {
    long long n = 1;
    for (int j = 0; j < dim(); ++j) n *= std::max(0, cov_hi[j] - cov_lo[j]);
    return n;
}

long long CubeGrid::interior_cells() const {
    long long n = 1;
    for (int j = 0; j < dim(); ++j) n *= std::max(0, int_hi[j] - int_lo[j]);
    return n;
}

bool CubeGrid::in_covered(const GridIndex& i) const {
    return (i.array() >= cov_lo.array()).all() && (i.array() < cov_hi.array()).all();
}

bool CubeGrid::in_interior(const GridIndex& i) const {
    return (i.array() >= int_lo.array()).all() && (i.array() < int_hi.array()).all();
}

std::size_t CubeGrid::linear(const GridIndex& i) const {
    std::size_t pos = 0;
    for (int j = 0; j < dim(); ++j)
        pos = pos * static_cast<std::size_t>(cov_hi[j] - cov_lo[j]) +
              static_cast<std::size_t>(i[j] - cov_lo[j]);
    return pos;
}

GridIndex CubeGrid::unlinear(std::size_t pos) const {
    GridIndex i(dim());
    for (int j = dim() - 1; j >= 0; --j) {
        std::size_t w = static_cast<std::size_t>(cov_hi[j] - cov_lo[j]);
        i[j] = cov_lo[j] + static_cast<int>(pos % w);
        pos /= w;
    }
    return i;
}

Cube CubeGrid::cube(const GridIndex& i) const {
    Cube c;
    c.anchor = origin + side * i.cast<double>();
    c.side = side;
    return c;
}

void CubeGrid::shrink_interior(int rings) {
    int_lo = int_lo.array() + rings;
    int_hi = int_hi.array() - rings;
    if ((int_hi.array() <= int_lo.array()).any())
        throw InputError("CubeGrid: interior vanished after removing boundary rings; "
                         "the window is too small for side " + num_to_string(side));
}

bool CubeGrid::boundary_cube(const GridIndex& i) const {
    if (in_covered(i)) return false;
    Cube c = cube(i);
    // intersects [lo, hi) without being contained
    return (c.anchor.array() < window.hi.array()).all() &&
           ((c.anchor.array() + side) > window.lo.array()).all();
}

Point default_grid_origin(const Box& window, double side) {
    Point o(window.dim());
    for (int j = 0; j < window.dim(); ++j)
        o[j] = std::floor(window.lo[j] / side) * side;
    return o;
}

CubeGrid cube_counts(const PointSet& set, double side, std::optional<Point> origin) {
    if (side <= 0.0) throw InputError("cube_counts: side must be positive");
    if (set.window().empty()) throw InputError("cube_counts: empty window");

    CubeGrid grid;
    grid.side = side;
    grid.window = set.window();
    grid.origin = origin ? *origin : default_grid_origin(set.window(), side);
    if (grid.origin.size() != set.window().lo.size())
        throw InputError("cube_counts: origin dimension mismatch");

    const int d = grid.dim();
    grid.cov_lo.resize(d);
    grid.cov_hi.resize(d);
    for (int j = 0; j < d; ++j) {
        // smallest i with origin + i*side >= window lo
        long long lo = static_cast<long long>(std::ceil((set.window().lo[j] - grid.origin[j]) / side));
        while (grid.origin[j] + static_cast<double>(lo) * side < set.window().lo[j]) ++lo;
        while (grid.origin[j] + static_cast<double>(lo - 1) * side >= set.window().lo[j]) --lo;
        // largest exclusive bound with origin + i*side fully inside
        long long hi = static_cast<long long>(std::floor((set.window().hi[j] - grid.origin[j]) / side));
        while (grid.origin[j] + static_cast<double>(hi) * side > set.window().hi[j]) --hi;
        while (grid.origin[j] + static_cast<double>(hi + 1) * side <= set.window().hi[j]) ++hi;
        grid.cov_lo[j] = static_cast<int>(lo);
        grid.cov_hi[j] = static_cast<int>(hi);
        if (hi - lo < 1)
            throw InputError("cube_counts: side " + num_to_string(side) +
                             " exceeds the window extent in dimension " + std::to_string(j));
    }
    grid.int_lo = grid.cov_lo;
    grid.int_hi = grid.cov_hi;

    grid.counts.assign(static_cast<std::size_t>(grid.covered_cells()), 0);
    for (Eigen::Index k = 0; k < set.entry_count(); ++k) {
        GridIndex i = cube_index(set.point(k), side, grid.origin);
        if (grid.in_covered(i))
            grid.counts[grid.linear(i)] += set.multiplicity(k);
        else
            grid.uncovered += set.multiplicity(k);
    }
    return grid;
}

long long local_bound(const PointSet& set) {
    if (set.point_count() == 0) throw InputError("local_bound: empty set");
    const int d = set.dim();
    const Point& lo = set.window().lo;

    // Count per half-unit cell, then a unit cube anchored on the half grid is a
    // block of 2^d adjacent cells.
    std::unordered_map<GridIndex, long long, IndexHash, IndexEq> cells;
    for (Eigen::Index k = 0; k < set.entry_count(); ++k)
        cells[cube_index(set.point(k), 0.5, lo)] += set.multiplicity(k);

    long long best = 0;
    const int blocks = 1 << d;
    for (const auto& [cell, cnt] : cells) {
        (void)cnt;
        for (int mask = 0; mask < blocks; ++mask) {
            GridIndex anchor = cell;
            for (int j = 0; j < d; ++j)
                if (mask & (1 << j)) anchor[j] -= 1;
            long long sum = 0;
            for (int sub = 0; sub < blocks; ++sub) {
                GridIndex c = anchor;
                for (int j = 0; j < d; ++j)
                    if (sub & (1 << j)) c[j] += 1;
                auto it = cells.find(c);
                if (it != cells.end()) sum += it->second;
            }
            best = std::max(best, sum);
        }
    }
    return best + 1;
}

DensityEstimate estimate_density(const PointSet& set, const std::vector<double>& scales,
                                 const std::vector<Point>& centers) {
    if (scales.empty() || centers.empty())
        throw InputError("estimate_density: need at least one scale and one center");
    const Box& w = set.window();
    const int d = set.dim();

    std::vector<double> sorted_scales = scales;
    std::sort(sorted_scales.begin(), sorted_scales.end());

    DensityEstimate est;
    for (double T : sorted_scales) {
        if (T <= 0.0) throw InputError("estimate_density: scale must be positive");
        double mn = 0.0, mx = 0.0, sum = 0.0;
        bool first = true;
        for (const Point& x : centers) {
            if ((x.array() < w.lo.array()).any() ||
                ((x.array() + T) > w.hi.array()).any()) {
                std::string anchor;
                for (Eigen::Index j = 0; j < x.size(); ++j)
                    anchor += (j ? "," : "") + num_to_string(x[j]);
                throw InputError("estimate_density: cube at (" + anchor + ") of side " +
                                 num_to_string(T) + " does not fit in the window");
            }
            long long c = set.count_in(Cube{x, T});
            double norm = static_cast<double>(c) / std::pow(T, d);
            est.rows.push_back(DensityRow{T, x, c, norm});
            mn = first ? norm : std::min(mn, norm);
            mx = first ? norm : std::max(mx, norm);
            sum += norm;
            first = false;
        }
        est.spread_by_scale.emplace_back(T, mx - mn);
        if (T == sorted_scales.back()) est.d_hat = sum / static_cast<double>(centers.size());
    }
    return est;
}

DiscrepancyProfile discrepancy_profile(const PointSet& set, double density,
                                       const std::vector<Point>& centers,
                                       const std::vector<double>& radii) {
    if (density <= 0.0) throw InputError("discrepancy_profile: density must be positive");
    const Box& w = set.window();
    const int d = set.dim();

    std::vector<double> sorted_radii = radii;
    std::sort(sorted_radii.begin(), sorted_radii.end());

    DiscrepancyProfile prof;
    for (const Point& x : centers) {
        double rmax = sorted_radii.empty() ? 0.0 : sorted_radii.back();
        if (((x.array() - rmax) < w.lo.array()).any() ||
            ((x.array() + rmax) > w.hi.array()).any())
            throw InputError("discrepancy_profile: ball of radius " + num_to_string(rmax) +
                             " does not fit in the window");

        // distances once, then each radius is a binary search
        std::vector<std::pair<double, long long>> dist;
        dist.reserve(static_cast<std::size_t>(set.entry_count()));
        for (Eigen::Index k = 0; k < set.entry_count(); ++k)
            dist.emplace_back((set.point(k) - x).norm(), set.multiplicity(k));
        std::sort(dist.begin(), dist.end());
        std::vector<double> ds(dist.size());
        std::vector<long long> prefix(dist.size() + 1, 0);
        for (std::size_t k = 0; k < dist.size(); ++k) {
            ds[k] = dist[k].first;
            prefix[k + 1] = prefix[k] + dist[k].second;
        }

        for (double R : sorted_radii) {
            if (R <= 0.0) throw InputError("discrepancy_profile: radius must be positive");
            auto it = std::lower_bound(ds.begin(), ds.end(), R);  // open ball: strict <
            long long count = prefix[static_cast<std::size_t>(it - ds.begin())];
            double expected = density * ball_volume(d, R);
            double s = std::abs(static_cast<double>(count) - expected) / std::pow(R, d - 1);
            prof.rows.push_back(DiscrepancyRow{x, R, count, expected, s});
            prof.max_s = std::max(prof.max_s, s);
        }
    }
    return prof;
}

} // namespace uspread
