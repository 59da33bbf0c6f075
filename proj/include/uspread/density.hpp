#pragma once

#include <optional>
#include <vector>

#include "uspread/point_set.hpp"

namespace uspread {

// Per-cube counts P_i over the box of cubes Q(origin + i*N, N) fully contained
// in the window. Cubes that only partially intersect the window are boundary
// cubes: they carry no count and their points land in `uncovered`.
// The interior box is a sub-box of the covered box; the certification pipeline
// shrinks it by one ring so every interior cube keeps fully-populated
// neighbours to exchange points with.
struct CubeGrid {
    Point origin;
    double side = 0.0;  // N
    Box window;
    GridIndex cov_lo, cov_hi;  // covered box, half-open index range
    GridIndex int_lo, int_hi;  // interior box, defaults to the covered box
    std::vector<long long> counts;  // row-major over the covered box
    long long uncovered = 0;

    int dim() const { return static_cast<int>(origin.size()); }

    long long covered_cells() const;
    bool in_covered(const GridIndex& i) const;
    bool in_interior(const GridIndex& i) const;
    std::size_t linear(const GridIndex& i) const;  // position within covered box
    GridIndex unlinear(std::size_t pos) const;
    long long count(const GridIndex& i) const { return counts[linear(i)]; }
    Cube cube(const GridIndex& i) const;

    // Drops `rings` layers from the interior box. Throws if nothing is left.
    void shrink_interior(int rings);
    long long interior_cells() const;

    // Boundary cube: intersects the window without being contained in it.
    // Such cubes carry no count (their points sit in `uncovered`) and are
    // excluded from density averaging.
    bool boundary_cube(const GridIndex& i) const;
};

// Default origin: window lower corner snapped down to a multiple of N.
Point default_grid_origin(const Box& window, double side);

CubeGrid cube_counts(const PointSet& set, double side,
                     std::optional<Point> origin = std::nullopt);

// Witness local bound K: 1 + the max count over unit cubes anchored on the
// half-unit grid covering the window.
long long local_bound(const PointSet& set);

struct DensityRow {
    double scale;
    Point center;
    long long count;
    double normalized;  // count / scale^d
};

struct DensityEstimate {
    double d_hat = 0.0;  // mean normalized count at the largest scale
    std::vector<DensityRow> rows;
    std::vector<std::pair<double, double>> spread_by_scale;  // (scale, max-min)
};

DensityEstimate estimate_density(const PointSet& set, const std::vector<double>& scales,
                                 const std::vector<Point>& centers);

struct DiscrepancyRow {
    Point center;
    double radius;
    long long count;
    double expected;  // density * ball volume
    double s;         // |count - expected| / radius^(d-1)
};

struct DiscrepancyProfile {
    std::vector<DiscrepancyRow> rows;
    double max_s = 0.0;
};

DiscrepancyProfile discrepancy_profile(const PointSet& set, double density,
                                       const std::vector<Point>& centers,
                                       const std::vector<double>& radii);

} // namespace uspread
