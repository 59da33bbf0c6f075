#pragma once

#include "uspread/transfer.hpp"

namespace uspread {

struct MoveRecord {
    int unit = -1;
    GridIndex from_cube, to_cube;
    Point from, to;
    double displacement = 0.0;  // l_inf, rescaled frame
};

// Point positions after realizing a transfer plan, at unit granularity (one
// unit per multiplicity). Positions are in the plan's (rescaled) frame.
struct MovedSet {
    std::vector<Point> original;
    std::vector<Point> current;
    std::vector<char> moved;
    std::vector<MoveRecord> log;
};

// Realizes integer transfers as physical moves: positive t_{i,j} relocates the
// t nearest-to-j never-moved original points of cube i just across into cube j
// (projection clamped inside by a small margin). Slack transfers exchange
// points with the ring of covered cubes around the interior box. No point
// moves twice; each move displaces at most 2N; afterwards every interior cube
// holds exactly `target` points. Throws PlanInfeasible when a pool runs dry.
MovedSet apply_transfers(const PointSet& set, const CubeGrid& grid, const TransferPlan& plan);

struct CubeAssignment {
    std::vector<int> units;          // certified unit ids
    std::vector<Point> sites;        // matched unit-lattice sites, same order
    double max_assign_disp = 0.0;    // < N
    double max_move_disp = 0.0;      // <= 2N
    double max_total_disp = 0.0;     // <= 3N
};

// Bottleneck-optimal bijection, cube by cube, between the N^d points now in
// each interior cube and the N^d integer lattice sites it contains. Requires
// integer side and integral grid anchors (the unit-density rescaled setting).
CubeAssignment assign_within_cubes(const MovedSet& moved, const CubeGrid& grid,
                                   long long target);

struct CertificateEntry {
    Point source;  // original frame
    Point target;  // original frame lattice point (D^(-1/d) Z^d)
    double displacement = 0.0;          // original frame, l_inf
    double move_disp_rescaled = 0.0;    // relocation phase
    double assign_disp_rescaled = 0.0;  // in-cube assignment phase
    double total_disp_rescaled = 0.0;
};

struct SpreadAttempt {
    long long side = 0;
    std::string outcome;
};

struct SpreadCertificate {
    std::string status;  // "certified" | "escalated" | "failed"
    double d_hat = 0.0;
    double scale_factor = 1.0;  // d_hat^(1/d)
    Lattice target_lattice;     // D^(-1/d) Z^d, the bijection's codomain
    long long side_used = 0;    // N in rescaled units
    Point grid_origin;          // rescaled frame
    double c_achieved = 0.0;    // original frame
    double c_achieved_rescaled = 0.0;
    double move_phase_max = 0.0;    // rescaled
    double assign_phase_max = 0.0;  // rescaled
    long long certified_points = 0;
    long long uncertified_points = 0;  // margin ring + uncovered window remainder
    Rational solver_bottleneck;
    std::vector<CertificateEntry> entries;
    std::vector<SpreadAttempt> attempts;

    bool certified() const { return status == "certified"; }
};

struct SpreadConfig {
    long long initial_side = 4;
    int max_attempts = 4;  // sides tried: initial, 2x, 4x, ...
    std::optional<double> density_override;
    bool collect_entries = true;
};

// Full pipeline: density estimate, rescale to unit density, cube counts,
// fractional transfers, integer rounding, feasibility check, relocation,
// in-cube assignment, inverse rescale. Doubles the cube side and retries when
// the rounded plan is infeasible, up to the configured cap.
SpreadCertificate uniform_spread_certificate(const PointSet& set, const SpreadConfig& cfg = {});

} // namespace uspread
