#pragma once

#include "uspread/density.hpp"
#include "uspread/flow_round.hpp"
#include "uspread/matching.hpp"

namespace uspread {

// A transfer plan that no relocation can realize (pool shortfalls, boundary
// imbalance beyond slack capacity). The certification pipeline reacts by
// doubling the cube side.
class PlanInfeasible : public std::runtime_error {
public:
    explicit PlanInfeasible(const std::string& what) : std::runtime_error(what) {}
};

// Multiplies coordinates (and the window) by d_hat^(1/d), so the result has
// estimated density 1.
PointSet rescale_to_unit_density(const PointSet& set, double d_hat);

// Fractional inter-cube transfers on the interior box of a grid. Vertices are
// the interior cells (row-major linear ids) plus one slack vertex when the
// interior counts do not sum to target * cells; edges join cells at l_inf
// index distance 1, plus cell<->slack edges on the interior's outer layer.
struct GridFlow {
    CubeGrid grid;
    long long target = 0;  // wanted points per cube (N^d)
    bool has_slack = false;
    int slack_id = -1;  // = interior cell count when present
    FlowGraph graph;    // vertex 0..n_interior-1 (+ slack); values = transfers
    std::vector<bool> edge_is_slack;
    std::vector<long long> excess;  // per interior cell: P_i - target
    Rational bottleneck;            // max |p| over non-slack edges

    int interior_cell_count() const;
    std::size_t interior_linear(const GridIndex& i) const;
    GridIndex interior_unlinear(std::size_t pos) const;
};

// Meets the divergence identity target = P_i - sum_j p_{i,j} exactly at every
// interior cell, minimizing the maximum |p| over cell-cell edges (exact
// rational optimum: integer binary search, then Stern-Brocot refinement, with
// feasibility decided by a max-flow). Slack edges only carry flow in the
// direction of the window-total mismatch and are capped at `target` each.
GridFlow solve_fractional_transfers(const CubeGrid& grid, long long target);

// Writes the flow in the flow-graph text format; vertex ids are row-major
// interior cell positions, spelled out in `# cell <id> <i...>` comment lines
// (plus `# slack <id>` when a slack vertex exists). The output parses back
// with read_flow_graph.
void write_grid_flow(std::ostream& out, const GridFlow& flow);
void write_grid_flow_file(const std::string& path, const GridFlow& flow);

// Integer transfers after rounding the fractional flow.
struct TransferPlan {
    CubeGrid grid;
    long long target = 0;
    bool has_slack = false;
    int slack_id = -1;
    FlowGraph graph;  // integer values
    std::vector<bool> edge_is_slack;
};

TransferPlan round_transfers(const GridFlow& flow);

// Checks sum_j |t_{i,j}| <= min(P_i, target) at every interior cell; on
// failure names the first offending cell in *why.
bool transfer_plan_feasible(const TransferPlan& plan, std::string* why = nullptr);

// Stage-1 sampling: counts M^x_{j,i} of points of cube j whose image under a
// within-L matching of the set shifted by N*x lands in cube i+x, and the
// antisymmetric differences p^x_{i,j}. Only cubes whose points all sit deeper
// than |N*x| + L from the window boundary are trusted ("valid").
struct ShiftTransferSample {
    GridIndex shift;  // x, in cube units
    bool ok = false;
    std::string failure;
    GridIndex valid_lo, valid_hi;  // valid cube index box
    // p^x on ordered valid cell pairs (u, v are covered-box linear ids, u < v)
    std::vector<std::tuple<std::size_t, std::size_t, long long>> p;
    long long max_support_dist = 0;  // largest ||i-j||_inf with M != 0
    bool support_ok = true;          // max_support_dist <= 1
    // eq-residuals: P_{i+x} - P_i + sum_j p^x_{i,j} on fully-valid cells
    std::vector<std::pair<std::size_t, long long>> count_residuals;
};

ShiftTransferSample shift_transfer_sample(const PointSet& set, const CubeGrid& grid,
                                          const GridIndex& x, double L);

// Cesaro average of p^x over x in {0..T-1}^d, with the finite-T divergence
// residuals T^{-d} sum_x P_{i+x} - target reported per cell.
struct AveragedTransfers {
    int T = 0;
    GridIndex valid_lo, valid_hi;  // cells valid in every sample
    std::vector<std::tuple<std::size_t, std::size_t, Rational>> p;
    std::vector<std::pair<std::size_t, Rational>> residuals;
    Rational max_abs_residual;
    Rational mean_abs_residual;
    bool support_ok = true;
    bool all_samples_ok = true;
};

AveragedTransfers average_shift_transfers(const PointSet& set, const CubeGrid& grid, int T,
                                          double L, long long target);

} // namespace uspread
