#pragma once

#include <optional>

#include "uspread/point_set.hpp"

namespace uspread {

enum class Norm { Linf, L2 };

double point_dist(const Point& a, const Point& b, Norm norm);

struct MatchingResult {
    std::vector<std::pair<int, int>> pairs;  // (index into A, index into B)
    double c_star = 0.0;  // max pair distance; minimal over admissible matchings
    bool feasible = false;
};

// Optimal bottleneck bijection A <-> B (|A| = |B| required): binary search over
// the sorted distinct pairwise distances, feasibility by augmenting paths. The
// returned c_star is a realized pairwise distance and the probe at the next
// smaller candidate failed, which certifies minimality.
MatchingResult bottleneck_matching(const std::vector<Point>& A, const std::vector<Point>& B,
                                   Norm norm = Norm::Linf);

// One-sided variant: every point of A matched to a distinct point of B
// (|A| <= |B|), minimizing the max distance.
MatchingResult bottleneck_matching_one_sided(const std::vector<Point>& A,
                                             const std::vector<Point>& B,
                                             Norm norm = Norm::Linf);

struct ShiftCheckResult {
    bool holds = false;
    double bound = 0.0;       // L
    double margin = 0.0;      // discarded boundary width: |x| + L
    long long core_size = 0;  // points tested (multiplicity expanded)
    // witness partial bijection: (expanded core index, expanded set index)
    std::vector<std::pair<int, int>> witness;
    // an unmatchable core point (original position), preferring one with the
    // fewest within-L candidates so the evidence is locally inspectable
    std::optional<Point> violation;
    long long violation_candidates = 0;
};

// Finite-window check that the set admits a self-bijection moving every core
// point a to within distance < L of a + x. Core points keep distance
// > |x| + L from the window boundary; a maximum one-sided matching of the
// shifted core into the set decides the outcome.
ShiftCheckResult check_shift_invariance(const PointSet& set, const Point& x, double L,
                                        Norm norm = Norm::Linf);

// Shared engine: maximum matching of {all[c] + shift : c in core_ids} into
// `all`, using only pairs at distance strictly < L. Candidates are scanned
// nearest first, so exact self-matches are preferred. match_of_core holds an
// expanded index into `all` (or -1) per core entry.
struct WithinBoundMatching {
    bool complete = false;
    std::vector<int> match_of_core;
    std::vector<int> candidate_counts;  // within-L candidates per core entry
};

WithinBoundMatching detail_match_shifted_within(const std::vector<Point>& all,
                                                const std::vector<int>& core_ids,
                                                const Point& shift, double L,
                                                const Box& bucket_window,
                                                Norm norm = Norm::Linf);

} // namespace uspread
