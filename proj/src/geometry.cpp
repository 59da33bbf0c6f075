#include "uspread/geometry.hpp"

#include <cmath>

namespace uspread {

double linf_dist(const Point& a, const Point& b) {
    if (a.size() != b.size())
        throw InputError("linf_dist: dimension mismatch (" + std::to_string(a.size()) +
                         " vs " + std::to_string(b.size()) + ")");
    if (a.size() == 0) return 0.0;
    return (a - b).cwiseAbs().maxCoeff();
}

double l2_dist(const Point& a, const Point& b) {
    if (a.size() != b.size())
        throw InputError("l2_dist: dimension mismatch");
    return (a - b).norm();
}

double ball_volume(int dim, double r) {
    if (dim < 0) throw InputError("ball_volume: negative dimension");
    // v_d = v_{d-2} * 2 pi / d keeps the low-dimensional constants exact
    double unit = dim % 2 == 0 ? 1.0 : 2.0;
    for (int d = dim % 2 == 0 ? 2 : 3; d <= dim; d += 2) unit *= 2.0 * M_PI / d;
    return unit * std::pow(r, dim);
}

GridIndex cube_index(const Point& p, double side, const Point& origin) {
    if (side <= 0.0) throw InputError("cube_index: side must be positive");
    if (p.size() != origin.size()) throw InputError("cube_index: dimension mismatch");
    GridIndex idx(p.size());
    for (Eigen::Index j = 0; j < p.size(); ++j) {
        double c = p[j];
        if (!std::isfinite(c)) throw InputError("cube_index: non-finite coordinate");
        double f = std::floor((c - origin[j]) / side);
        // Guard against floor landing one cell off when (c - o)/side sits on a
        // representable cell boundary: nudge until the half-closed rule holds.
        while (origin[j] + (f + 1.0) * side <= c) f += 1.0;
        while (origin[j] + f * side > c) f -= 1.0;
        idx[j] = static_cast<int>(f);
    }
    return idx;
}

} // namespace uspread
