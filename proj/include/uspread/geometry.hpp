#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <functional>

#include "uspread/common.hpp"

namespace uspread {

// A point in R^d. Dimension is dynamic; all geometry below is norm-exact on
// doubles, with half-closed cube membership b_j <= x_j < b_j + r.
using Point = Eigen::VectorXd;

// Integer grid index i of a cube Q(origin + i*N, N).
using GridIndex = Eigen::VectorXi;

double linf_dist(const Point& a, const Point& b);
double l2_dist(const Point& a, const Point& b);

// Axis-aligned half-open box [lo, hi).
struct Box {
    Point lo;
    Point hi;

    int dim() const { return static_cast<int>(lo.size()); }
    bool contains(const Point& p) const {
        return (p.array() >= lo.array()).all() && (p.array() < hi.array()).all();
    }
    double volume() const { return (hi - lo).prod(); }
    bool empty() const { return (hi.array() <= lo.array()).any(); }
};

// Half-closed cube Q(anchor, side): anchor_j <= x_j < anchor_j + side.
struct Cube {
    Point anchor;
    double side = 0.0;

    int dim() const { return static_cast<int>(anchor.size()); }
    bool contains(const Point& p) const {
        return (p.array() >= anchor.array()).all() &&
               (p.array() < (anchor.array() + side)).all();
    }
    Box box() const { return Box{anchor, anchor.array() + side}; }
};

// Open Euclidean ball.
struct Ball {
    Point center;
    double radius = 0.0;

    int dim() const { return static_cast<int>(center.size()); }
    bool contains(const Point& p) const { return (p - center).norm() < radius; }
};

// The scaled integer lattice alpha * Z^d.
struct Lattice {
    double spacing = 1.0;
    int dim = 1;
};

// Volume of the d-dimensional Euclidean ball of radius r.
double ball_volume(int dim, double r);

// Index of the half-closed cube Q(origin + i*N, N) containing p.
GridIndex cube_index(const Point& p, double side, const Point& origin);

struct IndexHash {
    std::size_t operator()(const GridIndex& i) const {
        std::uint64_t h = 1469598103934665603ull;
        for (Eigen::Index k = 0; k < i.size(); ++k) {
            h ^= static_cast<std::uint64_t>(static_cast<std::uint32_t>(i[k]));
            h *= 1099511628211ull;
        }
        return static_cast<std::size_t>(h);
    }
};

struct IndexEq {
    bool operator()(const GridIndex& a, const GridIndex& b) const {
        return a.size() == b.size() && (a.array() == b.array()).all();
    }
};

} // namespace uspread
