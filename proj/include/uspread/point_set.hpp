#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "uspread/geometry.hpp"

namespace uspread {

// A finite window of a discrete multiset in R^d. Entries are stored as the
// columns of a d x n matrix plus a parallel multiplicity vector; coincident
// input points are merged into one entry with summed multiplicity, and entries
// are kept in lexicographic coordinate order so equal sets compare equal.
class PointSet {
public:
    PointSet() = default;

    // Takes raw (point, multiplicity) data; merges duplicates, sorts, validates.
    PointSet(Eigen::MatrixXd coords, std::vector<long long> mults, Box window);

    // All multiplicities 1.
    static PointSet from_points(const Eigen::MatrixXd& coords, Box window);

    int dim() const { return static_cast<int>(window_.lo.size()); }
    Eigen::Index entry_count() const { return coords_.cols(); }
    long long point_count() const { return total_; }  // with multiplicity

    Point point(Eigen::Index k) const { return coords_.col(k); }
    long long multiplicity(Eigen::Index k) const { return mults_[k]; }
    const Eigen::MatrixXd& coords() const { return coords_; }
    const std::vector<long long>& mults() const { return mults_; }
    const Box& window() const { return window_; }

    bool operator==(const PointSet& other) const;

    // Expands entries to one point per unit of multiplicity.
    std::vector<Point> expanded() const;

    long long count_in(const Cube& region) const;
    long long count_in(const Ball& region) const;

private:
    Eigen::MatrixXd coords_;        // d x n
    std::vector<long long> mults_;  // n, all >= 1
    Box window_;
    long long total_ = 0;
};

// Same support, per-entry multiplicities replaced by `duplication` (indexed by
// canonical entry order). Entries absent from the map keep their multiplicity.
PointSet as_multiset(const PointSet& set,
                     const std::vector<std::pair<Eigen::Index, long long>>& duplication);

// Text format:
//   pointset d=<dim> n=<entries>
//   # window <lo coords comma-joined>:<hi coords comma-joined>   (structured comment)
//   x1 ... xd [mult]
// '#' begins a comment line. Without a window comment the window defaults to
// the tight bounding box of the data (upper corner nudged to keep points inside).
PointSet read_point_set(std::istream& in);
PointSet read_point_set_file(const std::string& path);
void write_point_set(std::ostream& out, const PointSet& set);
void write_point_set_file(const std::string& path, const PointSet& set);

// "x0,y0:x1,y1" generalized to d dimensions.
Box parse_window(const std::string& text);
std::string format_window(const Box& box);

} // namespace uspread
