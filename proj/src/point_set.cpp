#include "uspread/point_set.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

namespace uspread {

namespace {

bool lex_less(const Eigen::MatrixXd& m, Eigen::Index a, Eigen::Index b) {
    for (Eigen::Index j = 0; j < m.rows(); ++j) {
        if (m(j, a) < m(j, b)) return true;
        if (m(j, a) > m(j, b)) return false;
    }
    return false;
}

bool same_col(const Eigen::MatrixXd& m, Eigen::Index a, Eigen::Index b) {
    return (m.col(a).array() == m.col(b).array()).all();
}

} // namespace

PointSet::PointSet(Eigen::MatrixXd coords, std::vector<long long> mults, Box window) {
    const Eigen::Index n = coords.cols();
    if (window.lo.size() != window.hi.size())
        throw InputError("PointSet: window corners disagree in dimension");
    if (n > 0 && coords.rows() != window.lo.size())
        throw InputError("PointSet: point dimension does not match window");
    if (static_cast<Eigen::Index>(mults.size()) != n)
        throw InputError("PointSet: multiplicity count does not match point count");
    if (!coords.allFinite())
        throw InputError("PointSet: non-finite coordinate");

    for (Eigen::Index k = 0; k < n; ++k) {
        if (mults[k] < 1)
            throw InputError("PointSet: multiplicity must be >= 1 (entry " +
                             std::to_string(k) + ")");
        if (!window.contains(coords.col(k)))
            throw InputError("PointSet: point outside window (entry " +
                             std::to_string(k) + ")");
    }

    std::vector<Eigen::Index> order(n);
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::sort(order.begin(), order.end(),
              [&](Eigen::Index a, Eigen::Index b) { return lex_less(coords, a, b); });

    coords_.resize(window.lo.size(), n);
    mults_.clear();
    mults_.reserve(n);
    Eigen::Index out = 0;
    for (Eigen::Index k = 0; k < n; ++k) {
        Eigen::Index src = order[k];
        if (out > 0 && same_col(coords, src, order[k - 1])) {
            mults_[out - 1] += mults[src];  // merge coincident points
        } else {
            coords_.col(out) = coords.col(src);
            mults_.push_back(mults[src]);
            ++out;
        }
    }
    coords_.conservativeResize(Eigen::NoChange, out);
    window_ = std::move(window);
    total_ = std::accumulate(mults_.begin(), mults_.end(), 0ll);
}

PointSet PointSet::from_points(const Eigen::MatrixXd& coords, Box window) {
    return PointSet(coords, std::vector<long long>(coords.cols(), 1), std::move(window));
}

bool PointSet::operator==(const PointSet& other) const {
    return coords_.rows() == other.coords_.rows() && coords_.cols() == other.coords_.cols() &&
           (coords_.array() == other.coords_.array()).all() && mults_ == other.mults_ &&
           (window_.lo.array() == other.window_.lo.array()).all() &&
           (window_.hi.array() == other.window_.hi.array()).all();
}

std::vector<Point> PointSet::expanded() const {
    std::vector<Point> pts;
    pts.reserve(static_cast<std::size_t>(total_));
    for (Eigen::Index k = 0; k < entry_count(); ++k)
        for (long long m = 0; m < mults_[k]; ++m) pts.push_back(coords_.col(k));
    return pts;
}

long long PointSet::count_in(const Cube& region) const {
    if (region.dim() != dim()) throw InputError("count_in: region dimension mismatch");
    long long total = 0;
    for (Eigen::Index k = 0; k < entry_count(); ++k)
        if (region.contains(coords_.col(k))) total += mults_[k];
    return total;
}

long long PointSet::count_in(const Ball& region) const {
    if (region.dim() != dim()) throw InputError("count_in: region dimension mismatch");
    long long total = 0;
    for (Eigen::Index k = 0; k < entry_count(); ++k)
        if (region.contains(coords_.col(k))) total += mults_[k];
    return total;
}

PointSet as_multiset(const PointSet& set,
                     const std::vector<std::pair<Eigen::Index, long long>>& duplication) {
    std::vector<long long> mults = set.mults();
    for (const auto& [idx, m] : duplication) {
        if (idx < 0 || idx >= set.entry_count())
            throw InputError("as_multiset: entry index out of range");
        if (m < 1) throw InputError("as_multiset: multiplicity must be >= 1");
        mults[static_cast<std::size_t>(idx)] = m;
    }
    return PointSet(set.coords(), std::move(mults), set.window());
}

namespace {

std::vector<double> parse_numbers(const std::string& text, char sep, const char* what) {
    std::vector<double> out;
    std::string token;
    std::istringstream ss(text);
    while (std::getline(ss, token, sep)) {
        try {
            std::size_t pos = 0;
            out.push_back(std::stod(token, &pos));
            while (pos < token.size() && std::isspace(static_cast<unsigned char>(token[pos]))) ++pos;
            if (pos != token.size()) throw std::invalid_argument(token);
        } catch (const std::exception&) {
            throw InputError(std::string(what) + ": bad number '" + token + "'");
        }
    }
    return out;
}

} // namespace

Box parse_window(const std::string& text) {
    auto colon = text.find(':');
    if (colon == std::string::npos)
        throw InputError("window: expected '<lo>:<hi>' in '" + text + "'");
    auto lo = parse_numbers(text.substr(0, colon), ',', "window");
    auto hi = parse_numbers(text.substr(colon + 1), ',', "window");
    if (lo.empty() || lo.size() != hi.size())
        throw InputError("window: corner dimensions disagree in '" + text + "'");
    Box box;
    box.lo = Eigen::Map<Eigen::VectorXd>(lo.data(), static_cast<Eigen::Index>(lo.size()));
    box.hi = Eigen::Map<Eigen::VectorXd>(hi.data(), static_cast<Eigen::Index>(hi.size()));
    return box;
}

std::string format_window(const Box& box) {
    std::string s;
    for (int part = 0; part < 2; ++part) {
        const Point& c = part == 0 ? box.lo : box.hi;
        for (Eigen::Index j = 0; j < c.size(); ++j) {
            s += num_to_string(c[j]);
            if (j + 1 < c.size()) s += ',';
        }
        if (part == 0) s += ':';
    }
    return s;
}

PointSet read_point_set(std::istream& in) {
    std::string line;
    int dim = -1;
    long long n = -1;
    bool have_window = false;
    Box window;

    // header
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ss(line);
        std::string tag, dtok, ntok;
        ss >> tag >> dtok >> ntok;
        if (tag != "pointset" || dtok.rfind("d=", 0) != 0 || ntok.rfind("n=", 0) != 0)
            throw InputError("pointset: bad header line '" + line + "'");
        try {
            dim = std::stoi(dtok.substr(2));
            n = std::stoll(ntok.substr(2));
        } catch (const std::exception&) {
            throw InputError("pointset: bad header numbers in '" + line + "'");
        }
        break;
    }
    if (dim < 1 || n < 0) throw InputError("pointset: missing or invalid header");

    Eigen::MatrixXd coords(dim, n);
    std::vector<long long> mults;
    mults.reserve(static_cast<std::size_t>(n));
    long long row = 0;
    long long lineno = 1;
    while (row < n && std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::istringstream ss(line);
            std::string hash, key, rest;
            ss >> hash >> key;
            if (key == "window" && (ss >> rest)) {
                window = parse_window(rest);
                if (window.dim() != dim)
                    throw InputError("pointset: window dimension mismatch on line " +
                                     std::to_string(lineno));
                have_window = true;
            }
            continue;
        }
        std::istringstream ss(line);
        std::vector<double> vals;
        double v;
        while (ss >> v) vals.push_back(v);
        if (!ss.eof())
            throw InputError("pointset: bad entry on line " + std::to_string(lineno) +
                             ": '" + line + "'");
        long long mult = 1;
        if (vals.size() == static_cast<std::size_t>(dim) + 1) {
            mult = static_cast<long long>(vals.back());
            if (mult != vals.back() || mult < 1)
                throw InputError("pointset: bad multiplicity on line " + std::to_string(lineno));
            vals.pop_back();
        }
        if (vals.size() != static_cast<std::size_t>(dim))
            throw InputError("pointset: expected " + std::to_string(dim) +
                             " coordinates on line " + std::to_string(lineno));
        for (int j = 0; j < dim; ++j) coords(j, row) = vals[static_cast<std::size_t>(j)];
        mults.push_back(mult);
        ++row;
    }
    if (row != n)
        throw InputError("pointset: header promised " + std::to_string(n) +
                         " entries, found " + std::to_string(row));

    if (!have_window) {
        // Tight bounding box; hi is nudged up so half-open membership holds.
        window.lo = Point::Zero(dim);
        window.hi = Point::Ones(dim);
        if (n > 0) {
            window.lo = coords.rowwise().minCoeff();
            Point hi = coords.rowwise().maxCoeff();
            for (int j = 0; j < dim; ++j)
                hi[j] = std::nextafter(hi[j], std::numeric_limits<double>::infinity());
            window.hi = hi;
        }
    }
    return PointSet(std::move(coords), std::move(mults), std::move(window));
}

PointSet read_point_set_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open point-set file '" + path + "'");
    return read_point_set(in);
}

void write_point_set(std::ostream& out, const PointSet& set) {
    out << "pointset d=" << set.dim() << " n=" << set.entry_count() << "\n";
    out << "# window " << format_window(set.window()) << "\n";
    for (Eigen::Index k = 0; k < set.entry_count(); ++k) {
        for (int j = 0; j < set.dim(); ++j) {
            if (j) out << ' ';
            out << num_to_string(set.coords()(j, k));
        }
        if (set.multiplicity(k) != 1) out << ' ' << set.multiplicity(k);
        out << "\n";
    }
}

void write_point_set_file(const std::string& path, const PointSet& set) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot open output file '" + path + "'");
    write_point_set(out, set);
}

} // namespace uspread
