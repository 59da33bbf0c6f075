#include "uspread/generators.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace uspread {

namespace {

std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
    SplitMix64 s(a ^ (b + 0x9e3779b97f4a7c15ull + (a << 6) + (a >> 2)));
    return s.next();
}

// Iterates integer vectors k with k_j in [lo_j, hi_j] inclusive, row-major.
class IntBoxIter {
public:
    IntBoxIter(std::vector<long long> lo, std::vector<long long> hi)
        : lo_(std::move(lo)), hi_(std::move(hi)), cur_(lo_) {
        done_ = false;
        for (std::size_t j = 0; j < lo_.size(); ++j)
            if (lo_[j] > hi_[j]) done_ = true;
    }
    bool done() const { return done_; }
    const std::vector<long long>& operator*() const { return cur_; }
    void advance() {
        for (std::size_t j = cur_.size(); j-- > 0;) {
            if (++cur_[j] <= hi_[j]) return;
            cur_[j] = lo_[j];
        }
        done_ = true;
    }

private:
    std::vector<long long> lo_, hi_, cur_;
    bool done_ = false;
};

PointSet make_set(std::vector<Point> pts, const Box& window) {
    Eigen::MatrixXd coords(window.dim(), static_cast<Eigen::Index>(pts.size()));
    for (std::size_t k = 0; k < pts.size(); ++k)
        coords.col(static_cast<Eigen::Index>(k)) = pts[k];
    return PointSet::from_points(coords, window);
}

PointSet gen_lattice_like(const GeneratorSpec& spec, bool perturb) {
    const int d = spec.window.dim();
    const double a = spec.alpha;
    const double eps = perturb ? spec.eps : 0.0;
    std::vector<long long> lo(d), hi(d);
    for (int j = 0; j < d; ++j) {
        // sites alpha*k whose perturbation range can reach the window
        lo[j] = static_cast<long long>(std::ceil((spec.window.lo[j] - eps) / a)) - 1;
        hi[j] = static_cast<long long>(std::floor((spec.window.hi[j] + eps) / a)) + 1;
    }
    std::vector<Point> pts;
    for (IntBoxIter it(lo, hi); !it.done(); it.advance()) {
        const auto& k = *it;
        Point p(d);
        std::uint64_t h = spec.seed;
        for (int j = 0; j < d; ++j) h = mix(h, static_cast<std::uint64_t>(k[j] + (1ll << 40)));
        SplitMix64 site(h);
        for (int j = 0; j < d; ++j) {
            double u = perturb && eps > 0.0 ? site.uniform_sym(eps) : 0.0;
            p[j] = a * static_cast<double>(k[j]) + u;
        }
        if (spec.window.contains(p)) pts.push_back(std::move(p));
    }
    return make_set(std::move(pts), spec.window);
}

// One chain point per integer m: the unique n with offset <= n + m*internal < offset+1.
std::vector<double> chain_points(double slope, double internal, double offset, double wlo,
                                 double whi) {
    const double step = slope - internal;  // physical advance per unit m, > 0 for defaults
    if (!(step > 0.0)) throw InputError("cut_project: slope must exceed internal_slope");
    long long mlo = static_cast<long long>(std::floor((wlo - offset - 2.0) / step)) - 2;
    long long mhi = static_cast<long long>(std::ceil((whi - offset + 2.0) / step)) + 2;
    std::vector<double> xs;
    for (long long m = mlo; m <= mhi; ++m) {
        double lo_n = offset - internal * static_cast<double>(m);
        double n = std::ceil(lo_n);
        // float-edge repair for the half-open acceptance [offset, offset+1)
        while (n + internal * static_cast<double>(m) < offset) n += 1.0;
        while (n - 1.0 + internal * static_cast<double>(m) >= offset) n -= 1.0;
        double x = n + slope * static_cast<double>(m);
        if (x >= wlo && x < whi) xs.push_back(x);
    }
    std::sort(xs.begin(), xs.end());
    return xs;
}

PointSet gen_cut_project_1d(const GeneratorSpec& spec) {
    if (spec.window.dim() != 1) throw InputError("cut_project_1d: window must be 1-dimensional");
    auto xs = chain_points(spec.slope, spec.internal_slope, spec.offset, spec.window.lo[0],
                           spec.window.hi[0]);
    std::vector<Point> pts;
    pts.reserve(xs.size());
    for (double x : xs) {
        Point p(1);
        p[0] = x;
        pts.push_back(std::move(p));
    }
    return make_set(std::move(pts), spec.window);
}

PointSet gen_cut_project_2d(const GeneratorSpec& spec) {
    if (spec.window.dim() != 2) throw InputError("cut_project_2d: window must be 2-dimensional");
    auto xs = chain_points(spec.slope, spec.internal_slope, spec.offset, spec.window.lo[0],
                           spec.window.hi[0]);
    auto ys = chain_points(spec.slope, spec.internal_slope, spec.offset + spec.offset_shift,
                           spec.window.lo[1], spec.window.hi[1]);
    std::vector<Point> pts;
    pts.reserve(xs.size() * ys.size());
    for (double x : xs)
        for (double y : ys) {
            Point p(2);
            p << x, y;
            pts.push_back(std::move(p));
        }
    return make_set(std::move(pts), spec.window);
}

long long poisson_draw(SplitMix64& rng, double lambda) {
    // Knuth's product method on chunks small enough that exp(-chunk) is sane.
    long long total = 0;
    while (lambda > 0.0) {
        double chunk = std::min(lambda, 16.0);
        lambda -= chunk;
        double limit = std::exp(-chunk);
        double prod = rng.uniform01();
        long long k = 0;
        while (prod > limit) {
            ++k;
            prod *= rng.uniform01();
        }
        total += k;
    }
    return total;
}

PointSet gen_poisson(const GeneratorSpec& spec) {
    const int d = spec.window.dim();
    const double vol = spec.window.volume();
    SplitMix64 rng(mix(spec.seed, 0x706f6973736f6eull));  // stream tagged "poisson"
    long long n = poisson_draw(rng, spec.intensity * vol);
    Eigen::MatrixXd coords(d, n);
    for (long long k = 0; k < n; ++k)
        for (int j = 0; j < d; ++j)
            coords(j, k) =
                spec.window.lo[j] + rng.uniform01() * (spec.window.hi[j] - spec.window.lo[j]);
    return PointSet::from_points(coords, spec.window);
}

} // namespace

GeneratorKind parse_generator_kind(const std::string& name) {
    if (name == "lattice") return GeneratorKind::Lattice;
    if (name == "perturbed_lattice" || name == "perturbed") return GeneratorKind::PerturbedLattice;
    if (name == "cut_project_1d" || name == "cutproject1d") return GeneratorKind::CutProject1D;
    if (name == "cut_project_2d" || name == "cutproject2d") return GeneratorKind::CutProject2D;
    if (name == "poisson") return GeneratorKind::Poisson;
    throw InputError("unknown generator kind '" + name + "'");
}

PointSet generate(const GeneratorSpec& spec) {
    if (spec.window.lo.size() < 1) throw InputError("generate: window has no dimensions");
    if (spec.window.empty())
        return PointSet(Eigen::MatrixXd(spec.window.dim(), 0), {}, spec.window);

    switch (spec.kind) {
        case GeneratorKind::Lattice:
            if (spec.alpha <= 0.0) throw InputError("generate: alpha must be positive");
            return gen_lattice_like(spec, false);
        case GeneratorKind::PerturbedLattice:
            if (spec.alpha <= 0.0) throw InputError("generate: alpha must be positive");
            if (spec.eps < 0.0) throw InputError("generate: eps must be nonnegative");
            if (spec.eps >= spec.alpha / 2.0)
                throw InputError("generate: eps must be < alpha/2 to keep sites distinct");
            return gen_lattice_like(spec, true);
        case GeneratorKind::CutProject1D:
            return gen_cut_project_1d(spec);
        case GeneratorKind::CutProject2D:
            return gen_cut_project_2d(spec);
        case GeneratorKind::Poisson:
            if (spec.intensity <= 0.0) throw InputError("generate: intensity must be positive");
            return gen_poisson(spec);
    }
    throw InputError("generate: unknown kind");
}

} // namespace uspread
