#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "uspread/generators.hpp"
#include "uspread/spread.hpp"

using json = nlohmann::ordered_json;
using namespace uspread;

namespace {

std::vector<double> parse_double_list(const std::string& text, const char* what) {
    std::vector<double> out;
    std::string token;
    std::istringstream ss(text);
    while (std::getline(ss, token, ',')) {
        try {
            out.push_back(std::stod(token));
        } catch (const std::exception&) {
            throw InputError(std::string(what) + ": bad number '" + token + "'");
        }
    }
    if (out.empty()) throw InputError(std::string(what) + ": empty list");
    return out;
}

std::vector<Point> parse_centers(const std::string& text, int dim) {
    std::vector<Point> out;
    std::string token;
    std::istringstream ss(text);
    while (std::getline(ss, token, ';')) {
        auto vals = parse_double_list(token, "centers");
        if (static_cast<int>(vals.size()) != dim)
            throw InputError("centers: expected " + std::to_string(dim) +
                             " coordinates in '" + token + "'");
        out.push_back(Eigen::Map<Point>(vals.data(), dim));
    }
    if (out.empty()) throw InputError("centers: empty list");
    std::sort(out.begin(), out.end(), [](const Point& a, const Point& b) {
        for (Eigen::Index j = 0; j < a.size(); ++j) {
            if (a[j] != b[j]) return a[j] < b[j];
        }
        return false;
    });
    return out;
}

std::string format_center(const Point& p) {
    std::string s;
    for (Eigen::Index j = 0; j < p.size(); ++j) {
        if (j) s += ';';
        s += num_to_string(p[j]);
    }
    return s;
}

json point_to_json(const Point& p) {
    json arr = json::array();
    for (Eigen::Index j = 0; j < p.size(); ++j) arr.push_back(p[j]);
    return arr;
}

std::ostream& open_output(std::ofstream& file, const std::string& path) {
    if (path.empty() || path == "-") return std::cout;
    file.open(path);
    if (!file) throw InputError("cannot open output file '" + path + "'");
    return file;
}

struct CliArgs {
    std::string input, output, second_input;
    std::string kind = "lattice", window_text, scales_text, centers_text, radii_text;
    std::string shift_text, stage1_text, norm_text = "linf";
    double alpha = 1.0, eps = 0.0, intensity = 1.0, density = 0.0, bound = 1.0;
    double slope = 0.6180339887498949, internal_slope = -1.6180339887498949, offset = 0.0;
    double stage1_bound = 1.0;
    long long mult = 1, n0 = 4, stage1_side = 4;
    int cap = 4;
    std::uint64_t seed = 0;
    bool one_sided = false, with_witness = false, no_entries = false;
};

int run_generate(const CliArgs& a) {
    GeneratorSpec spec;
    spec.kind = parse_generator_kind(a.kind);
    spec.window = parse_window(a.window_text);
    spec.alpha = a.alpha;
    spec.eps = a.eps;
    spec.intensity = a.intensity;
    spec.slope = a.slope;
    spec.internal_slope = a.internal_slope;
    spec.offset = a.offset;
    spec.seed = a.seed;
    PointSet set = generate(spec);
    if (a.mult != 1) {
        std::vector<std::pair<Eigen::Index, long long>> dup;
        for (Eigen::Index k = 0; k < set.entry_count(); ++k) dup.emplace_back(k, a.mult);
        set = as_multiset(set, dup);
    }
    std::ofstream file;
    write_point_set(open_output(file, a.output), set);
    return 0;
}

int run_density(const CliArgs& a) {
    PointSet set = read_point_set_file(a.input);
    std::vector<double> scales = parse_double_list(a.scales_text, "scales");
    std::vector<Point> centers =
        a.centers_text.empty()
            ? std::vector<Point>{set.window().lo}
            : parse_centers(a.centers_text, set.dim());
    DensityEstimate est = estimate_density(set, scales, centers);
    std::ofstream file;
    std::ostream& out = open_output(file, a.output);
    out << "scale,center,count,normalized\n";
    for (const auto& row : est.rows)
        out << num_to_string(row.scale) << ',' << format_center(row.center) << ',' << row.count
            << ',' << num_to_string(row.normalized) << "\n";
    out << "# d_hat " << num_to_string(est.d_hat) << "\n";
    return 0;
}

int run_discrepancy(const CliArgs& a) {
    PointSet set = read_point_set_file(a.input);
    if (a.density <= 0.0) throw InputError("discrepancy: --density must be positive");
    std::vector<double> radii = parse_double_list(a.radii_text, "radii");
    std::sort(radii.begin(), radii.end());
    std::vector<Point> centers = parse_centers(a.centers_text, set.dim());
    DiscrepancyProfile prof = discrepancy_profile(set, a.density, centers, radii);
    std::ofstream file;
    std::ostream& out = open_output(file, a.output);
    out << "center,radius,count,expected,s\n";
    for (const auto& row : prof.rows)
        out << format_center(row.center) << ',' << num_to_string(row.radius) << ',' << row.count
            << ',' << num_to_string(row.expected) << ',' << num_to_string(row.s) << "\n";
    out << "# max_s " << num_to_string(prof.max_s) << "\n";
    return 0;
}

int run_shiftcheck(const CliArgs& a) {
    PointSet set = read_point_set_file(a.input);
    auto vals = parse_double_list(a.shift_text, "shift");
    if (static_cast<int>(vals.size()) != set.dim())
        throw InputError("shift: expected " + std::to_string(set.dim()) + " coordinates");
    Point x = Eigen::Map<Point>(vals.data(), set.dim());
    Norm norm = a.norm_text == "l2" ? Norm::L2 : Norm::Linf;
    ShiftCheckResult res = check_shift_invariance(set, x, a.bound, norm);

    json j;
    j["holds"] = res.holds;
    j["shift"] = point_to_json(x);
    j["bound"] = res.bound;
    j["margin"] = res.margin;
    j["core_size"] = res.core_size;
    j["matched"] = static_cast<long long>(res.witness.size());
    if (res.violation)
        j["violation"] = point_to_json(*res.violation);
    else
        j["violation"] = nullptr;
    if (a.with_witness) {
        json pairs = json::array();
        for (const auto& [ai, bi] : res.witness) pairs.push_back(json::array({ai, bi}));
        j["witness"] = pairs;
    }
    std::ofstream file;
    open_output(file, a.output) << j.dump(2) << "\n";
    return res.holds ? 0 : 2;
}

int run_roundflow(const CliArgs& a) {
    FlowGraph g = read_flow_graph_file(a.input);
    RoundedFlow rounded = round_flow(g);
    std::ofstream file;
    write_flow_graph(open_output(file, a.output), rounded.graph);
    return 0;
}

int run_oracle(const CliArgs& a) {
    PointSet sa = read_point_set_file(a.input);
    PointSet sb = read_point_set_file(a.second_input);
    Norm norm = a.norm_text == "l2" ? Norm::L2 : Norm::Linf;
    MatchingResult res = a.one_sided
                             ? bottleneck_matching_one_sided(sa.expanded(), sb.expanded(), norm)
                             : bottleneck_matching(sa.expanded(), sb.expanded(), norm);
    json j;
    j["c_star"] = res.c_star;
    json pairs = json::array();
    for (const auto& [ai, bi] : res.pairs) pairs.push_back(json::array({ai, bi}));
    j["pairs"] = pairs;
    j["feasible"] = res.feasible;
    std::ofstream file;
    open_output(file, a.output) << j.dump(2) << "\n";
    return res.feasible ? 0 : 2;
}

int run_spread(const CliArgs& a) {
    PointSet set = read_point_set_file(a.input);
    SpreadConfig cfg;
    cfg.initial_side = a.n0;
    cfg.max_attempts = a.cap;
    cfg.collect_entries = !a.no_entries;
    if (a.density > 0.0) cfg.density_override = a.density;
    SpreadCertificate cert = uniform_spread_certificate(set, cfg);

    json j;
    j["status"] = cert.status;
    j["parameters"] = {{"d_hat", cert.d_hat},
                       {"scale_factor", cert.scale_factor},
                       {"lattice_spacing", cert.target_lattice.spacing},
                       {"side", cert.side_used},
                       {"initial_side", cfg.initial_side},
                       {"max_attempts", cfg.max_attempts},
                       {"grid_origin", cert.certified() ? point_to_json(cert.grid_origin)
                                                        : json(nullptr)}};
    j["summary"] = {
        {"c_achieved", cert.c_achieved},
        {"c_achieved_rescaled", cert.c_achieved_rescaled},
        {"move_phase_max", cert.move_phase_max},
        {"assign_phase_max", cert.assign_phase_max},
        {"bound_move", 2.0 * static_cast<double>(cert.side_used)},
        {"bound_assign", static_cast<double>(cert.side_used)},
        {"bound_total", 3.0 * static_cast<double>(cert.side_used)},
        {"solver_bottleneck", cert.solver_bottleneck.to_string()},
        {"certified_points", cert.certified_points},
        {"uncertified_points", cert.uncertified_points}};
    json attempts = json::array();
    for (const auto& at : cert.attempts)
        attempts.push_back({{"side", at.side}, {"outcome", at.outcome}});
    j["attempts"] = attempts;

    if (!a.stage1_text.empty() && cert.certified()) {
        PointSet rescaled = rescale_to_unit_density(set, cert.d_hat);
        CubeGrid grid = cube_counts(rescaled, static_cast<double>(a.stage1_side));
        long long target = 1;
        for (int k = 0; k < set.dim(); ++k) target *= a.stage1_side;
        json stage1 = json::array();
        for (double Td : parse_double_list(a.stage1_text, "stage1")) {
            int T = static_cast<int>(Td);
            AveragedTransfers avg =
                average_shift_transfers(rescaled, grid, T, a.stage1_bound, target);
            stage1.push_back({{"T", T},
                              {"residual_max", avg.max_abs_residual.to_string()},
                              {"residual_mean", avg.mean_abs_residual.to_string()},
                              {"support_ok", avg.support_ok},
                              {"all_samples_ok", avg.all_samples_ok},
                              {"edges", static_cast<long long>(avg.p.size())}});
        }
        j["stage1_fidelity"] = stage1;
    }

    if (!a.no_entries) {
        json entries = json::array();
        for (const auto& e : cert.entries)
            entries.push_back({{"source", point_to_json(e.source)},
                               {"target", point_to_json(e.target)},
                               {"displacement", e.displacement},
                               {"move_rescaled", e.move_disp_rescaled},
                               {"assign_rescaled", e.assign_disp_rescaled},
                               {"total_rescaled", e.total_disp_rescaled}});
        j["entries"] = entries;
    }

    std::ofstream file;
    open_output(file, a.output) << j.dump(2) << "\n";
    return cert.certified() ? 0 : 2;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"point-set uniform-spread toolkit"};
    app.require_subcommand(1);
    CliArgs a;

    auto* gen = app.add_subcommand("generate", "synthesize a point set");
    gen->add_option("--kind", a.kind,
                    "lattice|perturbed_lattice|cut_project_1d|cut_project_2d|poisson");
    gen->add_option("--alpha", a.alpha, "lattice spacing");
    gen->add_option("--eps", a.eps, "perturbation half-width");
    gen->add_option("--intensity", a.intensity, "poisson intensity");
    gen->add_option("--slope", a.slope, "cut-and-project physical slope");
    gen->add_option("--internal-slope", a.internal_slope, "cut-and-project internal slope");
    gen->add_option("--offset", a.offset, "acceptance window offset");
    gen->add_option("--seed", a.seed, "random seed");
    gen->add_option("--mult", a.mult, "multiplicity applied to every point");
    gen->add_option("--window", a.window_text, "window x0,y0:x1,y1")->required();
    gen->add_option("-o,--output", a.output, "output point-set file");

    auto* den = app.add_subcommand("density", "per-scale normalized cube counts");
    den->add_option("-i,--input", a.input)->required();
    den->add_option("--scales", a.scales_text, "comma list of cube sides")->required();
    den->add_option("--centers", a.centers_text, "semicolon list of cube anchors");
    den->add_option("-o,--output", a.output, "output CSV");

    auto* dis = app.add_subcommand("discrepancy", "ball-count discrepancy statistic");
    dis->add_option("-i,--input", a.input)->required();
    dis->add_option("--density", a.density, "density D")->required();
    dis->add_option("--centers", a.centers_text)->required();
    dis->add_option("--radii", a.radii_text, "comma list of radii")->required();
    dis->add_option("-o,--output", a.output, "output CSV");

    auto* shf = app.add_subcommand("shiftcheck", "finite-window shift-invariance check");
    shf->add_option("-i,--input", a.input)->required();
    shf->add_option("--shift", a.shift_text, "shift vector, comma separated")->required();
    shf->add_option("--bound", a.bound, "displacement bound L")->required();
    shf->add_option("--norm", a.norm_text, "linf|l2");
    shf->add_flag("--witness", a.with_witness, "include the witness pairing");
    shf->add_option("-o,--output", a.output, "output JSON");

    auto* spr = app.add_subcommand("spread", "uniform-spread certificate");
    spr->add_option("-i,--input", a.input)->required();
    spr->add_option("--n0", a.n0, "initial cube side");
    spr->add_option("--cap", a.cap, "max side doublings tried");
    spr->add_option("--density", a.density, "density override");
    spr->add_flag("--no-entries", a.no_entries, "omit the per-point entries");
    spr->add_option("--stage1", a.stage1_text, "comma list of averaging sizes T");
    spr->add_option("--stage1-bound", a.stage1_bound, "L for stage-1 matchings");
    spr->add_option("--stage1-side", a.stage1_side, "cube side for stage-1 sampling");
    spr->add_option("-o,--output", a.output, "output JSON");

    auto* rnd = app.add_subcommand("roundflow", "round fractional flow to integers");
    rnd->add_option("-i,--input", a.input)->required();
    rnd->add_option("-o,--output", a.output, "output graph file");

    auto* orc = app.add_subcommand("oracle", "bottleneck matching between two sets");
    orc->add_option("-a,--first", a.input)->required();
    orc->add_option("-b,--second", a.second_input)->required();
    orc->add_option("--norm", a.norm_text, "linf|l2");
    orc->add_flag("--one-sided", a.one_sided, "left side into right side");
    orc->add_option("-o,--output", a.output, "output JSON");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        if (gen->parsed()) return run_generate(a);
        if (den->parsed()) return run_density(a);
        if (dis->parsed()) return run_discrepancy(a);
        if (shf->parsed()) return run_shiftcheck(a);
        if (spr->parsed()) return run_spread(a);
        if (rnd->parsed()) return run_roundflow(a);
        if (orc->parsed()) return run_oracle(a);
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const PlanInfeasible& e) {
        std::cerr << "infeasible: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
