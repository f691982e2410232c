#include <CLI11.hpp>
#include <Eigen/Dense>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "spectral_plane/elliptic_curve.hpp"
#include "spectral_plane/errors.hpp"
#include "spectral_plane/jacobian.hpp"
#include "spectral_plane/search.hpp"
#include "spectral_plane/serialize.hpp"

using namespace spectral_plane;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalidConfig = 1;
constexpr int kExitNumericalFailure = 2;
constexpr int kExitNothingFound = 3;

std::vector<double> parse_doubles(const std::string& text) {
    std::vector<double> out;
    std::stringstream stream(text);
    std::string item;
    while (std::getline(stream, item, ',')) {
        if (item.empty()) continue;
        std::size_t used = 0;
        out.push_back(std::stod(item, &used));
        if (used != item.size()) throw Error("malformed number: " + item);
    }
    return out;
}

struct CommonArgs {
    int g = 0;
    std::string theta_text;
    std::string t_text;
    std::string config_path;
    std::string out_path;
    std::string format = "json";
    int threads = 0;
    double quad_tol = 1e-11;
};

int resolve_threads(int flag_value) {
    if (flag_value > 0) return flag_value;
    if (const char* env = std::getenv("SPECTRAL_PLANE_THREADS")) {
        const int parsed = std::atoi(env);
        if (parsed > 0) return parsed;
    }
    return 1;
}

BranchConfig resolve_config(const CommonArgs& args, bool need_theta = true) {
    if (!args.config_path.empty()) {
        if (args.g != 0 || !args.theta_text.empty())
            throw Error("give either --config or inline --g/--theta, not both");
        std::ifstream in(args.config_path);
        if (!in) throw Error("cannot open config file: " + args.config_path);
        std::stringstream buffer;
        buffer << in.rdbuf();
        return BranchConfig::validate(raw_config_from_json(buffer.str()));
    }
    RawConfig raw;
    raw.g = args.g;
    raw.theta = parse_doubles(args.theta_text);
    raw.t = parse_doubles(args.t_text);
    if (raw.g == 0) raw.g = static_cast<int>(raw.theta.size());
    if (!need_theta && raw.theta.empty()) {
        // Synthetic evenly spaced angles; used when only g matters.
        const double hi = constants::two_pi_over_3();
        for (int i = 0; i < raw.g; ++i)
            raw.theta.push_back(hi * (i + 1) / (raw.g + 1));
    }
    return BranchConfig::validate(raw);
}

void emit(const CommonArgs& args, const std::string& text) {
    if (args.out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(args.out_path, std::ios::binary);
    if (!out) throw Error("cannot open output file: " + args.out_path);
    out << text;
}

std::string doubles_json(const std::vector<double>& values) {
    std::string out = "[";
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out += ',';
        out += format_double(values[i]);
    }
    out += ']';
    return out;
}

std::string vector_json(const Eigen::VectorXd& v) {
    return doubles_json(std::vector<double>(v.data(), v.data() + v.size()));
}

std::string matrix_json(const Eigen::MatrixXd& m) {
    std::string out = "[";
    for (int r = 0; r < m.rows(); ++r) {
        if (r) out += ',';
        out += '[';
        for (int c = 0; c < m.cols(); ++c) {
            if (c) out += ',';
            out += format_double(m(r, c));
        }
        out += ']';
    }
    out += ']';
    return out;
}

// --- eval ------------------------------------------------------------------

int run_eval(const CommonArgs& args) {
    const BranchConfig cfg = resolve_config(args);
    int active_axis = -1;
    for (int j = 0; j < cfg.g(); ++j) {
        if (cfg.t()[j] == 0.0) continue;
        if (active_axis >= 0)
            throw OrderingViolation("eval supports at most one nonzero t component");
        active_axis = j;
    }
    PeriodPlane plane;
    if (active_axis < 0) {
        plane = uv_origin(cfg);
    } else {
        const double t = cfg.t()[active_axis];
        std::vector<double> zeros(cfg.g(), 0.0);
        plane = uv_axis(cfg.with_t(zeros), active_axis, t, args.quad_tol);
    }
    if (args.format == "csv") {
        std::string out = "m,u,v\n";
        for (int m = 0; m < cfg.g() + 2; ++m) {
            out += std::to_string(m + 1) + ',' + format_double(plane.u[m]) + ',' +
                   format_double(plane.v[m]) + '\n';
        }
        emit(args, out);
        return kExitOk;
    }
    std::string out = "{\"g\":" + std::to_string(cfg.g());
    out += ",\"theta\":" + doubles_json(cfg.theta());
    out += ",\"t\":" + doubles_json(cfg.t());
    out += ",\"u\":" + vector_json(plane.u);
    out += ",\"v\":" + vector_json(plane.v);
    out += "}\n";
    emit(args, out);
    return kExitOk;
}

// --- jacobian ---------------------------------------------------------------

int run_jacobian(const CommonArgs& args) {
    const BranchConfig cfg = resolve_config(args);
    const DerivativeTable table = analytic_jacobian(cfg);
    const NMatrix reduced = reduce_blocks(table);
    std::string out = "{\"g\":" + std::to_string(cfg.g());
    out += ",\"theta\":" + doubles_json(cfg.theta());
    out += ",\"du_dtheta\":" + matrix_json(table.du_dtheta);
    out += ",\"dv_dtheta\":" + matrix_json(table.dv_dtheta);
    out += ",\"du_dt\":" + matrix_json(table.du_dt);
    out += ",\"dv_dt\":" + matrix_json(table.dv_dt);
    out += ",\"n\":" + matrix_json(reduced.entries);
    out += ",\"det_n\":" + format_double(reduced.entries.determinant());
    out += "}\n";
    emit(args, out);
    return kExitOk;
}

// --- verify -----------------------------------------------------------------

struct VerifyCheck {
    std::string name;
    double measured;
    double bound;
    bool larger_is_better = false;  // slope-style checks
    bool pass() const { return larger_is_better ? measured >= bound : measured <= bound; }
};

complexd fd_richardson(const std::function<complexd(double)>& f, double h) {
    const auto central = [&](double s) { return (f(s) - f(-s)) / (2.0 * s); };
    return (100.0 * central(h / 10.0) - central(h)) / 99.0;
}

int run_verify(const CommonArgs& args) {
    const BranchConfig cfg = resolve_config(args);
    const int g = cfg.g();
    const double pi = std::numbers::pi;
    const double a = constants::a();
    std::vector<VerifyCheck> checks;
    const double quad = std::min(args.quad_tol, 1e-12);

    {  // closed-form plane vs quadrature at the nodal locus
        double worst = 0.0;
        const PeriodPlane origin = uv_origin(cfg);
        for (int j = 0; j < g; ++j) {
            const PeriodPlane axis = uv_axis(cfg, j, 0.0, quad);
            worst = std::max(worst, (axis.u - origin.u).cwiseAbs().maxCoeff());
            worst = std::max(worst, (axis.v - origin.v).cwiseAbs().maxCoeff());
        }
        checks.push_back({"uv-origin-vs-quadrature", worst, 1e-9});
    }

    {  // located pairs vs closed forms at t = 0
        double worst = 0.0;
        for (int j = 0; j < g; ++j) {
            const CurveModel nodal = build_curve(cfg, j, 0.0, quad);
            for (int m = 0; m < g + 2; ++m) {
                if (m == j) continue;
                const NodePair located = locate_pair(nodal, m);
                const NodePair closed = node_pair(cfg.angle(m) - cfg.theta()[j]);
                worst = std::max({worst, std::abs(located.xi1 - closed.xi1),
                                  std::abs(located.xi2 - closed.xi2),
                                  std::abs(located.eta1 - closed.eta1),
                                  std::abs(located.eta2 - closed.eta2)});
            }
        }
        checks.push_back({"pair-closed-forms", worst, 1e-10});
    }

    {  // eta2/xi2^2 - eta1/xi1^2 identity on a 200-point gap grid
        double worst = 0.0;
        for (int half = 0; half < 2; ++half) {
            for (int i = 0; i < 100; ++i) {
                const double lo = 0.03, hi = 2.0 * pi / 3.0 - 0.05;
                const double gap = (half ? -1.0 : 1.0) * (lo + (hi - lo) * i / 99.0);
                const NodePair p = node_pair(gap);
                const complexd lhs =
                    p.eta2 / (p.xi2 * p.xi2) - p.eta1 / (p.xi1 * p.xi1);
                const complexd rhs(0.0, -std::sqrt(3.0) / (2.0 * std::cos(gap) + 1.0));
                worst = std::max(worst, std::abs(lhs - rhs));
            }
        }
        checks.push_back({"pair-ratio-identity", worst, 1e-12});
    }

    {  // A-cycle normalizations off the nodal locus
        double worst = 0.0;
        for (int j = 0; j < g; ++j) {
            for (double t : {1e-3, 1e-4}) {
                const CurveModel curve = build_curve(cfg, j, t, quad);
                DifferentialCoeffs holo;
                holo.holomorphic = true;
                holo.k = normalize_holomorphic(curve);
                worst = std::max(worst, std::abs(cycle_period(curve, holo) - 1.0));
                for (int m = 0; m < g + 2; ++m) {
                    if (m == j) continue;
                    worst = std::max(worst,
                                     std::abs(cycle_period(curve, third_kind(curve, m))));
                }
            }
        }
        checks.push_back({"cycle-normalization", worst, 1e-8});
    }

    {  // residues of the third-kind differentials
        double worst_pair = 0.0, worst_quad = 0.0;
        const complexd expected(0.0, -1.0 / (2.0 * pi));
        for (int j = 0; j < g; ++j) {
            const CurveModel curve = build_curve(cfg, j, 1e-3, quad);
            for (int m = 0; m < g + 2; ++m) {
                if (m == j) continue;
                const DifferentialCoeffs w = third_kind(curve, m);
                const complexd r1 = residue_by_series(w, w.pair.xi1, w.pair.eta1);
                const complexd r2 = residue_by_series(w, w.pair.xi2, w.pair.eta2);
                worst_pair = std::max({worst_pair, std::abs(r1 - expected),
                                       std::abs(r1 + r2)});
                worst_quad = std::max(
                    worst_quad,
                    std::abs(residue_by_quadrature(curve, w, w.pair.xi1, w.pair.eta1) - r1));
            }
        }
        checks.push_back({"residue-values", worst_pair, 1e-10});
        checks.push_back({"residue-series-vs-contour", worst_quad, 1e-9});
    }

    {  // normalization derivative dk/dt against -sqrt(3)/(2 pi)
        double worst = 0.0;
        for (int j = 0; j < g; ++j) {
            const complexd kdot = fd_richardson(
                [&](double t) { return normalize_holomorphic(build_curve(cfg, j, t, quad)); },
                1e-3);
            const complexd claimed(-std::sqrt(3.0) / (2.0 * pi), 0.0);
            worst = std::max(worst, std::abs(kdot - claimed) / std::abs(claimed));
        }
        checks.push_back({"k-dot", worst, 1e-6});
    }

    {  // diagonal period derivative against -(sqrt(3)/(2 pi a)) eps e^{-i theta}
        double worst = 0.0;
        for (int j = 0; j < g; ++j) {
            const complexd dot = fd_richardson(
                [&](double t) { return omega_p0(build_curve(cfg, j, t, quad), j); }, 1e-3);
            const complexd claimed = -std::sqrt(3.0) / (2.0 * pi * a) *
                                     constants::epsilon() *
                                     std::polar(1.0, -cfg.theta()[j]);
            worst = std::max(worst, std::abs(dot - claimed) / std::abs(claimed));
        }
        checks.push_back({"omega-diagonal-dot", worst, 1e-6});
    }

    {  // quadratic decay of delta
        double worst_slope = 1e9;
        for (int j = 0; j < g; ++j) {
            for (int m = 0; m < g + 2; ++m) {
                if (m == j) continue;
                std::vector<double> lt, ld;
                for (double t : {1e-2, 1e-3, 1e-4}) {
                    try {
                        const complexd d = third_kind(build_curve(cfg, j, t, quad), m).delta;
                        lt.push_back(std::log(t));
                        ld.push_back(std::log(std::abs(d)));
                    } catch (const SingularPair&) {
                        // pole regime at this t; skip the sample
                    }
                }
                if (lt.size() < 2) continue;
                worst_slope = std::min(worst_slope,
                                       (ld.front() - ld.back()) / (lt.front() - lt.back()));
            }
        }
        checks.push_back({"delta-quadratic-decay", worst_slope, 1.9, true});
    }

    {  // derivative table vs quadrature finite differences
        const DerivativeTable numeric = fd_jacobian(cfg, 1e-3, quad);
        const DerivativeTable closed = analytic_jacobian(cfg);
        double worst = 0.0;
        for (int m = 0; m < g + 2; ++m) {
            for (int j = 0; j < g; ++j) {
                for (auto [num, ref] : {std::pair{numeric.du_dt(m, j), closed.du_dt(m, j)},
                                        std::pair{numeric.dv_dt(m, j), closed.dv_dt(m, j)}}) {
                    const double err = std::abs(ref) > 1e-9
                                           ? std::abs(num - ref) / std::abs(ref)
                                           : std::abs(num - ref) * 1e4;
                    worst = std::max(worst, err);
                }
            }
        }
        checks.push_back({"derivative-table-vs-quadrature", worst, 1e-5});
    }

    std::string out;
    bool all_pass = true;
    for (const auto& check : checks) {
        all_pass = all_pass && check.pass();
        out += check.pass() ? "PASS " : "FAIL ";
        out += check.name + " measured=" + format_double(check.measured) +
               (check.larger_is_better ? " min=" : " max=") + format_double(check.bound) +
               '\n';
    }
    if (args.format == "json") {
        std::string doc = "[";
        for (std::size_t i = 0; i < checks.size(); ++i) {
            if (i) doc += ',';
            doc += "{\"name\":\"" + checks[i].name + "\"";
            doc += ",\"measured\":" + format_double(checks[i].measured);
            doc += std::string(",\"bound\":") + format_double(checks[i].bound);
            doc += std::string(",\"pass\":") + (checks[i].pass() ? "true" : "false") + "}";
        }
        doc += "]\n";
        emit(args, doc);
        std::cerr << out;
    } else {
        emit(args, out);
    }
    return all_pass ? kExitOk : kExitNothingFound;
}

// --- asymptote ---------------------------------------------------------------

int run_asymptote(const CommonArgs& args, const std::string& radii_text, bool lagrangian) {
    const std::vector<double> radii = parse_doubles(radii_text);
    const int g = args.g;
    const ConvergenceReport report = asymptotic_probe(
        g, lagrangian ? ProbeMode::lagrangian : ProbeMode::generic, radii);
    const std::string order = std::isfinite(report.fitted_order)
                                  ? format_double(report.fitted_order)
                                  : std::string("null");
    if (args.format == "csv") {
        std::string out = "radius,h_re,h_im,limit,abs_error,fitted_order\n";
        for (const auto& row : report.rows) {
            out += format_double(row.radius) + ',' + format_double(row.h.real()) + ',' +
                   format_double(row.h.imag()) + ',' + format_double(report.limit) + ',' +
                   format_double(row.abs_error) + ',' +
                   (std::isfinite(report.fitted_order) ? format_double(report.fitted_order)
                                                       : "inf") +
                   '\n';
        }
        emit(args, out);
        return kExitOk;
    }
    std::string out = "[";
    for (std::size_t i = 0; i < report.rows.size(); ++i) {
        const auto& row = report.rows[i];
        if (i) out += ',';
        out += "{\"radius\":" + format_double(row.radius);
        out += ",\"h_re\":" + format_double(row.h.real());
        out += ",\"h_im\":" + format_double(row.h.imag());
        out += ",\"limit\":" + format_double(report.limit);
        out += ",\"abs_error\":" + format_double(row.abs_error);
        out += ",\"fitted_order\":" + order + "}";
    }
    out += "]\n";
    emit(args, out);
    return kExitOk;
}

// --- scan ---------------------------------------------------------------------

int run_scan(const CommonArgs& args, const std::string& box_text, int grid, double tol) {
    const BranchConfig base = resolve_config(args, /*need_theta=*/false);
    std::vector<std::pair<double, double>> box;
    if (box_text.empty()) {
        const double margin = 0.02;
        for (int i = 0; i < base.g(); ++i)
            box.emplace_back(margin, constants::two_pi_over_3() - margin);
    } else {
        std::stringstream stream(box_text);
        std::string item;
        while (std::getline(stream, item, ',')) {
            const auto colon = item.find(':');
            if (colon == std::string::npos)
                throw MarginViolation("box ranges look like lo:hi");
            box.emplace_back(std::stod(item.substr(0, colon)),
                             std::stod(item.substr(colon + 1)));
        }
        if (static_cast<int>(box.size()) != base.g())
            throw MarginViolation("box needs one lo:hi range per angle");
    }
    ScanOptions opts;
    opts.grid = grid;
    opts.det_threshold = tol > 0.0 ? tol : 1e-4;
    opts.threads = resolve_threads(args.threads);
    const auto cells = scan(base, box, opts);
    if (args.format == "json") {
        std::string out = "[";
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out += ',';
            out += "{\"theta\":" + doubles_json(cells[i].theta);
            out += ",\"detN\":" +
                   (cells[i].valid ? format_double(cells[i].det_n) : std::string("null"));
            out += std::string(",\"valid\":") + (cells[i].valid ? "true" : "false");
            out += std::string(",\"invertible\":") +
                   (cells[i].invertible ? "true" : "false") + "}";
        }
        out += "]\n";
        emit(args, out);
        return kExitOk;
    }
    std::string out;
    for (int i = 0; i < base.g(); ++i) out += "theta_" + std::to_string(i + 1) + ',';
    out += "detN\n";
    for (const auto& cell : cells) {
        for (double th : cell.theta) out += format_double(th) + ',';
        out += (cell.valid ? format_double(cell.det_n) : "nan") + '\n';
    }
    emit(args, out);
    return kExitOk;
}

// --- hunt -----------------------------------------------------------------------

int run_hunt(const CommonArgs& args, long long qmax, double radius, int budget, double tol) {
    const BranchConfig base = resolve_config(args);
    HuntOptions opts;
    opts.qmax = qmax;
    opts.radius = radius;
    opts.budget = budget;
    opts.threads = resolve_threads(args.threads);
    if (tol > 0.0) opts.newton.tol = tol;
    opts.newton.quad_tol = args.quad_tol;
    const auto candidates = hunt(base, opts);
    emit(args, candidates_to_json(candidates) + "\n");
    return candidates.empty() ? kExitNothingFound : kExitOk;
}

// --- certify ---------------------------------------------------------------------

int run_certify(const CommonArgs& args, double tighten) {
    if (args.config_path.empty()) throw Error("certify needs --config <candidates.json>");
    std::ifstream in(args.config_path);
    if (!in) throw Error("cannot open candidate file: " + args.config_path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    const auto candidates = candidates_from_json(buffer.str());
    if (candidates.empty()) return kExitNothingFound;

    NewtonOptions opts;
    opts.quad_tol = args.quad_tol;
    std::string out = "[";
    bool all_ok = true;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        const CertifyReport report = certify(candidates[i], tighten, opts);
        all_ok = all_ok && report.ok;
        if (i) out += ',';
        out += "{\"index\":" + std::to_string(i);
        out += ",\"residual_before\":" + format_double(report.residual_before);
        out += ",\"residual_after\":" + format_double(report.residual_after);
        out += ",\"tighten\":" + format_double(report.tighten);
        out += std::string(",\"ok\":") + (report.ok ? "true" : "false") + "}";
    }
    out += "]\n";
    emit(args, out);
    return all_ok ? kExitOk : kExitNothingFound;
}

int classify(const std::exception& error) {
    if (dynamic_cast<const OrderingViolation*>(&error) ||
        dynamic_cast<const AngleCollision*>(&error) ||
        dynamic_cast<const TooLargeT*>(&error) ||
        dynamic_cast<const MarginViolation*>(&error) ||
        dynamic_cast<const BadHalfGenus*>(&error))
        return kExitInvalidConfig;
    if (dynamic_cast<const CertificationFailed*>(&error)) return kExitNothingFound;
    return kExitNumericalFailure;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"period 2-planes of degenerating trigonal spectral curves"};
    app.require_subcommand(1);

    CommonArgs args;
    std::string radii_text, box_text;
    bool lagrangian = false;
    long long qmax = 64;
    double radius = 1e-2, tol = 0.0, tighten = 10.0;
    int budget = 1000, grid = 32;

    const auto add_common = [&](CLI::App* cmd, bool with_t = true) {
        cmd->add_option("--g", args.g, "spectral genus");
        cmd->add_option("--theta", args.theta_text, "comma-separated node angles (radians)");
        if (with_t) cmd->add_option("--t", args.t_text, "comma-separated opening parameters");
        cmd->add_option("--config", args.config_path, "JSON configuration file");
        cmd->add_option("--format", args.format, "output format: json or csv");
        cmd->add_option("--out", args.out_path, "output path (default stdout)");
        cmd->add_option("--threads", args.threads, "worker threads");
        cmd->add_option("--quad-tol", args.quad_tol, "quadrature absolute tolerance");
    };

    CLI::App* eval_cmd = app.add_subcommand("eval", "period plane at t = 0 or single-axis t");
    add_common(eval_cmd);
    CLI::App* jac_cmd = app.add_subcommand("jacobian", "derivative table, N and det N");
    add_common(jac_cmd);
    CLI::App* verify_cmd = app.add_subcommand("verify", "closed forms vs quadrature suite");
    add_common(verify_cmd);
    CLI::App* asym_cmd = app.add_subcommand("asymptote", "determinant limits along probes");
    add_common(asym_cmd, false);
    asym_cmd->add_option("--radii", radii_text, "comma-separated probe radii (>= 10)");
    asym_cmd->add_flag("--lagrangian", lagrangian, "use the half-genus probe");
    CLI::App* scan_cmd = app.add_subcommand("scan", "det N over an angle grid");
    add_common(scan_cmd, false);
    scan_cmd->add_option("--grid", grid, "grid points per axis");
    scan_cmd->add_option("--box", box_text, "per-axis ranges lo:hi, comma separated");
    scan_cmd->add_option("--tol", tol, "invertibility threshold on |det N|");
    CLI::App* hunt_cmd = app.add_subcommand("hunt", "search for rational planes");
    add_common(hunt_cmd);
    hunt_cmd->add_option("--qmax", qmax, "denominator bound");
    hunt_cmd->add_option("--radius", radius, "per-entry search radius");
    hunt_cmd->add_option("--budget", budget, "maximum number of targets");
    hunt_cmd->add_option("--tol", tol, "acceptance residual");
    CLI::App* cert_cmd = app.add_subcommand("certify", "re-check a candidate file");
    add_common(cert_cmd);
    cert_cmd->add_option("--tighten", tighten, "quadrature tightening factor");

    CLI11_PARSE(app, argc, argv);

    if (args.format != "json" && args.format != "csv" && args.format != "text") {
        std::cerr << "error: unknown format " << args.format << '\n';
        return kExitInvalidConfig;
    }
    if (args.format == "csv" &&
        (jac_cmd->parsed() || hunt_cmd->parsed() || cert_cmd->parsed())) {
        std::cerr << "error: this subcommand emits json only\n";
        return kExitInvalidConfig;
    }

    try {
        if (eval_cmd->parsed()) return run_eval(args);
        if (jac_cmd->parsed()) return run_jacobian(args);
        if (verify_cmd->parsed()) return run_verify(args);
        if (asym_cmd->parsed()) {
            if (args.g == 0) throw Error("asymptote needs --g");
            return run_asymptote(args, radii_text, lagrangian);
        }
        if (scan_cmd->parsed()) return run_scan(args, box_text, grid, tol);
        if (hunt_cmd->parsed()) return run_hunt(args, qmax, radius, budget, tol);
        if (cert_cmd->parsed()) return run_certify(args, tighten);
    } catch (const Error& error) {
        std::cerr << "error: " << error.what() << '\n';
        return classify(error);
    } catch (const std::exception& error) {
        std::cerr << "error: " << error.what() << '\n';
        return kExitNumericalFailure;
    }
    return kExitInvalidConfig;
}
