#include "spectral_plane/elliptic_curve.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "spectral_plane/errors.hpp"
#include "spectral_plane/quadrature.hpp"

namespace spectral_plane {

namespace {

constexpr int kSheetCheckpoints = 512;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

complexd poly_eval(const double* coeffs, int degree, complexd x) {
    complexd acc = coeffs[degree];
    for (int k = degree - 1; k >= 0; --k) acc = acc * x + coeffs[k];
    return acc;
}

// Roots of a monic-normalizable real polynomial via the companion matrix,
// with a couple of damped Newton polish steps.
std::vector<complexd> poly_roots(const std::vector<double>& coeffs) {
    const int degree = static_cast<int>(coeffs.size()) - 1;
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(degree, degree);
    for (int i = 1; i < degree; ++i) companion(i, i - 1) = 1.0;
    for (int i = 0; i < degree; ++i) companion(i, degree - 1) = -coeffs[i] / coeffs[degree];
    Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, false);
    std::vector<double> dcoeffs(degree);
    for (int k = 1; k <= degree; ++k) dcoeffs[k - 1] = k * coeffs[k];
    std::vector<complexd> roots(degree);
    for (int i = 0; i < degree; ++i) {
        complexd x = solver.eigenvalues()[i];
        for (int iter = 0; iter < 2; ++iter) {
            const complexd d = poly_eval(dcoeffs.data(), degree - 1, x);
            if (std::abs(d) < 1e-14) break;
            const complexd step = poly_eval(coeffs.data(), degree, x) / d;
            if (std::abs(step) > 0.1 * (1.0 + std::abs(x))) break;
            x -= step;
        }
        roots[i] = x;
    }
    // Deterministic order regardless of the eigensolver's internal one.
    std::sort(roots.begin(), roots.end(), [](complexd lhs, complexd rhs) {
        if (lhs.real() != rhs.real()) return lhs.real() < rhs.real();
        return lhs.imag() < rhs.imag();
    });
    return roots;
}

// Coefficients (ascending) of p_t(x) - value, where
// p_t(x) = (x - 2a)^2 (x - t + a) - 1.
std::vector<double> shifted_cubic(double t, double value) {
    const double a = constants::a();
    const double w = t - a;
    return {-4.0 * a * a * w - 1.0 - value, 4.0 * a * a + 4.0 * a * w, -(4.0 * a + w), 1.0};
}

// Branch-cut-safe reference sheet at t = 0: y = x * i * sqrt(-(x-3a)(x+a)),
// which carries y/x -> +i sqrt(3) a at the node.
complexd reference_sheet(complexd x) {
    const double a = constants::a();
    return x * complexd(0.0, 1.0) * std::sqrt(-(x - 3.0 * a) * (x + a));
}

complexd nearer(complexd candidate, complexd target) {
    return std::abs(candidate - target) <= std::abs(-candidate - target) ? candidate
                                                                         : -candidate;
}

complexd density(const DifferentialCoeffs& c, complexd x, complexd y) {
    if (c.holomorphic) return c.k / y;
    const complexd num = (c.alpha * x + c.beta) * x + c.gamma * y + c.delta;
    return num / ((x - c.pair.xi1) * (x - c.pair.xi2) * y);
}

} // namespace

complexd CurveModel::quartic(complexd x) const {
    return poly_eval(q_coeffs_.data(), 4, x);
}

complexd CurveModel::contour_point(double s) const {
    return contour_.center + contour_.radius * std::polar(1.0, s);
}

complexd CurveModel::contour_y(double s) const {
    int i = static_cast<int>(std::floor(s / kTwoPi * kSheetCheckpoints));
    i = std::clamp(i, 0, kSheetCheckpoints - 1);
    return nearer(std::sqrt(quartic(contour_point(s))), sheet_[i]);
}

CurveModel build_curve(const BranchConfig& cfg, int j, double t, double quad_tol) {
    if (j < 0 || j >= cfg.g()) throw Error("axis index out of range");
    if (!(std::abs(t) <= cfg.t_max())) throw TooLargeT("|t| exceeds t_max");

    const double a = constants::a();
    CurveModel curve(cfg);
    curve.j_ = j;
    curve.t_ = t;
    curve.quad_tol_ = quad_tol;

    // q(x) = (x - w) * (p_t(x) - 1), w = t - a.
    const double w = t - a;
    const auto cubic = shifted_cubic(t, 1.0);
    curve.q_coeffs_ = {-w * cubic[0], cubic[0] - w * cubic[1], cubic[1] - w * cubic[2],
                       cubic[2] - w * cubic[3], cubic[3]};

    // x = w is a root of q exactly; only the cubic factor needs root finding.
    // At t = 0 the cubic is x^2 (x - 3a) and the double root is taken as is.
    std::vector<complexd> roots;
    if (t == 0.0) {
        roots = {0.0, 0.0, complexd(3.0 * a, 0.0)};
    } else {
        roots = poly_roots(cubic);
    }
    roots.push_back(complexd(w, 0.0));
    std::sort(roots.begin(), roots.end(),
              [](complexd lhs, complexd rhs) { return std::abs(lhs) < std::abs(rhs); });
    curve.vanishing_pair_ = {roots[0], roots[1]};
    std::copy(roots.begin(), roots.end(), curve.branch_points_.begin());

    const complexd center = 0.5 * (roots[0] + roots[1]);
    const double half_sep = 0.5 * std::abs(roots[0] - roots[1]);
    curve.contour_.center = center;
    curve.contour_.radius = std::max(3.0 * half_sep, 1e-4 * a);
    for (int i = 2; i < 4; ++i) {
        if (std::abs(roots[i] - center) <= curve.contour_.radius) {
            std::ostringstream os;
            os << "branch point " << roots[i] << " inside the vanishing-cycle contour";
            throw RootSeparationFailure(os.str());
        }
    }

    // Track the base sheet once around the contour.
    curve.sheet_.resize(kSheetCheckpoints);
    const complexd x0 = curve.contour_point(0.0);
    curve.sheet_[0] = nearer(std::sqrt(curve.quartic(x0)), reference_sheet(x0));
    for (int i = 1; i < kSheetCheckpoints; ++i) {
        const complexd x = curve.contour_point(kTwoPi * i / kSheetCheckpoints);
        curve.sheet_[i] = nearer(std::sqrt(curve.quartic(x)), curve.sheet_[i - 1]);
    }
    const complexd closure = nearer(std::sqrt(curve.quartic(x0)), curve.sheet_.back());
    if (std::abs(closure - curve.sheet_[0]) > 0.5 * std::abs(curve.sheet_[0]))
        throw TrackingLoss("sheet did not close around the contour");

    const auto period = integrate_adaptive(
        [&curve](double s) {
            const complexd dx = complexd(0.0, 1.0) * (curve.contour_point(s) -
                                                      curve.contour_.center);
            return dx / curve.contour_y(s);
        },
        0.0, kTwoPi, quad_tol);
    curve.holomorphic_period_ = period.value;
    curve.holomorphic_period_error_ = period.error_estimate;
    return curve;
}

NodePair locate_pair(const CurveModel& curve, int m) {
    const BranchConfig& cfg = curve.cfg();
    if (m == curve.axis() || m < 0 || m >= cfg.g() + 2)
        throw Error("locate_pair requires m != j in range");
    const double a = constants::a();
    const double theta_mj = cfg.angle(m) - cfg.theta()[curve.axis()];
    const double target = std::cos(3.0 * theta_mj);

    NodePair seed = node_pair(theta_mj);
    if (curve.t() == 0.0) return seed;

    static constexpr int kPerms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2},
                                         {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
    for (int steps = 8; steps <= 1024; steps *= 2) {
        std::array<complexd, 3> xi = {seed.xi1, seed.xi2,
                                      a * (2.0 * std::cos(theta_mj) + 1.0)};
        std::array<complexd, 2> eta = {seed.eta1, seed.eta2};
        bool lost = false;
        for (int k = 1; k <= steps && !lost; ++k) {
            const double tk = curve.t() * k / steps;
            const auto roots = poly_roots(shifted_cubic(tk, target));
            int best = -1;
            double best_cost = 0.0;
            for (int p = 0; p < 6; ++p) {
                double cost = 0.0;
                for (int i = 0; i < 3; ++i) cost += std::abs(roots[kPerms[p][i]] - xi[i]);
                if (best < 0 || cost < best_cost) {
                    best = p;
                    best_cost = cost;
                }
            }
            double min_sep = std::abs(roots[0] - roots[1]);
            min_sep = std::min(min_sep, std::abs(roots[0] - roots[2]));
            min_sep = std::min(min_sep, std::abs(roots[1] - roots[2]));
            double max_move = 0.0;
            for (int i = 0; i < 3; ++i)
                max_move = std::max(max_move, std::abs(roots[kPerms[best][i]] - xi[i]));
            if (max_move > 0.45 * min_sep) {
                lost = true;
                break;
            }
            for (int i = 0; i < 3; ++i) xi[i] = roots[kPerms[best][i]];
            for (int i = 0; i < 2; ++i) {
                const complexd eta_sq = (xi[i] - (tk - a)) * (target - 1.0);
                eta[i] = nearer(std::sqrt(eta_sq), eta[i]);
            }
        }
        if (!lost) {
            NodePair pair;
            pair.xi1 = xi[0];
            pair.xi2 = xi[1];
            pair.eta1 = eta[0];
            pair.eta2 = eta[1];
            pair.theta_mj = theta_mj;
            return pair;
        }
    }
    throw TrackingLoss("root continuation ambiguous after step refinement");
}

complexd cycle_period(const CurveModel& curve, const DifferentialCoeffs& coeffs,
                      double* error_estimate) {
    const auto result = integrate_adaptive(
        [&](double s) {
            const complexd x = curve.contour_point(s);
            const complexd dx = complexd(0.0, 1.0) * (x - curve.contour().center);
            return density(coeffs, x, curve.contour_y(s)) * dx;
        },
        0.0, kTwoPi, curve.quad_tol());
    if (error_estimate) *error_estimate = result.error_estimate;
    return result.value;
}

complexd normalize_holomorphic(const CurveModel& curve) {
    return 1.0 / curve.holomorphic_period();
}

DifferentialCoeffs third_kind(const CurveModel& curve, int m) {
    const NodePair pair = locate_pair(curve, m);
    // Poles drifting into (or onto) the vanishing cycle would silently change
    // the homology class the quadrature computes; refuse instead.
    for (complexd xi : {pair.xi1, pair.xi2}) {
        if (std::abs(xi - curve.contour().center) <= 1.05 * curve.contour().radius) {
            std::ostringstream os;
            os << "pole at x = " << xi << " too close to the vanishing cycle";
            throw SingularPair(os.str());
        }
    }

    const complexd four_pi_i(0.0, 4.0 * std::numbers::pi);
    DifferentialCoeffs free_part;
    free_part.holomorphic = false;
    free_part.pair = pair;
    free_part.gamma = (pair.xi1 - pair.xi2) / four_pi_i;
    const complexd alpha0 = (pair.eta1 / pair.xi1 - pair.eta2 / pair.xi2) / four_pi_i;
    free_part.alpha = alpha0;
    free_part.beta = (pair.eta1 - pair.eta2) / four_pi_i - (pair.xi1 + pair.xi2) * alpha0;
    free_part.delta = 0.0;

    // The delta-dependence of the differential is delta/(xi1 xi2) * dx/y, so
    // one A-cycle integral of the delta-free part fixes delta.
    const complexd base_integral = cycle_period(curve, free_part);
    const complexd prod = pair.xi1 * pair.xi2;
    const complexd delta = -base_integral * prod / curve.holomorphic_period();

    DifferentialCoeffs coeffs = free_part;
    coeffs.delta = delta;
    coeffs.alpha = alpha0 + delta / prod;
    coeffs.beta = (pair.eta1 - pair.eta2) / four_pi_i - (pair.xi1 + pair.xi2) * coeffs.alpha;
    return coeffs;
}

complexd omega_p0(const CurveModel& curve, int m, const DifferentialCoeffs& coeffs) {
    const complexd scale =
        constants::epsilon() / (constants::a() * curve.cfg().cube_root(curve.axis()));
    if (m == curve.axis()) return scale * coeffs.k;
    return scale * (coeffs.alpha - coeffs.gamma);
}

complexd omega_p0(const CurveModel& curve, int m) {
    if (m == curve.axis()) {
        DifferentialCoeffs coeffs;
        coeffs.holomorphic = true;
        coeffs.k = normalize_holomorphic(curve);
        return omega_p0(curve, m, coeffs);
    }
    return omega_p0(curve, m, third_kind(curve, m));
}

PeriodPlane uv_axis(const BranchConfig& cfg, int j, double t, double quad_tol) {
    for (double tj : cfg.t())
        if (tj != 0.0) throw Error("uv_axis wants the deformation in its t argument");
    const CurveModel curve = build_curve(cfg, j, t, quad_tol);
    const int n = cfg.g() + 2;
    PeriodPlane plane;
    plane.u.resize(n);
    plane.v.resize(n);
    for (int m = 0; m < n; ++m) {
        const complexd value = omega_p0(curve, m);
        plane.u[m] = value.real();
        plane.v[m] = value.imag();
    }
    return plane;
}

DerivativeTable fd_jacobian(const BranchConfig& cfg, double step, double quad_tol) {
    if (!(step >= 1e-6 && step <= 1e-2)) throw Error("fd step outside [1e-6, 1e-2]");
    const int g = cfg.g();
    DerivativeTable table = analytic_jacobian(cfg);  // theta-columns are exact
    for (int j = 0; j < g; ++j) {
        const auto column = [&](double h) {
            const PeriodPlane plus = uv_axis(cfg, j, h, quad_tol);
            const PeriodPlane minus = uv_axis(cfg, j, -h, quad_tol);
            return std::make_pair(Eigen::VectorXd((plus.u - minus.u) / (2.0 * h)),
                                  Eigen::VectorXd((plus.v - minus.v) / (2.0 * h)));
        };
        const auto [du_h, dv_h] = column(step);
        const auto [du_h2, dv_h2] = column(0.5 * step);
        table.du_dt.col(j) = (4.0 * du_h2 - du_h) / 3.0;
        table.dv_dt.col(j) = (4.0 * dv_h2 - dv_h) / 3.0;
    }
    return table;
}

complexd residue_by_series(const DifferentialCoeffs& coeffs, complexd x0, complexd y0) {
    const bool first = std::abs(x0 - coeffs.pair.xi1) <= std::abs(x0 - coeffs.pair.xi2);
    const complexd other = first ? coeffs.pair.xi2 : coeffs.pair.xi1;
    const complexd num = (coeffs.alpha * x0 + coeffs.beta) * x0 + coeffs.gamma * y0 +
                         coeffs.delta;
    return num / ((x0 - other) * y0);
}

complexd residue_by_quadrature(const CurveModel& curve, const DifferentialCoeffs& coeffs,
                               complexd x0, complexd y0) {
    const bool first = std::abs(x0 - coeffs.pair.xi1) <= std::abs(x0 - coeffs.pair.xi2);
    const complexd other = first ? coeffs.pair.xi2 : coeffs.pair.xi1;
    double clearance = std::abs(x0 - other);
    for (complexd root : curve.branch_points())
        clearance = std::min(clearance, std::abs(x0 - root));
    const double rho = 0.2 * clearance;
    if (!(rho > 0.0)) throw SingularPair("pole coincides with another singular point");

    const int nodes = 1024;
    complexd acc = 0.0;
    complexd y_prev = y0;
    for (int k = 0; k < nodes; ++k) {
        const double s = kTwoPi * k / nodes;
        const complexd x = x0 + rho * std::polar(1.0, s);
        const complexd y = nearer(std::sqrt(curve.quartic(x)), y_prev);
        y_prev = y;
        const complexd dx = complexd(0.0, 1.0) * (x - x0);
        acc += density(coeffs, x, y) * dx;
    }
    acc *= kTwoPi / nodes;
    return acc / complexd(0.0, kTwoPi);
}

} // namespace spectral_plane
