#pragma once

#include <array>
#include <vector>

#include "spectral_plane/config.hpp"
#include "spectral_plane/nodal_forms.hpp"

namespace spectral_plane {

// Quadrature circle in the x-plane around the colliding branch points.
struct Contour {
    complexd center;
    double radius = 0.0;
};

// Coefficients of a normalized differential on E_j(t):
//   holomorphic:  k dx/y
//   third kind:   (alpha x^2 + beta x + gamma y + delta) / ((x-xi1)(x-xi2)) dx/y
// with simple poles at the located pair and residues +-1/(2 pi i).
struct DifferentialCoeffs {
    bool holomorphic = false;
    complexd k{};
    complexd alpha{}, beta{}, gamma{}, delta{};
    NodePair pair{};
};

// Genus-1 member E_j(t) of the family, realized as y^2 = q(x) with
//   q(x) = (x - t + a) ((x - 2a)^2 (x - t + a) - 2).
// Holds the branch points, the vanishing-cycle contour and the tracked sheet
// of y along it. Immutable once built; safe to read concurrently.
class CurveModel {
public:
    const BranchConfig& cfg() const { return cfg_; }
    int axis() const { return j_; }
    double t() const { return t_; }
    double quad_tol() const { return quad_tol_; }
    const std::array<complexd, 4>& branch_points() const { return branch_points_; }
    const std::array<complexd, 2>& vanishing_pair() const { return vanishing_pair_; }
    const Contour& contour() const { return contour_; }

    complexd quartic(complexd x) const;  // q(x) = y^2

    complexd contour_point(double s) const;  // x at angle s
    complexd contour_y(double s) const;      // y on the tracked sheet

    // Cached A-cycle period of dx/y (counterclockwise, base sheet).
    complexd holomorphic_period() const { return holomorphic_period_; }
    double holomorphic_period_error() const { return holomorphic_period_error_; }

private:
    friend CurveModel build_curve(const BranchConfig&, int, double, double);
    explicit CurveModel(BranchConfig cfg) : cfg_(std::move(cfg)) {}

    BranchConfig cfg_;
    int j_ = 0;
    double t_ = 0.0;
    double quad_tol_ = 1e-11;
    std::array<double, 5> q_coeffs_{};  // ascending
    std::array<complexd, 4> branch_points_{};
    std::array<complexd, 2> vanishing_pair_{};
    Contour contour_;
    std::vector<complexd> sheet_;  // y at equispaced checkpoint angles
    complexd holomorphic_period_{};
    double holomorphic_period_error_ = 0.0;
};

// Assembles the quartic, finds its roots, selects the vanishing pair (the two
// roots nearest 0), fixes the contour and tracks the base sheet around it.
// Throws RootSeparationFailure when another branch point lands inside the
// contour, TrackingLoss when the sheet fails to close.
CurveModel build_curve(const BranchConfig& cfg, int j, double t, double quad_tol = 1e-11);

// Points over lambda = b_m on E_j(t), m != j (virtual indices allowed),
// continued in t from the closed forms on the nodal curve.
NodePair locate_pair(const CurveModel& curve, int m);

// A-cycle integral of the differential, with y continued along the contour.
complexd cycle_period(const CurveModel& curve, const DifferentialCoeffs& coeffs,
                      double* error_estimate = nullptr);

// Normalization k of the holomorphic differential, ∮ k dx/y = 1.
complexd normalize_holomorphic(const CurveModel& curve);

// Third-kind differential with residues +-1/(2 pi i) at the pair over b_m and
// vanishing A-cycle integral; delta is fixed by one scalar solve.
DifferentialCoeffs third_kind(const CurveModel& curve, int m);

// Value of the differential at the triple point over lambda = 0, in the
// distinguished chart: eps k / (a c_j) or eps (alpha - gamma) / (a c_j).
complexd omega_p0(const CurveModel& curve, int m);
complexd omega_p0(const CurveModel& curve, int m, const DifferentialCoeffs& coeffs);

// Period plane of the single-axis deformation t_j = t, all other t zero.
PeriodPlane uv_axis(const BranchConfig& cfg, int j, double t, double quad_tol = 1e-11);

// Central differences with one Richardson level for the t-columns of the
// derivative table; theta-columns are copied from the closed form, which is
// exact at t = 0. step must lie in [1e-6, 1e-2].
DerivativeTable fd_jacobian(const BranchConfig& cfg, double step, double quad_tol = 1e-11);

// Residue of the differential at a simple pole (x0, y0) away from the branch
// locus: by the local series, and independently by small-circle quadrature.
complexd residue_by_series(const DifferentialCoeffs& coeffs, complexd x0, complexd y0);
complexd residue_by_quadrature(const CurveModel& curve, const DifferentialCoeffs& coeffs,
                               complexd x0, complexd y0);

} // namespace spectral_plane
