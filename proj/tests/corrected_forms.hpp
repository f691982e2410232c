#pragma once

#include <cmath>
#include <numbers>

#include "spectral_plane/nodal_forms.hpp"

// Test-side oracle for the t-derivatives of the quadrature route.
//
// The closed-form derivative table (analytic_jacobian) extracts its
// third-order residues at the node with the smooth square-root factor s(x),
// s(x)^2 = (x-3a)(x+a), frozen at s(0). Done without freezing, the residue
// of p0/(x^3 s^3) is [x^2](p0/s^3) = (-3a + 8a/3)/s(0)^3, one ninth of the
// frozen-s value, and the A-cycle condition forces a nonzero delta-dot.
// The formulas below are derived that way and validated against quadrature
// finite differences in test_elliptic.cpp; they are what the oracle route
// actually measures.
namespace spectral_plane::testing {

inline complexd corrected_k_dot() {
    return complexd(-std::sqrt(3.0) / (18.0 * std::numbers::pi), 0.0);
}

// d/dt omega^j(P0) at t = 0.
inline complexd corrected_diagonal_dot(const BranchConfig& cfg, int j) {
    return constants::epsilon() * corrected_k_dot() /
           (constants::a() * cfg.cube_root(j));
}

struct CorrectedPairDots {
    complexd delta_dot;
    complexd omega_dot;  // d/dt omega^m(P0) at t = 0, m != j
};

inline CorrectedPairDots corrected_pair_dots(const BranchConfig& cfg, int m, int j) {
    const double a = constants::a();
    const complexd four_pi_i(0.0, 4.0 * std::numbers::pi);
    const NodePair p = node_pair(cfg.angle(m) - cfg.theta()[j]);
    const complexd sum = p.xi1 + p.xi2;
    const complexd prod = p.xi1 * p.xi2;
    const complexd alpha0 = (p.eta1 / p.xi1 - p.eta2 / p.xi2) / four_pi_i;
    const complexd beta0 = (p.eta1 - p.eta2) / four_pi_i - sum * alpha0;

    CorrectedPairDots dots;
    dots.delta_dot = (beta0 * (sum / prod - 1.0 / a) + alpha0) / (3.0 * a * a);
    const complexd ratio1_dot =
        -p.eta1 * (2.0 * p.xi1 - 2.0 * a) / (3.0 * p.xi1 * p.xi1 * p.xi1);
    const complexd ratio2_dot =
        -p.eta2 * (2.0 * p.xi2 - 2.0 * a) / (3.0 * p.xi2 * p.xi2 * p.xi2);
    const complexd gamma_dot = 2.0 * a * (p.xi1 - p.xi2) / (3.0 * prod) / four_pi_i;
    dots.omega_dot = constants::epsilon() / (a * cfg.cube_root(j)) *
                     (dots.delta_dot / prod + (ratio1_dot - ratio2_dot) / four_pi_i -
                      gamma_dot);
    return dots;
}

} // namespace spectral_plane::testing
