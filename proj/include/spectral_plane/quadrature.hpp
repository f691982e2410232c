#pragma once

#include <functional>

#include "spectral_plane/config.hpp"

namespace spectral_plane {

struct QuadratureResult {
    complexd value;
    double error_estimate;
};

// Adaptive Gauss-Legendre quadrature of a complex integrand over [s0, s1].
// Each panel is accepted when its two-level estimate meets the share of
// abs_tol proportional to the panel length; otherwise it is bisected, up to
// max_depth extra levels. Throws QuadratureDivergence past the depth cap.
QuadratureResult integrate_adaptive(const std::function<complexd(double)>& f, double s0,
                                    double s1, double abs_tol, int max_depth = 12);

// Fixed n-point Gauss-Legendre rule on [-1, 1]; nodes ascending.
const std::vector<std::pair<double, double>>& gauss_legendre_15();

} // namespace spectral_plane
