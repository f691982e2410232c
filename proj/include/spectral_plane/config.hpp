#pragma once

#include <complex>
#include <vector>

namespace spectral_plane {

using complexd = std::complex<double>;

// Global constants of the curve family.
namespace constants {

// a = 2^{-1/3}, the scale fixing the branch points 3a and -a.
double a();

// epsilon = exp(2*pi*i/3), the primitive cube root of unity.
complexd epsilon();

// 2*pi/3, the upper end of the angle chart.
double two_pi_over_3();

// sqrt(3)/(2*pi), the modulus of every period entry on the nodal locus.
double period_modulus();

} // namespace constants

// Raw, unvalidated input: genus, node angles, opening parameters, bounds.
struct RawConfig {
    int g = 0;
    std::vector<double> theta;
    std::vector<double> t;       // empty means all zeros
    double t_max = 0.05;
    double gap_margin = 1e-3;    // radians
};

// Validated family coordinates. Immutable after construction; derived
// cube roots c_m = exp(i*theta_m) and node positions b_m = c_m^3 are
// precomputed. Indices are 0-based; m = g and m = g+1 are the virtual
// nodes at angles 0 and 2*pi/3 housing the points over lambda = 1.
class BranchConfig {
public:
    static BranchConfig validate(const RawConfig& raw);

    int g() const { return g_; }
    const std::vector<double>& theta() const { return theta_; }
    const std::vector<double>& t() const { return t_; }
    double t_max() const { return t_max_; }
    double gap_margin() const { return gap_margin_; }

    // Angle of node m, with the virtual indices g, g+1 mapped to 0 and 2*pi/3.
    double angle(int m) const;
    complexd cube_root(int m) const;      // c_m
    complexd node_position(int m) const;  // b_m = c_m^3

    // Copy with t replaced (revalidated).
    BranchConfig with_t(const std::vector<double>& t) const;
    // Copy with theta replaced (revalidated).
    BranchConfig with_theta(const std::vector<double>& theta) const;

    RawConfig raw() const;

    bool operator==(const BranchConfig& other) const;

private:
    BranchConfig() = default;

    int g_ = 0;
    std::vector<double> theta_;
    std::vector<double> t_;
    double t_max_ = 0.05;
    double gap_margin_ = 1e-3;
    std::vector<complexd> c_;  // size g+2, virtual entries included
    std::vector<complexd> b_;
};

// Point of the analytic extension: z_j replaces the unit-circle cube root c_j.
struct ExtendedEvalPoint {
    std::vector<complexd> z;
};

// Validates the pairwise pole margins |z_m/z_j + z_j/z_m + 1| >= margin
// and |z_j| > 0. Throws MarginViolation.
ExtendedEvalPoint make_extended_point(std::vector<complexd> z, double margin = 1e-8);

// Fan of half-genus directions: z_m = r e^{i phi_m}, z_{p+m} = -r e^{i phi_m}.
// phi must be strictly increasing inside (0, pi/3).
ExtendedEvalPoint lagrangian_points(int p, const std::vector<double>& phi, double radius,
                                    double margin = 1e-8);

// Probe curves z_m = z^m (generic) and z_m = z^m, z_{p+m} = -z^m (power mode).
ExtendedEvalPoint generic_powers(int g, complexd z, double margin = 1e-8);
ExtendedEvalPoint lagrangian_powers(int p, complexd z, double margin = 1e-8);

} // namespace spectral_plane
