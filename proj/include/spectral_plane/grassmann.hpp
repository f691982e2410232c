#pragma once

#include <Eigen/Core>
#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "spectral_plane/nodal_forms.hpp"

namespace spectral_plane {

// Exact rational number, always in lowest terms with positive denominator.
// Intermediates run through 128-bit integers; results that do not fit 64
// bits throw Error.
class Rational {
public:
    Rational() = default;
    Rational(long long num, long long den);

    long long num() const { return num_; }
    long long den() const { return den_; }
    double value() const { return static_cast<double>(num_) / static_cast<double>(den_); }

    Rational operator-() const { return Rational(-num_, den_); }
    Rational operator+(const Rational& o) const;
    Rational operator-(const Rational& o) const;
    Rational operator*(const Rational& o) const;
    Rational operator/(const Rational& o) const;
    bool operator==(const Rational& o) const { return num_ == o.num_ && den_ == o.den_; }
    bool is_zero() const { return num_ == 0; }

private:
    long long num_ = 0;
    long long den_ = 1;
};

// The plane as the row span of [I2 | G] after moving the pivot columns first.
struct GraphForm {
    std::array<int, 2> pivots{};         // 0-based column indices, ascending
    Eigen::Matrix2Xd coefficients;       // 2 x g
};

// Graph form with exact rational entries.
struct RationalPlane {
    std::array<int, 2> pivots{};
    std::array<std::vector<Rational>, 2> coefficients;  // rows, g entries each
    long long qmax = 0;

    int ambient_dimension() const {
        return static_cast<int>(coefficients[0].size()) + 2;
    }
    // Real spanning pair (the rows of [I2 | G] in the original column order).
    PeriodPlane to_plane() const;
    // Fully reduced row echelon form over the rationals, flattened row-major;
    // equal planes have equal canonical forms.
    std::vector<Rational> canonical() const;
};

bool equal_planes(const RationalPlane& a, const RationalPlane& b);

// Pivot selection by maximum-modulus 2x2 minor (ties to lexicographic order)
// followed by elimination. Throws DegeneratePlane when the spanning pair has
// smallest singular value <= 1e-10.
GraphForm graph_form(const PeriodPlane& plane);

// Entrywise best rational approximation with denominators <= qmax; returns
// the plane when every entry lands within tol, nothing otherwise.
std::optional<RationalPlane> rational_round(const GraphForm& gf, long long qmax,
                                            double tol);

// Largest principal angle between the two 2-planes.
double principal_distance(const PeriodPlane& a, const PeriodPlane& b);

// Closest rational to x among denominators 1..qmax (convergent or
// semiconvergent of the continued fraction; ties prefer the smaller
// denominator).
Rational best_rational(double x, long long qmax);

// Every reduced fraction p/q with q <= qmax inside [lo, hi], ascending.
std::vector<Rational> rationals_in_interval(double lo, double hi, long long qmax);

} // namespace spectral_plane
