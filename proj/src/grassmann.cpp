#include "spectral_plane/grassmann.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <numeric>

#include "spectral_plane/errors.hpp"

namespace spectral_plane {

namespace {

using int128 = __int128;

long long to_int64(int128 v) {
    if (v > std::numeric_limits<long long>::max() || v < std::numeric_limits<long long>::min())
        throw Error("rational arithmetic overflow");
    return static_cast<long long>(v);
}

int128 gcd128(int128 a, int128 b) {
    if (a < 0) a = -a;
    if (b < 0) b = -b;
    while (b != 0) {
        const int128 r = a % b;
        a = b;
        b = r;
    }
    return a;
}

Rational make_reduced(int128 num, int128 den) {
    if (den == 0) throw Error("rational with zero denominator");
    if (den < 0) {
        num = -num;
        den = -den;
    }
    const int128 g = num == 0 ? den : gcd128(num, den);
    return Rational(to_int64(num / g), to_int64(den / g));
}

} // namespace

Rational::Rational(long long num, long long den) : num_(num), den_(den) {
    if (den_ == 0) throw Error("rational with zero denominator");
    if (den_ < 0) {
        num_ = -num_;
        den_ = -den_;
    }
    const long long g = num_ == 0 ? den_ : std::gcd(std::abs(num_), den_);
    num_ /= g;
    den_ /= g;
}

Rational Rational::operator+(const Rational& o) const {
    return make_reduced(int128(num_) * o.den_ + int128(o.num_) * den_, int128(den_) * o.den_);
}

Rational Rational::operator-(const Rational& o) const {
    return make_reduced(int128(num_) * o.den_ - int128(o.num_) * den_, int128(den_) * o.den_);
}

Rational Rational::operator*(const Rational& o) const {
    return make_reduced(int128(num_) * o.num_, int128(den_) * o.den_);
}

Rational Rational::operator/(const Rational& o) const {
    if (o.num_ == 0) throw Error("rational division by zero");
    return make_reduced(int128(num_) * o.den_, int128(den_) * o.num_);
}

PeriodPlane RationalPlane::to_plane() const {
    const int n = ambient_dimension();
    PeriodPlane plane;
    plane.u = Eigen::VectorXd::Zero(n);
    plane.v = Eigen::VectorXd::Zero(n);
    plane.u[pivots[0]] = 1.0;
    plane.v[pivots[1]] = 1.0;
    int col = 0;
    for (int c = 0; c < n; ++c) {
        if (c == pivots[0] || c == pivots[1]) continue;
        plane.u[c] = coefficients[0][col].value();
        plane.v[c] = coefficients[1][col].value();
        ++col;
    }
    return plane;
}

std::vector<Rational> RationalPlane::canonical() const {
    const int n = ambient_dimension();
    // Rebuild the exact 2 x n matrix in the original column order.
    std::array<std::vector<Rational>, 2> rows;
    rows[0].assign(n, Rational(0, 1));
    rows[1].assign(n, Rational(0, 1));
    rows[0][pivots[0]] = Rational(1, 1);
    rows[1][pivots[1]] = Rational(1, 1);
    int col = 0;
    for (int c = 0; c < n; ++c) {
        if (c == pivots[0] || c == pivots[1]) continue;
        rows[0][c] = coefficients[0][col];
        rows[1][c] = coefficients[1][col];
        ++col;
    }
    // Reduced row echelon form over Q.
    int lead = 0;
    for (int r = 0; r < 2; ++r) {
        int pivot_row = -1;
        while (lead < n && pivot_row < 0) {
            for (int rr = r; rr < 2 && pivot_row < 0; ++rr)
                if (!rows[rr][lead].is_zero()) pivot_row = rr;
            if (pivot_row < 0) ++lead;
        }
        if (pivot_row < 0) break;
        std::swap(rows[r], rows[pivot_row]);
        const Rational inv = Rational(1, 1) / rows[r][lead];
        for (int c = lead; c < n; ++c) rows[r][c] = rows[r][c] * inv;
        for (int rr = 0; rr < 2; ++rr) {
            if (rr == r || rows[rr][lead].is_zero()) continue;
            const Rational factor = rows[rr][lead];
            for (int c = 0; c < n; ++c)
                rows[rr][c] = rows[rr][c] - factor * rows[r][c];
        }
        ++lead;
    }
    std::vector<Rational> flat;
    flat.reserve(2 * n);
    for (const auto& row : rows)
        for (const auto& entry : row) flat.push_back(entry);
    return flat;
}

bool equal_planes(const RationalPlane& a, const RationalPlane& b) {
    if (a.ambient_dimension() != b.ambient_dimension()) return false;
    const auto ca = a.canonical();
    const auto cb = b.canonical();
    return std::equal(ca.begin(), ca.end(), cb.begin(),
                      [](const Rational& x, const Rational& y) { return x == y; });
}

GraphForm graph_form(const PeriodPlane& plane) {
    const int n = static_cast<int>(plane.u.size());
    Eigen::MatrixXd span(2, n);
    span.row(0) = plane.u.transpose();
    span.row(1) = plane.v.transpose();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(span);
    if (!(svd.singularValues()(1) > 1e-10))
        throw DegeneratePlane("spanning pair is numerically rank deficient");

    std::array<int, 2> pivots{0, 1};
    double best = -1.0;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const double minor = std::abs(plane.u[i] * plane.v[j] - plane.u[j] * plane.v[i]);
            if (minor > best) {
                best = minor;
                pivots = {i, j};
            }
        }
    }

    Eigen::Matrix2d block;
    block << plane.u[pivots[0]], plane.u[pivots[1]], plane.v[pivots[0]], plane.v[pivots[1]];
    GraphForm gf;
    gf.pivots = pivots;
    gf.coefficients.resize(2, n - 2);
    int col = 0;
    for (int c = 0; c < n; ++c) {
        if (c == pivots[0] || c == pivots[1]) continue;
        const Eigen::Vector2d rhs(plane.u[c], plane.v[c]);
        gf.coefficients.col(col++) = block.inverse() * rhs;
    }
    return gf;
}

std::optional<RationalPlane> rational_round(const GraphForm& gf, long long qmax, double tol) {
    if (qmax < 1) throw Error("qmax must be >= 1");
    RationalPlane plane;
    plane.pivots = gf.pivots;
    plane.qmax = qmax;
    for (int r = 0; r < 2; ++r) {
        plane.coefficients[r].reserve(gf.coefficients.cols());
        for (int c = 0; c < gf.coefficients.cols(); ++c) {
            const Rational approx = best_rational(gf.coefficients(r, c), qmax);
            if (std::abs(approx.value() - gf.coefficients(r, c)) > tol) return std::nullopt;
            plane.coefficients[r].push_back(approx);
        }
    }
    return plane;
}

double principal_distance(const PeriodPlane& a, const PeriodPlane& b) {
    const auto orthonormal = [](const PeriodPlane& p) {
        Eigen::MatrixXd m(p.u.size(), 2);
        m.col(0) = p.u;
        m.col(1) = p.v;
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU);
        if (!(svd.singularValues()(1) > 1e-10))
            throw DegeneratePlane("plane is numerically rank deficient");
        return Eigen::MatrixXd(svd.matrixU());
    };
    const Eigen::MatrixXd qa = orthonormal(a);
    const Eigen::MatrixXd qb = orthonormal(b);
    // Cosine route resolves large angles, sine route (residual after
    // projecting onto the first plane) resolves small ones.
    Eigen::JacobiSVD<Eigen::Matrix2d> svd(qa.transpose() * qb);
    const double smallest_cos = std::clamp(svd.singularValues()(1), 0.0, 1.0);
    if (smallest_cos * smallest_cos < 0.5) return std::acos(smallest_cos);
    const Eigen::MatrixXd residual = qb - qa * (qa.transpose() * qb);
    const double largest_sin =
        std::clamp(residual.jacobiSvd().singularValues()(0), 0.0, 1.0);
    return std::asin(largest_sin);
}

Rational best_rational(double x, long long qmax) {
    if (qmax < 1) throw Error("qmax must be >= 1");
    if (!std::isfinite(x) || std::abs(x) > 1e15)
        throw Error("value out of rational-approximation range");
    if (x < 0.0) {
        const Rational r = best_rational(-x, qmax);
        return Rational(-r.num(), r.den());
    }
    // Continued-fraction convergents p/q; the best bounded-denominator
    // approximation is the last admissible convergent or a semiconvergent
    // against it.
    long long p_prev = 1, q_prev = 0;
    long long p_cur = static_cast<long long>(std::floor(x)), q_cur = 1;
    double y = x - std::floor(x);
    for (int iter = 0; iter < 64 && y > 1e-18; ++iter) {
        y = 1.0 / y;
        const double a_f = std::floor(y);
        if (a_f > 9e17) break;
        const long long a = static_cast<long long>(a_f);
        const long long p_next = a * p_cur + p_prev;
        const long long q_next = a * q_cur + q_prev;
        if (q_next > qmax) break;
        p_prev = p_cur;
        q_prev = q_cur;
        p_cur = p_next;
        q_cur = q_next;
        y -= a_f;
    }
    Rational best(p_cur, q_cur);
    const long long steps = (qmax - q_prev) / q_cur;
    if (steps >= 1 && q_prev + steps * q_cur >= 1) {
        const Rational semi(p_prev + steps * p_cur, q_prev + steps * q_cur);
        const double err_best = std::abs(best.value() - x);
        const double err_semi = std::abs(semi.value() - x);
        if (err_semi < err_best || (err_semi == err_best && semi.den() < best.den()))
            best = semi;
    }
    return best;
}

std::vector<Rational> rationals_in_interval(double lo, double hi, long long qmax) {
    if (!(lo <= hi)) throw Error("empty interval");
    if ((hi - lo) * static_cast<double>(qmax) * static_cast<double>(qmax) > 5e7)
        throw Error("interval enumeration too large");
    std::vector<Rational> out;
    for (long long q = 1; q <= qmax; ++q) {
        const long long p_lo = static_cast<long long>(std::ceil(lo * q - 1e-12));
        const long long p_hi = static_cast<long long>(std::floor(hi * q + 1e-12));
        for (long long p = p_lo; p <= p_hi; ++p) {
            if (std::gcd(std::abs(p), q) != 1) continue;
            out.emplace_back(p, q);
        }
    }
    std::sort(out.begin(), out.end(), [](const Rational& a, const Rational& b) {
        const int128 lhs = int128(a.num()) * b.den();
        const int128 rhs = int128(b.num()) * a.den();
        if (lhs != rhs) return lhs < rhs;
        return a.den() < b.den();
    });
    return out;
}

} // namespace spectral_plane
