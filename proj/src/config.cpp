#include "spectral_plane/config.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "spectral_plane/errors.hpp"

namespace spectral_plane {

namespace constants {

double a() {
    static const double value = std::cbrt(0.5);
    return value;
}

complexd epsilon() {
    static const complexd value(-0.5, 0.5 * std::sqrt(3.0));
    return value;
}

double two_pi_over_3() { return 2.0 * std::numbers::pi / 3.0; }

double period_modulus() { return std::sqrt(3.0) / (2.0 * std::numbers::pi); }

} // namespace constants

namespace {

std::string index_msg(const char* what, int j, double value) {
    std::ostringstream os;
    os << what << " at index " << j << " (value " << value << ")";
    return os.str();
}

// Distance of x to the nearest of the walls {0, +2pi/3, -2pi/3}.
double wall_distance(double gap) {
    const double w = constants::two_pi_over_3();
    return std::min({std::abs(gap), std::abs(gap - w), std::abs(gap + w)});
}

} // namespace

BranchConfig BranchConfig::validate(const RawConfig& raw) {
    if (raw.g < 1) throw OrderingViolation("spectral genus must be >= 1");
    if (static_cast<int>(raw.theta.size()) != raw.g)
        throw OrderingViolation("theta must have g entries");
    if (!raw.t.empty() && static_cast<int>(raw.t.size()) != raw.g)
        throw TooLargeT("t must be empty or have g entries");
    if (!(raw.gap_margin > 0.0) || !(raw.t_max > 0.0))
        throw MarginViolation("gap_margin and t_max must be positive");

    // Strict increase first; chart bounds are checked after the collision
    // tests so that a gap landing on 2pi/3 reports as a collision.
    for (int j = 0; j + 1 < raw.g; ++j) {
        if (!(raw.theta[j] < raw.theta[j + 1]))
            throw OrderingViolation(index_msg("angles not strictly increasing", j + 1,
                                              raw.theta[j + 1]));
    }

    const double w = constants::two_pi_over_3();
    // Pairwise gaps (including against the virtual angles 0 and 2pi/3) must
    // stay clear of 0 and +-2pi/3, where b_m = b_j or the Y denominator
    // 2 cos(theta_mj) + 1 vanishes.
    std::vector<double> all = raw.theta;
    all.push_back(0.0);
    all.push_back(w);
    for (std::size_t m = 0; m < all.size(); ++m) {
        for (std::size_t j = m + 1; j < all.size(); ++j) {
            if (m == all.size() - 2 && j == all.size() - 1) continue; // the two virtual angles
            if (wall_distance(all[m] - all[j]) < raw.gap_margin)
                throw AngleCollision(index_msg("angle gap too close to 0 or 2pi/3",
                                               static_cast<int>(j), all[j] - all[m]));
        }
    }

    for (int j = 0; j < raw.g; ++j) {
        if (!(raw.theta[j] > 0.0) || !(raw.theta[j] < w))
            throw OrderingViolation(index_msg("angle outside the chart (0, 2pi/3)", j,
                                              raw.theta[j]));
    }

    std::vector<double> t = raw.t.empty() ? std::vector<double>(raw.g, 0.0) : raw.t;
    for (int j = 0; j < raw.g; ++j) {
        if (!(std::abs(t[j]) < raw.t_max))
            throw TooLargeT(index_msg("|t| >= t_max", j, t[j]));
    }

    BranchConfig cfg;
    cfg.g_ = raw.g;
    cfg.theta_ = raw.theta;
    cfg.t_ = std::move(t);
    cfg.t_max_ = raw.t_max;
    cfg.gap_margin_ = raw.gap_margin;
    cfg.c_.resize(raw.g + 2);
    cfg.b_.resize(raw.g + 2);
    for (int m = 0; m < raw.g + 2; ++m) {
        const double th = cfg.angle(m);
        cfg.c_[m] = std::polar(1.0, th);
        cfg.b_[m] = std::polar(1.0, 3.0 * th);
    }
    return cfg;
}

double BranchConfig::angle(int m) const {
    if (m < g_) return theta_[m];
    if (m == g_) return 0.0;
    return constants::two_pi_over_3();
}

complexd BranchConfig::cube_root(int m) const { return c_[m]; }

complexd BranchConfig::node_position(int m) const { return b_[m]; }

BranchConfig BranchConfig::with_t(const std::vector<double>& t) const {
    RawConfig raw = this->raw();
    raw.t = t;
    return validate(raw);
}

BranchConfig BranchConfig::with_theta(const std::vector<double>& theta) const {
    RawConfig raw = this->raw();
    raw.theta = theta;
    return validate(raw);
}

RawConfig BranchConfig::raw() const {
    RawConfig raw;
    raw.g = g_;
    raw.theta = theta_;
    raw.t = t_;
    raw.t_max = t_max_;
    raw.gap_margin = gap_margin_;
    return raw;
}

bool BranchConfig::operator==(const BranchConfig& other) const {
    return g_ == other.g_ && theta_ == other.theta_ && t_ == other.t_ &&
           t_max_ == other.t_max_ && gap_margin_ == other.gap_margin_;
}

ExtendedEvalPoint make_extended_point(std::vector<complexd> z, double margin) {
    const int g = static_cast<int>(z.size());
    for (int j = 0; j < g; ++j) {
        if (!(std::abs(z[j]) > 0.0))
            throw MarginViolation(index_msg("z must be nonzero", j, std::abs(z[j])));
    }
    for (int m = 0; m < g; ++m) {
        for (int j = m + 1; j < g; ++j) {
            const complexd r = z[m] / z[j];
            if (std::abs(r + 1.0 / r + 1.0) < margin)
                throw MarginViolation(index_msg("pole proximity for pair", j,
                                                std::abs(r + 1.0 / r + 1.0)));
        }
    }
    return ExtendedEvalPoint{std::move(z)};
}

ExtendedEvalPoint lagrangian_points(int p, const std::vector<double>& phi, double radius,
                                    double margin) {
    if (p < 1) throw BadHalfGenus("half genus p must be >= 1");
    if (static_cast<int>(phi.size()) != p) throw BadHalfGenus("phi must have p entries");
    const double third_pi = std::numbers::pi / 3.0;
    for (int m = 0; m < p; ++m) {
        if (!(phi[m] > 0.0) || !(phi[m] < third_pi))
            throw MarginViolation(index_msg("phi outside (0, pi/3)", m, phi[m]));
        if (m + 1 < p && !(phi[m] < phi[m + 1]))
            throw MarginViolation(index_msg("phi not strictly increasing", m + 1, phi[m + 1]));
    }
    if (!(radius > 0.0)) throw MarginViolation("radius must be positive");
    std::vector<complexd> z(2 * p);
    for (int m = 0; m < p; ++m) {
        z[m] = std::polar(radius, phi[m]);
        z[p + m] = -z[m];
    }
    return make_extended_point(std::move(z), margin);
}

ExtendedEvalPoint generic_powers(int g, complexd z, double margin) {
    if (g < 1) throw BadHalfGenus("genus must be >= 1");
    std::vector<complexd> zs(g);
    complexd zp = 1.0;
    for (int m = 0; m < g; ++m) {
        zp *= z;
        zs[m] = zp;
    }
    return make_extended_point(std::move(zs), margin);
}

ExtendedEvalPoint lagrangian_powers(int p, complexd z, double margin) {
    if (p < 1) throw BadHalfGenus("half genus p must be >= 1");
    std::vector<complexd> zs(2 * p);
    complexd zp = 1.0;
    for (int m = 0; m < p; ++m) {
        zp *= z;
        zs[m] = zp;
        zs[p + m] = -zp;
    }
    return make_extended_point(std::move(zs), margin);
}

} // namespace spectral_plane
