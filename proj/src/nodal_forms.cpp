#include "spectral_plane/nodal_forms.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "spectral_plane/errors.hpp"

namespace spectral_plane {

namespace {

void check_pair_margin(double theta_mj, double xi1, double xi2, double margin) {
    const double a = constants::a();
    const double denom = 2.0 * std::cos(theta_mj) + 1.0;
    if (std::abs(denom) < margin || std::abs(xi1) < margin * a || std::abs(xi2) < margin * a) {
        std::ostringstream os;
        os << "node pair singular at theta_mj = " << theta_mj;
        throw SingularPair(os.str());
    }
}

} // namespace

PeriodPlane uv_origin(const BranchConfig& cfg) {
    for (double tj : cfg.t())
        if (tj != 0.0) throw Error("uv_origin requires t = 0");
    const int n = cfg.g() + 2;
    const double k = constants::period_modulus();
    const double w = constants::two_pi_over_3();
    PeriodPlane plane;
    plane.u.resize(n);
    plane.v.resize(n);
    for (int m = 0; m < n; ++m) {
        plane.u[m] = k * std::cos(w - cfg.angle(m));
        plane.v[m] = k * std::sin(w - cfg.angle(m));
    }
    return plane;
}

NodePair node_pair(double theta_mj, double margin) {
    const double a = constants::a();
    const double w = constants::two_pi_over_3();
    const double xi1 = a * (2.0 * std::cos(theta_mj + w) + 1.0);
    const double xi2 = a * (2.0 * std::cos(theta_mj - w) + 1.0);
    check_pair_margin(theta_mj, xi1, xi2, margin);
    NodePair pair;
    pair.xi1 = xi1;
    pair.xi2 = xi2;
    pair.eta1 = complexd(0.0, xi1 * 2.0 * a * std::sin(theta_mj + w));
    pair.eta2 = complexd(0.0, xi2 * 2.0 * a * std::sin(theta_mj - w));
    pair.theta_mj = theta_mj;
    return pair;
}

PairCoupling pair_coupling(double theta_mj, double margin) {
    const double a = constants::a();
    const double w = constants::two_pi_over_3();
    const double xi1 = a * (2.0 * std::cos(theta_mj + w) + 1.0);
    const double xi2 = a * (2.0 * std::cos(theta_mj - w) + 1.0);
    check_pair_margin(theta_mj, xi1, xi2, margin);
    PairCoupling c;
    c.odd = 2.0 * a / xi1 - 2.0 * a / xi2;
    // Factored cube difference keeps the large-|r| cancellation out of the
    // extended version; use the same form here for bitwise agreement.
    const double diff = (xi1 - xi2) * (xi1 * xi1 + xi1 * xi2 + xi2 * xi2);
    const double prod = xi1 * xi2;
    c.even = std::sin(3.0 * theta_mj) * diff / (prod * prod * prod) -
             std::sqrt(3.0) / (2.0 * std::cos(theta_mj) + 1.0);
    return c;
}

DerivativeTable analytic_jacobian(const BranchConfig& cfg) {
    for (double tj : cfg.t())
        if (tj != 0.0) throw Error("analytic_jacobian requires t = 0");
    const int g = cfg.g();
    const int n = g + 2;
    const double a = constants::a();
    const double k = constants::period_modulus();
    const double w = constants::two_pi_over_3();
    const double pi = std::numbers::pi;

    DerivativeTable table;
    table.du_dtheta = Eigen::MatrixXd::Zero(n, g);
    table.dv_dtheta = Eigen::MatrixXd::Zero(n, g);
    table.du_dt = Eigen::MatrixXd::Zero(n, g);
    table.dv_dt = Eigen::MatrixXd::Zero(n, g);

    for (int j = 0; j < g; ++j) {
        const double phi = w - cfg.theta()[j];
        const double cphi = std::cos(phi);
        const double sphi = std::sin(phi);
        table.du_dtheta(j, j) = k * sphi;
        table.dv_dtheta(j, j) = -k * cphi;
        table.du_dt(j, j) = -(k / a) * cphi;
        table.dv_dt(j, j) = -(k / a) * sphi;
        for (int m = 0; m < n; ++m) {
            if (m == j) continue;
            const PairCoupling c = pair_coupling(cfg.angle(m) - cfg.theta()[j]);
            table.du_dt(m, j) = (cphi * c.even + sphi * c.odd) / (12.0 * pi * a);
            table.dv_dt(m, j) = (sphi * c.even - cphi * c.odd) / (12.0 * pi * a);
        }
    }
    return table;
}

} // namespace spectral_plane
