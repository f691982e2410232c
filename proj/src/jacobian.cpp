#include "spectral_plane/jacobian.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "spectral_plane/errors.hpp"

namespace spectral_plane {

namespace {

double diagonal_entry() {
    const double a = constants::a();
    return 3.0 / (4.0 * std::numbers::pi * std::numbers::pi * a);
}

double coupling_scale() {
    const double a = constants::a();
    return -std::sqrt(3.0) / (24.0 * std::numbers::pi * std::numbers::pi * a);
}

} // namespace

NMatrix reduce_blocks(const DerivativeTable& table) {
    const int g = static_cast<int>(table.du_dtheta.cols());
    const Eigen::MatrixXd a_block = table.du_dtheta.topRows(g);
    const Eigen::MatrixXd b_block = table.dv_dtheta.topRows(g);
    const Eigen::MatrixXd c_block = table.du_dt.topRows(g);
    const Eigen::MatrixXd d_block = table.dv_dt.topRows(g);
    for (int m = 0; m < g; ++m) {
        for (int j = 0; j < g; ++j) {
            if (m == j) continue;
            if (std::abs(a_block(m, j)) > 1e-12 || std::abs(b_block(m, j)) > 1e-12)
                throw NonDiagonalBlocks("theta-derivative blocks are not diagonal");
        }
    }
    NMatrix result;
    result.entries = c_block * b_block - d_block * a_block;
    result.provenance = NProvenance::block_reduced;
    return result;
}

NMatrix closed_n_matrix(const BranchConfig& cfg) {
    const int g = cfg.g();
    NMatrix result;
    result.entries = Eigen::MatrixXd::Constant(g, g, 0.0);
    result.provenance = NProvenance::closed_form;
    for (int m = 0; m < g; ++m) {
        result.entries(m, m) = diagonal_entry();
        for (int j = 0; j < g; ++j) {
            if (m == j) continue;
            result.entries(m, j) =
                coupling_scale() * pair_coupling(cfg.theta()[m] - cfg.theta()[j]).even;
        }
    }
    return result;
}

complexd extended_coupling(complexd zm, complexd zj, double margin) {
    if (!(std::abs(zm) > 0.0) || !(std::abs(zj) > 0.0))
        throw PoleProximity("extension requires nonzero z");
    const complexd r = zm / zj;
    const complexd rinv = 1.0 / r;
    const complexd pole = r + rinv + 1.0;
    if (std::abs(pole) < margin) throw PoleProximity("ratio on the polar divisor");

    const double a = constants::a();
    const complexd eps = constants::epsilon();
    const complexd xi1 = a * (eps * r + rinv / eps + 1.0);
    const complexd xi2 = a * (r / eps + eps * rinv + 1.0);
    if (std::abs(xi1) < margin * a || std::abs(xi2) < margin * a)
        throw PoleProximity("node abscissa collapses at this ratio");

    // Factored cube difference: xi1 - xi2 = i sqrt(3) a (r - 1/r) exactly,
    // which avoids the large-|r| cancellation of xi1^3 - xi2^3.
    const complexd diff = complexd(0.0, std::sqrt(3.0)) * a * (r - rinv);
    const complexd cubes = diff * (xi1 * xi1 + xi1 * xi2 + xi2 * xi2);
    const complexd prod = xi1 * xi2;
    const complexd r3 = r * r * r;
    const complexd sin3 = (r3 - 1.0 / r3) / complexd(0.0, 2.0);
    return sin3 * cubes / (prod * prod * prod) - std::sqrt(3.0) / pole;
}

Eigen::MatrixXcd extended_n_matrix(const ExtendedEvalPoint& z, double margin) {
    const int g = static_cast<int>(z.z.size());
    Eigen::MatrixXcd n(g, g);
    for (int m = 0; m < g; ++m) {
        n(m, m) = diagonal_entry();
        for (int j = 0; j < g; ++j) {
            if (m == j) continue;
            n(m, j) = coupling_scale() * extended_coupling(z.z[m], z.z[j], margin);
        }
    }
    return n;
}

complexd h_det(const ExtendedEvalPoint& z, double margin) {
    return extended_n_matrix(z, margin).determinant();
}

LimitMatrices limit_matrices(int g, std::optional<int> p) {
    if (g < 1) throw BadHalfGenus("genus must be >= 1");
    LimitMatrices limits;
    limits.n0 = Eigen::MatrixXd::Identity(g, g) * diagonal_entry();
    limits.det_n0 = std::pow(diagonal_entry(), g);
    if (p) {
        if (g != 2 * *p) throw BadHalfGenus("lagrangian mode requires g = 2p");
        const double s = 3.0 / (24.0 * std::numbers::pi * std::numbers::pi * constants::a());
        Eigen::MatrixXd n1 = Eigen::MatrixXd::Zero(g, g);
        for (int i = 0; i < g; ++i) n1(i, i) = 6.0 * s;
        for (int i = 0; i < *p; ++i) {
            n1(i, i + *p) = -s;
            n1(i + *p, i) = -s;
        }
        limits.n1 = n1;
        // Block eigenvalues 7s and 5s, each p-fold.
        limits.det_n1 = std::pow(35.0 * s * s, *p);
    }
    return limits;
}

ConvergenceReport asymptotic_probe(int g, ProbeMode mode, const std::vector<double>& radii) {
    if (radii.empty()) throw Error("need at least one radius");
    for (std::size_t i = 0; i < radii.size(); ++i) {
        if (!(radii[i] >= 10.0)) throw Error("probe radii must be >= 10");
        if (i > 0 && !(radii[i] > radii[i - 1])) throw Error("radii must increase");
    }
    ConvergenceReport report;
    report.mode = mode;
    report.g = g;
    if (mode == ProbeMode::lagrangian) {
        if (g % 2 != 0) throw BadHalfGenus("lagrangian probe requires even genus");
        report.limit = *limit_matrices(g, g / 2).det_n1;
    } else {
        report.limit = limit_matrices(g).det_n0;
    }
    for (double radius : radii) {
        const ExtendedEvalPoint z = mode == ProbeMode::lagrangian
                                        ? lagrangian_powers(g / 2, radius)
                                        : generic_powers(g, radius);
        const complexd h = h_det(z);
        report.rows.push_back({radius, h, std::abs(h - report.limit)});
    }
    // Log-log least squares; machine-precision convergence reports +inf.
    double max_error = 0.0;
    for (const auto& row : report.rows) max_error = std::max(max_error, row.abs_error);
    if (max_error < 1e-13) {
        report.fitted_order = std::numeric_limits<double>::infinity();
        return report;
    }
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    int count = 0;
    for (const auto& row : report.rows) {
        if (row.abs_error < 1e-300) continue;
        const double x = std::log(row.radius);
        const double y = std::log(row.abs_error);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++count;
    }
    if (count < 2) {
        report.fitted_order = std::numeric_limits<double>::infinity();
        return report;
    }
    const double slope = (count * sxy - sx * sy) / (count * sxx - sx * sx);
    report.fitted_order = -slope;
    return report;
}

} // namespace spectral_plane
