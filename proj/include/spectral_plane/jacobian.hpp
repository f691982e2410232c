#pragma once

#include <Eigen/Core>
#include <optional>
#include <vector>

#include "spectral_plane/config.hpp"
#include "spectral_plane/nodal_forms.hpp"

namespace spectral_plane {

enum class NProvenance { closed_form, block_reduced, extended };

// The g x g reduction N of the full parameter Jacobian; dW is invertible
// exactly when N is.
struct NMatrix {
    Eigen::MatrixXd entries;
    NProvenance provenance = NProvenance::closed_form;
};

// N = C B - D A from the upper g x g blocks of the derivative table.
// Requires the theta-blocks to be diagonal (throws NonDiagonalBlocks).
NMatrix reduce_blocks(const DerivativeTable& table);

// Direct assembly: diagonal 3/(4 pi^2 a), off-diagonal
// -(sqrt(3)/(24 pi^2 a)) * even coupling of the angle gap.
NMatrix closed_n_matrix(const BranchConfig& cfg);

// Meromorphic extension of the even coupling as a function of r = z_m/z_j;
// restricts to pair_coupling(theta_mj).even on the unit circle.
complexd extended_coupling(complexd zm, complexd zj, double margin = 1e-8);

// The extended matrix at z: same entry formula, couplings replaced by their
// extension; the diagonal stays constant.
Eigen::MatrixXcd extended_n_matrix(const ExtendedEvalPoint& z, double margin = 1e-8);

// Determinant of the extended matrix at z.
complexd h_det(const ExtendedEvalPoint& z, double margin = 1e-8);

// Large-radius limits of h along the probe curves: n0 for the generic probe
// z_m = z^m, and additionally n1 for the half-genus probe z_{p+m} = -z^m.
struct LimitMatrices {
    Eigen::MatrixXd n0;
    double det_n0 = 0.0;
    std::optional<Eigen::MatrixXd> n1;
    std::optional<double> det_n1;
};
LimitMatrices limit_matrices(int g, std::optional<int> p = std::nullopt);

enum class ProbeMode { generic, lagrangian };

struct ConvergenceRow {
    double radius;
    complexd h;
    double abs_error;
};

struct ConvergenceReport {
    ProbeMode mode = ProbeMode::generic;
    int g = 0;
    double limit = 0.0;
    std::vector<ConvergenceRow> rows;
    // Least-squares decay order of abs_error against radius; +infinity when
    // every error already sits at machine precision.
    double fitted_order = 0.0;
};

// Evaluates h along the probe at each radius (all >= 10, increasing) and
// fits the decay order of the distance to the limit determinant.
ConvergenceReport asymptotic_probe(int g, ProbeMode mode, const std::vector<double>& radii);

} // namespace spectral_plane
