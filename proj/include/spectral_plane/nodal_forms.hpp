#pragma once

#include <Eigen/Core>

#include "spectral_plane/config.hpp"

namespace spectral_plane {

// The 2-plane W = span{u, v} in R^{g+2}, stored through its spanning pair.
struct PeriodPlane {
    Eigen::VectorXd u;
    Eigen::VectorXd v;
};

// The pair of curve points over lambda = b_m on the degenerate curve E_j(0),
// in (x, y) coordinates, as a function of the angle gap theta_mj.
struct NodePair {
    complexd xi1, xi2;    // x-coordinates
    complexd eta1, eta2;  // y-coordinates
    double theta_mj = 0.0;
};

// Real pair (odd, even) forming the complex kernel of the t-derivative of the
// period entry at a node pair:
//   d(u_m + i v_m)/dt_j = epsilon (odd + i even) / (12 pi i a c_j).
// `odd` flips sign under theta_mj -> -theta_mj, `even` does not; only `even`
// survives into the reduced matrix N.
struct PairCoupling {
    double odd;
    double even;
};

// Raw partial derivatives of (u, v) with respect to (theta, t) at t = 0,
// shape (g+2) x g. Rows g and g+1 belong to the virtual nodes. The upper
// g x g blocks of the four matrices are the blocks fed to the reduction
// N = C B - D A.
struct DerivativeTable {
    Eigen::MatrixXd du_dtheta;
    Eigen::MatrixXd dv_dtheta;
    Eigen::MatrixXd du_dt;
    Eigen::MatrixXd dv_dt;
};

// Closed-form period plane on the nodal locus t = 0:
//   u_m + i v_m = (sqrt(3)/2pi) exp[i(2pi/3 - theta_m)],
// virtual entries evaluated at the virtual angles 0 and 2pi/3.
PeriodPlane uv_origin(const BranchConfig& cfg);

// Closed forms for the node pair over lambda = b_m on E_j(0).
// Throws SingularPair when 2cos(theta_mj)+1 or a xi collapses below margin.
NodePair node_pair(double theta_mj, double margin = 1e-6);

PairCoupling pair_coupling(double theta_mj, double margin = 1e-6);

// Full derivative table at t = 0. Diagonal theta-blocks come from
// differentiating the closed-form plane; t-columns from the per-node
// derivative kernels, including the virtual rows.
DerivativeTable analytic_jacobian(const BranchConfig& cfg);

} // namespace spectral_plane
