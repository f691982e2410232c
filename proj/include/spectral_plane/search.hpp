#pragma once

#include <optional>
#include <string>
#include <vector>

#include "spectral_plane/config.hpp"
#include "spectral_plane/grassmann.hpp"
#include "spectral_plane/jacobian.hpp"

namespace spectral_plane {

// Evaluation model for planes away from the nodal locus. The linearized
// model is exact in theta and first order in t; the exact-elliptic model
// evaluates the single curve E_1(t) by quadrature and exists only for g = 1.
enum class SearchModel { linearized, exact_elliptic };

std::string to_string(SearchModel model);

struct Candidate {
    std::vector<double> theta;
    std::vector<double> t;
    RationalPlane plane;
    double residual = 0.0;
    SearchModel model = SearchModel::linearized;
};

struct ScanCell {
    std::vector<double> theta;
    double det_n = 0.0;     // NaN when the cell violates the margins
    bool valid = false;
    bool invertible = false;
};

struct ScanOptions {
    int grid = 32;
    double det_threshold = 1e-4;
    int threads = 1;
};

// Grid evaluation of det N over the box (cell centers, row-major order).
// Margin-violating cells are marked invalid rather than failing the scan.
std::vector<ScanCell> scan(const BranchConfig& base,
                           const std::vector<std::pair<double, double>>& box,
                           const ScanOptions& opts);

struct NewtonOptions {
    int max_iterations = 30;
    double tol = 1e-8;           // accepted principal distance to the target
    double f_tol = 1e-13;        // projection-residual stopping size
    double trust_factor = 10.0;  // parameter trust radius = factor * t_max
    double det_threshold = 1e-6;
    double fd_step = 1e-5;
    double quad_tol = 1e-11;
};

// Drives F(t, theta) = projections of (u, v) onto the orthogonal complement
// of the target plane to zero, with a backtracking line search. Throws
// NonConvergence, LeftTrustRegion, or ModelUnavailable.
Candidate newton_solve(const BranchConfig& base, const RationalPlane& target,
                       SearchModel model, const NewtonOptions& opts = {});

// Same solver against an arbitrary plane target (no rational label).
struct NewtonOutcome {
    std::vector<double> theta;
    std::vector<double> t;
    double residual = 0.0;
    int iterations = 0;
};
NewtonOutcome newton_solve_plane(const BranchConfig& base, const PeriodPlane& target,
                                 SearchModel model, const NewtonOptions& opts = {});

struct HuntOptions {
    long long qmax = 64;
    double radius = 1e-2;
    int budget = 1000;
    std::optional<SearchModel> model;  // default: exact-elliptic iff g = 1
    NewtonOptions newton;
    int threads = 1;
};

// Enumerates rational planes whose graph-form entries lie within radius of
// the base plane's, Newton-refines each, deduplicates exactly and sorts by
// residual. Deterministic for fixed options; the empty list is a valid
// outcome.
std::vector<Candidate> hunt(const BranchConfig& base, const HuntOptions& opts);

struct CertifyReport {
    double residual_before = 0.0;
    double residual_after = 0.0;
    double tighten = 0.0;
    bool ok = false;
};

// Re-evaluates the candidate with the quadrature tolerance tightened by the
// factor (exact-elliptic) or with the finite-difference table replacing the
// closed-form one (linearized). ok is false when the residual grows past
// 10x (above a 1e-12 floor).
CertifyReport certify(const Candidate& candidate, double tighten,
                      const NewtonOptions& opts = {});

} // namespace spectral_plane
