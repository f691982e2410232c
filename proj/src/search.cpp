#include "spectral_plane/search.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

#include "spectral_plane/elliptic_curve.hpp"
#include "spectral_plane/errors.hpp"
#include "spectral_plane/parallel.hpp"

namespace spectral_plane {

namespace {

// Failures that mean "this parameter point / this target is no good", as
// opposed to misuse of the API.
bool is_recoverable(const std::exception_ptr& eptr) {
    try {
        std::rethrow_exception(eptr);
    } catch (const OrderingViolation&) {
    } catch (const AngleCollision&) {
    } catch (const TooLargeT&) {
    } catch (const MarginViolation&) {
    } catch (const SingularPair&) {
    } catch (const TrackingLoss&) {
    } catch (const QuadratureDivergence&) {
    } catch (const RootSeparationFailure&) {
    } catch (const DegeneratePlane&) {
    } catch (const NonConvergence&) {
    } catch (const LeftTrustRegion&) {
    } catch (...) {
        return false;
    }
    return true;
}

struct ModelEval {
    PeriodPlane plane;
};

ModelEval evaluate_model(const BranchConfig& base, SearchModel model,
                         const Eigen::VectorXd& t, const Eigen::VectorXd& theta,
                         double quad_tol) {
    const BranchConfig cfg =
        base.with_theta(std::vector<double>(theta.data(), theta.data() + theta.size()));
    if (model == SearchModel::exact_elliptic) {
        return {uv_axis(cfg, 0, t[0], quad_tol)};
    }
    const DerivativeTable table = analytic_jacobian(cfg);
    PeriodPlane plane = uv_origin(cfg);
    for (int j = 0; j < cfg.g(); ++j) {
        plane.u += t[j] * table.du_dt.col(j);
        plane.v += t[j] * table.dv_dt.col(j);
    }
    return {std::move(plane)};
}

// Orthonormal basis of the orthogonal complement of the target plane,
// as columns of an n x (n-2) matrix.
Eigen::MatrixXd complement_basis(const PeriodPlane& target) {
    const int n = static_cast<int>(target.u.size());
    Eigen::MatrixXd span(2, n);
    span.row(0) = target.u.transpose();
    span.row(1) = target.v.transpose();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(span, Eigen::ComputeFullV);
    if (!(svd.singularValues()(1) > 1e-10))
        throw DegeneratePlane("target plane is rank deficient");
    return svd.matrixV().rightCols(n - 2);
}

Eigen::VectorXd projections(const Eigen::MatrixXd& complement, const PeriodPlane& plane) {
    const int g = static_cast<int>(complement.cols());
    Eigen::VectorXd f(2 * g);
    f.head(g) = complement.transpose() * plane.u;
    f.tail(g) = complement.transpose() * plane.v;
    return f;
}

double stacked_jacobian_norm(const DerivativeTable& table) {
    const int rows = static_cast<int>(table.du_dtheta.rows());
    const int g = static_cast<int>(table.du_dtheta.cols());
    Eigen::MatrixXd full(2 * rows, 2 * g);
    full << table.du_dtheta, table.du_dt, table.dv_dtheta, table.dv_dt;
    return full.jacobiSvd().singularValues()(0);
}

std::string canonical_key(const RationalPlane& plane) {
    std::ostringstream os;
    os << plane.pivots[0] << ':' << plane.pivots[1];
    for (const Rational& r : plane.canonical()) os << '|' << r.num() << '/' << r.den();
    return os.str();
}

} // namespace

std::string to_string(SearchModel model) {
    return model == SearchModel::exact_elliptic ? "exact-elliptic" : "linearized";
}

std::vector<ScanCell> scan(const BranchConfig& base,
                           const std::vector<std::pair<double, double>>& box,
                           const ScanOptions& opts) {
    const int g = base.g();
    if (static_cast<int>(box.size()) != g) throw Error("scan box needs one range per angle");
    if (opts.grid < 1) throw Error("grid must be >= 1");
    double cells_d = 1.0;
    for (int i = 0; i < g; ++i) cells_d *= opts.grid;
    if (cells_d > 2e7) throw Error("scan grid too large");
    const int total = static_cast<int>(cells_d);

    std::vector<ScanCell> cells(total);
    parallel_for(total, opts.threads, [&](int flat) {
        ScanCell& cell = cells[flat];
        cell.theta.resize(g);
        int rest = flat;
        for (int axis = g - 1; axis >= 0; --axis) {
            const int k = rest % opts.grid;
            rest /= opts.grid;
            const auto [lo, hi] = box[axis];
            cell.theta[axis] = lo + (hi - lo) * (k + 0.5) / opts.grid;
        }
        try {
            const BranchConfig cfg = base.with_theta(cell.theta);
            cell.det_n = closed_n_matrix(cfg).entries.determinant();
            cell.valid = true;
            cell.invertible = std::abs(cell.det_n) > opts.det_threshold;
        } catch (const Error&) {
            cell.det_n = std::numeric_limits<double>::quiet_NaN();
            cell.valid = false;
            cell.invertible = false;
        }
    });
    return cells;
}

NewtonOutcome newton_solve_plane(const BranchConfig& base, const PeriodPlane& target_plane,
                                 SearchModel model, const NewtonOptions& opts) {
    const int g = base.g();
    if (model == SearchModel::exact_elliptic && g != 1)
        throw ModelUnavailable("exact-elliptic model exists only for g = 1");
    for (double tj : base.t())
        if (tj != 0.0) throw Error("newton starts from the nodal locus t = 0");
    if (static_cast<int>(target_plane.u.size()) != g + 2)
        throw Error("target plane has the wrong ambient dimension");

    const NMatrix base_n = closed_n_matrix(base);
    if (!(std::abs(base_n.entries.determinant()) > opts.det_threshold))
        throw Error("det N below threshold at the base point; not locally invertible");

    const Eigen::MatrixXd complement = complement_basis(target_plane);

    const DerivativeTable base_table = analytic_jacobian(base);
    const double trust_plane =
        opts.trust_factor * base.t_max() * stacked_jacobian_norm(base_table);
    const PeriodPlane w0 = uv_origin(base);
    if (principal_distance(w0, target_plane) > trust_plane)
        throw LeftTrustRegion("target beyond the trust radius of the base plane");

    Eigen::VectorXd t = Eigen::VectorXd::Zero(g);
    Eigen::VectorXd theta(g);
    for (int j = 0; j < g; ++j) theta[j] = base.theta()[j];
    const Eigen::VectorXd theta0 = theta;

    const auto eval = [&](const Eigen::VectorXd& tv, const Eigen::VectorXd& thv) {
        return evaluate_model(base, model, tv, thv, opts.quad_tol);
    };

    ModelEval current = eval(t, theta);
    Eigen::VectorXd f = projections(complement, current.plane);

    int iterations = 0;
    for (; iterations < opts.max_iterations && f.norm() > opts.f_tol; ++iterations) {
        Eigen::MatrixXd jac(2 * g, 2 * g);
        // t-columns: analytic for the linearized model (it is affine in t),
        // finite differences for the quadrature route.
        if (model == SearchModel::linearized) {
            const BranchConfig cfg_here = base.with_theta(
                std::vector<double>(theta.data(), theta.data() + g));
            const DerivativeTable table = analytic_jacobian(cfg_here);
            for (int j = 0; j < g; ++j) {
                jac.col(j).head(g) = complement.transpose() * table.du_dt.col(j);
                jac.col(j).tail(g) = complement.transpose() * table.dv_dt.col(j);
            }
        } else {
            for (int j = 0; j < g; ++j) {
                Eigen::VectorXd tp = t, tm = t;
                tp[j] += opts.fd_step;
                tm[j] -= opts.fd_step;
                jac.col(j) = (projections(complement, eval(tp, theta).plane) -
                              projections(complement, eval(tm, theta).plane)) /
                             (2.0 * opts.fd_step);
            }
        }
        for (int j = 0; j < g; ++j) {
            Eigen::VectorXd thp = theta, thm = theta;
            thp[j] += opts.fd_step;
            thm[j] -= opts.fd_step;
            jac.col(g + j) = (projections(complement, eval(t, thp).plane) -
                              projections(complement, eval(t, thm).plane)) /
                             (2.0 * opts.fd_step);
        }

        const Eigen::PartialPivLU<Eigen::MatrixXd> lu(jac);
        const Eigen::VectorXd step = lu.solve(-f);
        if (!step.allFinite()) throw NonConvergence("singular Newton system");

        // Backtracking line search on ||F||; invalid parameter points are
        // treated like failed steps.
        double lambda = 1.0;
        bool accepted = false;
        for (int half = 0; half < 30; ++half, lambda *= 0.5) {
            const Eigen::VectorXd t_new = t + lambda * step.head(g);
            const Eigen::VectorXd theta_new = theta + lambda * step.tail(g);
            ModelEval trial;
            try {
                trial = eval(t_new, theta_new);
            } catch (const Error&) {
                continue;
            }
            const Eigen::VectorXd f_new = projections(complement, trial.plane);
            if (f_new.norm() < f.norm() * (1.0 - 1e-4 * lambda)) {
                t = t_new;
                theta = theta_new;
                current = trial;
                f = f_new;
                accepted = true;
                break;
            }
        }
        if (!accepted) throw NonConvergence("line search stalled");

        for (int j = 0; j < g; ++j) {
            if (std::abs(t[j]) > base.t_max())
                throw LeftTrustRegion("iterate left |t| <= t_max");
        }
        const double drift = std::max(t.lpNorm<Eigen::Infinity>(),
                                      (theta - theta0).lpNorm<Eigen::Infinity>());
        if (drift > opts.trust_factor * base.t_max())
            throw LeftTrustRegion("iterate left the parameter trust region");
    }

    const double residual = principal_distance(current.plane, target_plane);
    if (!(residual <= opts.tol)) {
        std::ostringstream os;
        os << "newton residual " << residual << " above tolerance " << opts.tol;
        throw NonConvergence(os.str());
    }
    NewtonOutcome outcome;
    outcome.theta.assign(theta.data(), theta.data() + g);
    outcome.t.assign(t.data(), t.data() + g);
    outcome.residual = residual;
    outcome.iterations = iterations;
    return outcome;
}

Candidate newton_solve(const BranchConfig& base, const RationalPlane& target,
                       SearchModel model, const NewtonOptions& opts) {
    const NewtonOutcome outcome = newton_solve_plane(base, target.to_plane(), model, opts);
    Candidate candidate;
    candidate.theta = outcome.theta;
    candidate.t = outcome.t;
    candidate.plane = target;
    candidate.residual = outcome.residual;
    candidate.model = model;
    return candidate;
}

std::vector<Candidate> hunt(const BranchConfig& base, const HuntOptions& opts) {
    const int g = base.g();
    const SearchModel model = opts.model.value_or(
        g == 1 ? SearchModel::exact_elliptic : SearchModel::linearized);
    if (model == SearchModel::exact_elliptic && g != 1)
        throw ModelUnavailable("exact-elliptic model exists only for g = 1");
    if (opts.budget < 1) return {};

    const NewtonOptions& newton_opts = opts.newton;

    const PeriodPlane w0 = uv_origin(base);
    const GraphForm gf = graph_form(w0);
    const int entries = 2 * g;

    // Per-entry rational neighbours, closest first.
    std::vector<std::vector<Rational>> lists(entries);
    for (int e = 0; e < entries; ++e) {
        const double value = gf.coefficients(e / g, e % g);
        auto list = rationals_in_interval(value - opts.radius, value + opts.radius, opts.qmax);
        std::sort(list.begin(), list.end(), [value](const Rational& a, const Rational& b) {
            const double da = std::abs(a.value() - value);
            const double db = std::abs(b.value() - value);
            if (da != db) return da < db;
            if (a.den() != b.den()) return a.den() < b.den();
            return a.num() < b.num();
        });
        if (list.empty()) return {};
        lists[e] = std::move(list);
    }

    // Index tuples in nondecreasing total-offset order: nearby planes first,
    // deterministically, up to the budget.
    std::vector<std::vector<int>> tuples;
    int max_sum = 0;
    for (const auto& list : lists) max_sum += static_cast<int>(list.size()) - 1;
    std::vector<int> tuple(entries, 0);
    const std::function<void(int, int)> emit = [&](int pos, int remaining) {
        if (static_cast<int>(tuples.size()) >= opts.budget) return;
        if (pos == entries) {
            if (remaining == 0) tuples.push_back(tuple);
            return;
        }
        const int cap = std::min(remaining, static_cast<int>(lists[pos].size()) - 1);
        for (int i = 0; i <= cap; ++i) {
            tuple[pos] = i;
            emit(pos + 1, remaining - i);
            if (static_cast<int>(tuples.size()) >= opts.budget) return;
        }
    };
    for (int s = 0; s <= max_sum && static_cast<int>(tuples.size()) < opts.budget; ++s)
        emit(0, s);

    // Materialize targets, dropping exact duplicates.
    std::vector<RationalPlane> targets;
    std::vector<std::string> keys;
    targets.reserve(tuples.size());
    for (const auto& index : tuples) {
        RationalPlane target;
        target.pivots = gf.pivots;
        target.qmax = opts.qmax;
        for (int r = 0; r < 2; ++r)
            for (int c = 0; c < g; ++c)
                target.coefficients[r].push_back(lists[r * g + c][index[r * g + c]]);
        std::string key = canonical_key(target);
        if (std::find(keys.begin(), keys.end(), key) != keys.end()) continue;
        keys.push_back(std::move(key));
        targets.push_back(std::move(target));
    }

    std::vector<std::optional<Candidate>> results(targets.size());
    parallel_for(static_cast<int>(targets.size()), opts.threads, [&](int i) {
        try {
            results[i] = newton_solve(base, targets[i], model, newton_opts);
        } catch (...) {
            if (!is_recoverable(std::current_exception())) throw;
        }
    });

    std::vector<Candidate> candidates;
    for (auto& result : results)
        if (result) candidates.push_back(std::move(*result));
    std::sort(candidates.begin(), candidates.end(),
              [](const Candidate& a, const Candidate& b) {
                  if (a.residual != b.residual) return a.residual < b.residual;
                  return canonical_key(a.plane) < canonical_key(b.plane);
              });
    return candidates;
}

CertifyReport certify(const Candidate& candidate, double tighten, const NewtonOptions& opts) {
    if (!(tighten >= 1.0)) throw Error("tighten factor must be >= 1");
    const int g = static_cast<int>(candidate.theta.size());
    double t_bound = 0.05;
    for (double tj : candidate.t) t_bound = std::max(t_bound, 2.0 * std::abs(tj));
    RawConfig raw;
    raw.g = g;
    raw.theta = candidate.theta;
    raw.t_max = t_bound;
    const BranchConfig cfg = BranchConfig::validate(raw);

    const PeriodPlane target_plane = candidate.plane.to_plane();
    PeriodPlane plane;
    if (candidate.model == SearchModel::exact_elliptic) {
        plane = uv_axis(cfg, 0, candidate.t[0], opts.quad_tol / tighten);
    } else {
        // Independent route: quadrature finite differences replace the closed-form
        // derivative table.
        const DerivativeTable table = fd_jacobian(cfg, 1e-3, opts.quad_tol);
        plane = uv_origin(cfg);
        for (int j = 0; j < g; ++j) {
            plane.u += candidate.t[j] * table.du_dt.col(j);
            plane.v += candidate.t[j] * table.dv_dt.col(j);
        }
    }
    CertifyReport report;
    report.residual_before = candidate.residual;
    report.residual_after = principal_distance(plane, target_plane);
    report.tighten = tighten;
    report.ok = report.residual_after <= std::max(10.0 * report.residual_before, 1e-12);
    return report;
}

} // namespace spectral_plane
