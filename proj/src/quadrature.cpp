#include "spectral_plane/quadrature.hpp"

#include <cmath>
#include <vector>

#include "spectral_plane/errors.hpp"

namespace spectral_plane {

namespace {

// Legendre nodes by Newton iteration from the Chebyshev initial guess.
std::vector<std::pair<double, double>> legendre_rule(int n) {
    std::vector<std::pair<double, double>> rule(n);
    for (int i = 0; i < n; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            pp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        rule[n - 1 - i] = {x, 2.0 / ((1.0 - x * x) * pp * pp)};
    }
    return rule;
}

complexd panel_sum(const std::function<complexd(double)>& f, double lo, double hi) {
    const auto& rule = gauss_legendre_15();
    const double mid = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);
    complexd acc = 0.0;
    for (const auto& [x, w] : rule) acc += w * f(mid + half * x);
    return acc * half;
}

} // namespace

const std::vector<std::pair<double, double>>& gauss_legendre_15() {
    static const auto rule = legendre_rule(15);
    return rule;
}

QuadratureResult integrate_adaptive(const std::function<complexd(double)>& f, double s0,
                                    double s1, double abs_tol, int max_depth) {
    struct Panel {
        double lo, hi;
        complexd whole;
        int depth;
    };
    const double total = s1 - s0;
    const int initial = 8;
    std::vector<Panel> stack;
    stack.reserve(64);
    for (int i = initial - 1; i >= 0; --i) {
        const double lo = s0 + total * i / initial;
        const double hi = s0 + total * (i + 1) / initial;
        stack.push_back({lo, hi, panel_sum(f, lo, hi), 0});
    }
    QuadratureResult result{0.0, 0.0};
    while (!stack.empty()) {
        const Panel p = stack.back();
        stack.pop_back();
        const double mid = 0.5 * (p.lo + p.hi);
        const complexd left = panel_sum(f, p.lo, mid);
        const complexd right = panel_sum(f, mid, p.hi);
        const complexd refined = left + right;
        const double err = std::abs(refined - p.whole);
        const double budget = abs_tol * (p.hi - p.lo) / total;
        if (err <= budget || err < 1e-300) {
            result.value += refined;
            result.error_estimate += err;
        } else if (p.depth >= max_depth) {
            throw QuadratureDivergence("contour quadrature did not meet tolerance");
        } else {
            stack.push_back({mid, p.hi, right, p.depth + 1});
            stack.push_back({p.lo, mid, left, p.depth + 1});
        }
    }
    return result;
}

} // namespace spectral_plane
