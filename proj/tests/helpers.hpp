#pragma once

#include <algorithm>
#include <random>
#include <vector>

#include "spectral_plane/config.hpp"

namespace spectral_plane::testing {

inline BranchConfig make_config(std::vector<double> theta, std::vector<double> t = {}) {
    RawConfig raw;
    raw.g = static_cast<int>(theta.size());
    raw.theta = std::move(theta);
    raw.t = std::move(t);
    return BranchConfig::validate(raw);
}

// Uniform valid angle vectors, rejected until every gap (walls included)
// clears min_gap. Deterministic for a given generator state.
inline std::vector<double> random_theta(std::mt19937& rng, int g, double min_gap = 0.05) {
    const double hi = constants::two_pi_over_3();
    std::uniform_real_distribution<double> dist(min_gap, hi - min_gap);
    while (true) {
        std::vector<double> theta(g);
        for (double& x : theta) x = dist(rng);
        std::sort(theta.begin(), theta.end());
        bool ok = true;
        for (int i = 0; ok && i + 1 < g; ++i)
            if (theta[i + 1] - theta[i] < min_gap) ok = false;
        if (ok && g >= 1 && (theta.back() - theta.front()) > hi - min_gap) ok = false;
        if (ok) return theta;
    }
}

} // namespace spectral_plane::testing
