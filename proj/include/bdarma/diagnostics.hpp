#ifndef BDARMA_DIAGNOSTICS_HPP
#define BDARMA_DIAGNOSTICS_HPP

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "bdarma/math.hpp"

namespace bdarma {

using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace diag_detail {

// Halve every chain so the statistics see within-chain drift.
inline std::vector<VectorXd> split_halves(const std::vector<VectorXd>& chains) {
    std::vector<VectorXd> out;
    out.reserve(2 * chains.size());
    for (const auto& c : chains) {
        const Eigen::Index n = c.size() / 2;
        if (n < 1) continue;
        out.push_back(c.head(n));
        out.push_back(c.segment(c.size() - n, n)); // drop the middle draw when odd
    }
    return out;
}

// Biased (1/n) autocovariance at one lag.
inline double autocov(const VectorXd& x, double mean, int lag) {
    const int n = static_cast<int>(x.size());
    double acc = 0.0;
    for (int i = 0; i + lag < n; ++i) acc += (x[i] - mean) * (x[i + lag] - mean);
    return acc / n;
}

} // namespace diag_detail

// Split potential scale reduction factor. Returns NaN when undefined
// (fewer than 2 split chains or degenerate draws).
inline double split_rhat(const std::vector<VectorXd>& chains) {
    const auto parts = diag_detail::split_halves(chains);
    const int m = static_cast<int>(parts.size());
    if (m < 2) return std::numeric_limits<double>::quiet_NaN();
    const int n = static_cast<int>(parts[0].size());
    if (n < 2) return std::numeric_limits<double>::quiet_NaN();
    VectorXd means(m), vars(m);
    for (int c = 0; c < m; ++c) {
        means[c] = parts[c].mean();
        vars[c] = (parts[c].array() - means[c]).square().sum() / (n - 1);
    }
    const double W = vars.mean();
    const double B = n * (means.array() - means.mean()).square().sum() / (m - 1);
    if (!(W > 0.0)) return std::numeric_limits<double>::quiet_NaN();
    const double var_plus = (n - 1.0) / n * W + B / n;
    return std::sqrt(var_plus / W);
}

// Effective sample size from split chains, using Geyer's initial monotone
// positive sequence on the combined autocorrelations. Lags are evaluated
// lazily; the sum stops at the first nonpositive pair.
inline double ess(const std::vector<VectorXd>& chains) {
    const auto parts = diag_detail::split_halves(chains);
    const int m = static_cast<int>(parts.size());
    if (m < 1) return std::numeric_limits<double>::quiet_NaN();
    const int n = static_cast<int>(parts[0].size());
    if (n < 4) return std::numeric_limits<double>::quiet_NaN();

    VectorXd means(m), vars(m);
    for (int c = 0; c < m; ++c) {
        means[c] = parts[c].mean();
        vars[c] = (parts[c].array() - means[c]).square().sum() / (n - 1);
    }
    const double mean_var = vars.mean();
    double var_plus = mean_var * (n - 1.0) / n;
    if (m > 1) var_plus += (means.array() - means.mean()).square().sum() / (m - 1);
    if (!(var_plus > 0.0)) return std::numeric_limits<double>::quiet_NaN();

    auto rho = [&](int lag) {
        double acc = 0.0;
        for (int c = 0; c < m; ++c) acc += diag_detail::autocov(parts[c], means[c], lag);
        return 1.0 - (mean_var - acc / m) / var_plus;
    };

    double tau_pairs = 0.0; // sum of accepted pair values, monotone-capped
    double prev_pair = std::numeric_limits<double>::infinity();
    for (int t = 0; t + 1 < n; t += 2) {
        const double pair = rho(t) + rho(t + 1);
        if (!(pair > 0.0)) break;
        tau_pairs += std::min(pair, prev_pair);
        prev_pair = std::min(pair, prev_pair);
    }
    const double tau = std::max(2.0 * tau_pairs - 1.0, 1.0 / std::log10(m * n + 10.0));
    const double total = static_cast<double>(m) * n;
    return std::min(total * std::log10(total), total / tau);
}

} // namespace bdarma

#endif
