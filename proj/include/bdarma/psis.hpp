#ifndef BDARMA_PSIS_HPP
#define BDARMA_PSIS_HPP

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "bdarma/math.hpp"

namespace bdarma {

using Eigen::VectorXd;

struct GpdFit {
    double k = 0.0;     // shape
    double sigma = 1.0; // scale
};

// Profile-likelihood fit of the generalized Pareto distribution to positive
// exceedances, on a deterministic grid of candidate 1/theta values with a
// weakly informative shrinkage prior on the shape.
inline GpdFit gpd_fit(std::vector<double> x) {
    std::sort(x.begin(), x.end());
    const int n = static_cast<int>(x.size());
    const double xmax = x.back();
    const double xquart = x[static_cast<int>(std::floor(n / 4.0 + 0.5)) - 1];
    const int grid = 30 + static_cast<int>(std::floor(std::sqrt(static_cast<double>(n))));

    std::vector<double> theta(grid), loglik(grid);
    auto xi_of = [&](double th) {
        double acc = 0.0;
        for (double v : x) acc += std::log1p(-th * v);
        return acc / n;
    };
    for (int j = 1; j <= grid; ++j) {
        const double th =
            1.0 / xmax + (1.0 - std::sqrt(static_cast<double>(grid) / (j - 0.5))) / (3.0 * xquart);
        const double xi = xi_of(th);
        theta[j - 1] = th;
        loglik[j - 1] = n * (std::log(-th / xi) - xi - 1.0);
    }
    const double lmax = *std::max_element(loglik.begin(), loglik.end());
    double wsum = 0.0, theta_hat = 0.0;
    for (int j = 0; j < grid; ++j) {
        const double w = std::exp(loglik[j] - lmax);
        wsum += w;
        theta_hat += w * theta[j];
    }
    theta_hat /= wsum;

    GpdFit fit;
    fit.k = xi_of(theta_hat);
    fit.sigma = -fit.k / theta_hat;
    fit.k = (fit.k * n + 10.0 * 0.5) / (n + 10.0); // shrink toward 0.5
    return fit;
}

inline double gpd_quantile(double p, double k, double sigma) {
    if (std::abs(k) < 1e-12) return -sigma * std::log1p(-p);
    return sigma * std::expm1(-k * std::log1p(-p)) / k;
}

struct PsisResult {
    VectorXd log_weights; // same length as the input, unnormalized
    double khat = 0.0;
};

// Pareto-smoothed importance sampling. The largest min(0.2 S, 3 sqrt(S))
// ratios are replaced by generalized Pareto quantiles fitted to their
// exceedances over the cut point, order preserved and truncated at the raw
// maximum. khat is -inf when the tail is constant (nothing to smooth) and
// +inf when it is too short to fit.
inline PsisResult psis(const VectorXd& log_ratios) {
    const int S = static_cast<int>(log_ratios.size());
    PsisResult res;
    res.log_weights = log_ratios;
    const double shift = log_ratios.maxCoeff();
    res.log_weights.array() -= shift;

    const int tail_len = static_cast<int>(
        std::ceil(std::min(0.2 * S, 3.0 * std::sqrt(static_cast<double>(S)))));
    if (tail_len < 5) {
        res.khat = std::numeric_limits<double>::infinity();
        res.log_weights.array() += shift;
        return res;
    }

    std::vector<int> order(S);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return res.log_weights[a] < res.log_weights[b]; });

    const double cutoff = res.log_weights[order[S - tail_len - 1]];
    const double cut_w = std::exp(cutoff);
    std::vector<double> exceed(tail_len);
    for (int i = 0; i < tail_len; ++i)
        exceed[i] = std::exp(res.log_weights[order[S - tail_len + i]]) - cut_w;

    if (exceed.back() - exceed.front() < 1e-12 * std::max(1.0, std::abs(exceed.back()))) {
        res.khat = neg_inf();
        res.log_weights.array() += shift;
        return res;
    }

    const GpdFit fit = gpd_fit(exceed);
    res.khat = fit.k;
    if (!(fit.sigma > 0.0) || !std::isfinite(fit.k)) {
        res.khat = std::numeric_limits<double>::infinity();
        res.log_weights.array() += shift;
        return res;
    }
    for (int i = 0; i < tail_len; ++i) {
        const double p = (i + 0.5) / tail_len;
        const double w = gpd_quantile(p, fit.k, fit.sigma) + cut_w;
        res.log_weights[order[S - tail_len + i]] = std::min(std::log(w), 0.0);
    }
    res.log_weights.array() += shift;
    return res;
}

} // namespace bdarma

#endif
