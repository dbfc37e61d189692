#ifndef BDARMA_MATH_HPP
#define BDARMA_MATH_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

namespace bdarma {

inline constexpr double kLog2Pi = 1.8378770664093454836;
inline constexpr double neg_inf() { return -std::numeric_limits<double>::infinity(); }

// digamma for x > 0: recurrence up the axis, then the asymptotic series.
inline double digamma(double x) {
    if (!(x > 0.0)) throw std::domain_error("digamma: argument must be positive");
    double result = 0.0;
    while (x < 6.0) {
        result -= 1.0 / x;
        x += 1.0;
    }
    const double inv = 1.0 / x;
    const double inv2 = inv * inv;
    result += std::log(x) - 0.5 * inv -
              inv2 * (1.0 / 12.0 -
                      inv2 * (1.0 / 120.0 -
                              inv2 * (1.0 / 252.0 - inv2 * (1.0 / 240.0 - inv2 * (1.0 / 132.0)))));
    return result;
}

inline double log_sum_exp(std::span<const double> v) {
    double mx = neg_inf();
    for (double x : v) mx = std::max(mx, x);
    if (!std::isfinite(mx)) return mx;
    double s = 0.0;
    for (double x : v) s += std::exp(x - mx);
    return mx + std::log(s);
}

inline double log_sum_exp(double a, double b) {
    if (a == neg_inf()) return b;
    if (b == neg_inf()) return a;
    const double mx = std::max(a, b);
    return mx + std::log(std::exp(a - mx) + std::exp(b - mx));
}

inline double normal_logpdf(double x, double mean, double sd) {
    const double z = (x - mean) / sd;
    return -0.5 * z * z - std::log(sd) - 0.5 * kLog2Pi;
}

// log density of the half-Cauchy(0,1) at x > 0
inline double half_cauchy_logpdf(double x) {
    if (!(x > 0.0)) throw std::domain_error("half_cauchy_logpdf: argument must be positive");
    return std::log(2.0 / M_PI) - std::log1p(x * x);
}

inline double gamma_logpdf(double x, double shape, double rate) {
    if (!(x > 0.0)) return neg_inf();
    return shape * std::log(rate) - std::lgamma(shape) + (shape - 1.0) * std::log(x) - rate * x;
}

inline double sq(double x) { return x * x; }

// Type-7 (linear interpolation) empirical quantile of an already sorted vector.
inline double quantile_sorted(std::span<const double> sorted, double p) {
    if (sorted.empty()) throw std::invalid_argument("quantile: empty input");
    if (p <= 0.0) return sorted.front();
    if (p >= 1.0) return sorted.back();
    const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
    const std::size_t lo = static_cast<std::size_t>(std::floor(h));
    const double frac = h - static_cast<double>(lo);
    if (lo + 1 >= sorted.size()) return sorted.back();
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

inline double quantile(std::vector<double> v, double p) {
    std::sort(v.begin(), v.end());
    return quantile_sorted(v, p);
}

inline double mean_of(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

inline double variance_of(std::span<const double> v) {
    const double m = mean_of(v);
    double s = 0.0;
    for (double x : v) s += sq(x - m);
    return s / static_cast<double>(v.size() - 1);
}

} // namespace bdarma

#endif
