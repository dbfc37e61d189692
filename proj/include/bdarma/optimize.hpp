#ifndef BDARMA_OPTIMIZE_HPP
#define BDARMA_OPTIMIZE_HPP

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <limits>

#include "bdarma/math.hpp"

namespace bdarma {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Objective convention everywhere in this header: maximize f, where the
// callable computes f(x) and writes its gradient.
using Objective = std::function<double(const VectorXd&, VectorXd&)>;

struct OptimOptions {
    int max_iterations = 2000;
    double grad_tol = 1e-6; // max-norm of the gradient at the optimum
    int max_line_search_steps = 40;
};

struct OptimResult {
    VectorXd x;
    double value = neg_inf();
    VectorXd grad;
    int iterations = 0;
    int evaluations = 0;
    bool converged = false;
};

namespace detail {

// Strong-Wolfe line search on the minimization objective phi(a) = -f(x + a d).
// Returns the accepted step (0 on failure). Nocedal-Wright bracket plus zoom
// with bisection fallback; non-finite values are treated as +inf so the
// search backs off automatically.
class LineSearch {
  public:
    LineSearch(const Objective& f, const VectorXd& x, const VectorXd& d, double phi0, double dphi0,
               int max_steps)
        : f_(f), x_(x), d_(d), phi0_(phi0), dphi0_(dphi0), max_steps_(max_steps) {}

    // On success fills the state at the accepted point.
    bool run(double a_init, double& a_out, double& phi_out, VectorXd& x_out, VectorXd& g_out) {
        double a_prev = 0.0, phi_prev = phi0_, dphi_prev = dphi0_;
        double a = a_init;
        for (int i = 0; i < max_steps_; ++i) {
            double phi, dphi;
            eval(a, phi, dphi);
            if (phi > phi0_ + c1_ * a * dphi0_ || (i > 0 && phi >= phi_prev))
                return zoom(a_prev, phi_prev, dphi_prev, a, phi, dphi, a_out, phi_out, x_out,
                            g_out);
            if (std::abs(dphi) <= -c2_ * dphi0_) {
                accept(a, phi, a_out, phi_out, x_out, g_out);
                return true;
            }
            if (dphi >= 0.0)
                return zoom(a, phi, dphi, a_prev, phi_prev, dphi_prev, a_out, phi_out, x_out,
                            g_out);
            a_prev = a;
            phi_prev = phi;
            dphi_prev = dphi;
            a = std::min(2.0 * a, a_max_);
            if (a_prev >= a_max_) break;
        }
        return false;
    }

    int evaluations() const { return evals_; }

  private:
    static constexpr double c1_ = 1e-4;
    static constexpr double c2_ = 0.9;
    static constexpr double a_max_ = 1e4;

    void eval(double a, double& phi, double& dphi) {
        xb_ = x_ + a * d_;
        const double v = f_(xb_, gb_);
        ++evals_;
        if (std::isfinite(v)) {
            phi = -v;
            dphi = -gb_.dot(d_);
        } else {
            phi = std::numeric_limits<double>::infinity();
            dphi = std::numeric_limits<double>::infinity();
        }
    }

    void accept(double a, double phi, double& a_out, double& phi_out, VectorXd& x_out,
                VectorXd& g_out) {
        a_out = a;
        phi_out = phi;
        x_out = xb_;
        g_out = gb_;
    }

    bool zoom(double lo, double phi_lo, double dphi_lo, double hi, double phi_hi, double dphi_hi,
              double& a_out, double& phi_out, VectorXd& x_out, VectorXd& g_out) {
        (void)phi_hi;
        (void)dphi_hi;
        for (int i = 0; i < max_steps_; ++i) {
            double a = 0.5 * (lo + hi);
            // Cubic-ish bias toward the low end when the interval is sane.
            if (std::isfinite(dphi_lo) && std::abs(hi - lo) > 1e-14) {
                const double guess = lo + 0.3 * (hi - lo);
                if (std::isfinite(guess)) a = 0.5 * (a + guess);
            }
            double phi, dphi;
            eval(a, phi, dphi);
            if (phi > phi0_ + c1_ * a * dphi0_ || phi >= phi_lo) {
                hi = a;
            } else {
                if (std::abs(dphi) <= -c2_ * dphi0_) {
                    accept(a, phi, a_out, phi_out, x_out, g_out);
                    return true;
                }
                if (dphi * (hi - lo) >= 0.0) hi = lo;
                lo = a;
                phi_lo = phi;
                dphi_lo = dphi;
            }
            if (std::abs(hi - lo) < 1e-16 * std::max(1.0, std::abs(lo))) break;
        }
        // Fall back to the best sufficient-decrease point found, if any.
        if (phi_lo < phi0_ && lo > 0.0) {
            double phi, dphi;
            eval(lo, phi, dphi);
            if (std::isfinite(phi) && phi < phi0_) {
                accept(lo, phi, a_out, phi_out, x_out, g_out);
                return true;
            }
        }
        return false;
    }

    const Objective& f_;
    const VectorXd& x_;
    const VectorXd& d_;
    double phi0_, dphi0_;
    int max_steps_;
    int evals_ = 0;
    VectorXd xb_, gb_;
};

} // namespace detail

// Dense BFGS ascent with inverse-Hessian updates.
inline OptimResult bfgs_maximize(const Objective& f, const VectorXd& x0,
                                 const OptimOptions& opts = {}) {
    const int n = static_cast<int>(x0.size());
    OptimResult res;
    res.x = x0;
    res.grad.resize(n);
    res.value = f(res.x, res.grad);
    ++res.evaluations;
    if (!std::isfinite(res.value)) return res;

    MatrixXd H = MatrixXd::Identity(n, n);
    for (int iter = 0; iter < opts.max_iterations; ++iter) {
        res.iterations = iter;
        if (res.grad.lpNorm<Eigen::Infinity>() <= opts.grad_tol) {
            res.converged = true;
            return res;
        }
        VectorXd d = H * res.grad; // ascent direction
        double dphi0 = -res.grad.dot(d);
        if (dphi0 >= 0.0) { // not a descent direction for -f; reset
            H.setIdentity();
            d = res.grad;
            dphi0 = -res.grad.dot(d);
        }

        detail::LineSearch ls(f, res.x, d, -res.value, dphi0, opts.max_line_search_steps);
        double a = 0.0, phi = 0.0;
        VectorXd x_new(n), g_new(n);
        const double a_init = (iter == 0) ? std::min(1.0, 1.0 / std::max(1.0, -dphi0)) : 1.0;
        const bool ok = ls.run(a_init, a, phi, x_new, g_new);
        res.evaluations += ls.evaluations();
        if (!ok) { // stalled; the point may still satisfy the tolerance
            res.converged = res.grad.lpNorm<Eigen::Infinity>() <= opts.grad_tol;
            return res;
        }

        const VectorXd s = x_new - res.x;
        const VectorXd y = -(g_new - res.grad); // gradient of -f
        res.x = x_new;
        res.value = -phi;
        res.grad = g_new;

        const double sy = s.dot(y);
        if (sy > 1e-12 * s.norm() * y.norm()) {
            const double rho = 1.0 / sy;
            const MatrixXd V = MatrixXd::Identity(n, n) - rho * s * y.transpose();
            H = V * H * V.transpose() + rho * s * s.transpose();
        }
        if (s.lpNorm<Eigen::Infinity>() < 1e-14 * std::max(1.0, res.x.lpNorm<Eigen::Infinity>())) {
            res.converged = res.grad.lpNorm<Eigen::Infinity>() <= opts.grad_tol;
            return res;
        }
    }
    res.converged = res.grad.lpNorm<Eigen::Infinity>() <= opts.grad_tol;
    return res;
}

// Central finite differences of the analytic gradient; symmetrized.
inline MatrixXd hessian_of(const Objective& f, const VectorXd& x, double rel_step = 1e-4) {
    const int n = static_cast<int>(x.size());
    MatrixXd H(n, n);
    VectorXd gp(n), gm(n), xs = x;
    for (int i = 0; i < n; ++i) {
        const double h = rel_step * std::max(1.0, std::abs(x[i]));
        xs[i] = x[i] + h;
        f(xs, gp);
        xs[i] = x[i] - h;
        f(xs, gm);
        xs[i] = x[i];
        H.col(i) = (gp - gm) / (2.0 * h);
    }
    return 0.5 * (H + H.transpose());
}

} // namespace bdarma

#endif
