#ifndef BDARMA_HMC_HPP
#define BDARMA_HMC_HPP

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "bdarma/errors.hpp"
#include "bdarma/math.hpp"
#include "bdarma/optimize.hpp"
#include "bdarma/rng.hpp"
#include "bdarma/threading.hpp"

namespace bdarma {

struct NutsOptions {
    int chains = 4;
    int warmup = 1000;
    int samples = 1000;
    double target_accept = 0.8;
    int max_tree_depth = 10;
    double max_delta_h = 1000.0; // divergence threshold
    double init_range = 1.0;     // uniform(-r, r) starting values
    int init_buffer = 0;         // 0 -> 15% of warmup
    int term_buffer = 0;         // 0 -> 10% of warmup
    int window_base = 25;
    int threads = 1;
};

struct ChainRun {
    MatrixXd draws;   // samples x dim, post-warmup
    VectorXd logpost; // samples
    int divergences = 0;
    int warmup_divergences = 0;
    int max_depth_hits = 0;
    double step_size = 0.0;
    double accept_rate = 0.0;
    VectorXd inv_mass;
};

namespace nuts_detail {

struct DualAveraging {
    double mu = 0.0;
    double log_eps = 0.0;
    double log_eps_bar = 0.0;
    double h_bar = 0.0;
    int m = 0;
    static constexpr double gamma = 0.05;
    static constexpr double t0 = 10.0;
    static constexpr double kappa = 0.75;

    void restart(double eps) {
        mu = std::log(10.0 * eps);
        log_eps = std::log(eps);
        log_eps_bar = 0.0;
        h_bar = 0.0;
        m = 0;
    }

    double update(double accept_prob, double target) {
        ++m;
        h_bar += (target - accept_prob - h_bar) / (m + t0);
        log_eps = mu - std::sqrt(static_cast<double>(m)) / gamma * h_bar;
        const double w = std::pow(static_cast<double>(m), -kappa);
        log_eps_bar = w * log_eps + (1.0 - w) * log_eps_bar;
        return std::exp(log_eps);
    }

    double averaged() const { return std::exp(log_eps_bar); }
};

// One NUTS chain over a differentiable log density.
class Sampler {
  public:
    Sampler(const Objective& logp, int dim, const NutsOptions& opts, Rng rng)
        : f_(logp), dim_(dim), opts_(opts), rng_(std::move(rng)) {
        inv_mass_ = VectorXd::Ones(dim_);
    }

    ChainRun run() {
        initialize();
        double eps = find_reasonable_epsilon();
        da_.restart(eps);

        const int warmup = opts_.warmup;
        const auto windows = mass_windows(warmup);
        size_t wi = 0;
        VectorXd wsum = VectorXd::Zero(dim_), wsq = VectorXd::Zero(dim_);
        int wn = 0;

        ChainRun out;
        out.draws.resize(opts_.samples, dim_);
        out.logpost.resize(opts_.samples);
        double accept_acc = 0.0;

        for (int it = 0; it < warmup + opts_.samples; ++it) {
            const bool in_warmup = it < warmup;
            const Transition tr = transition(eps);
            if (tr.diverged) (in_warmup ? out.warmup_divergences : out.divergences)++;
            if (tr.hit_max_depth && !in_warmup) out.max_depth_hits++;
            if (in_warmup) {
                eps = da_.update(tr.accept_prob, opts_.target_accept);
                if (wi < windows.size() && it >= windows[wi].first && it < windows[wi].second) {
                    wsum += theta_;
                    wsq += theta_.cwiseProduct(theta_);
                    ++wn;
                    if (it + 1 == windows[wi].second) {
                        update_inv_mass(wsum, wsq, wn);
                        wsum.setZero();
                        wsq.setZero();
                        wn = 0;
                        ++wi;
                        eps = find_reasonable_epsilon();
                        da_.restart(eps);
                    }
                }
                if (it + 1 == warmup) eps = da_.averaged();
            } else {
                out.draws.row(it - warmup) = theta_.transpose();
                out.logpost[it - warmup] = logp_;
                accept_acc += tr.accept_prob;
            }
        }
        out.step_size = eps;
        out.inv_mass = inv_mass_;
        out.accept_rate = opts_.samples > 0 ? accept_acc / opts_.samples : 0.0;
        return out;
    }

  private:
    struct Transition {
        double accept_prob = 0.0;
        bool diverged = false;
        bool hit_max_depth = false;
    };

    struct Point {
        VectorXd theta, r, grad;
        double logp = 0.0;
    };

    struct Subtree {
        Point minus, plus; // trajectory-time ends
        VectorXd theta_prop, grad_prop;
        double logp_prop = 0.0;
        double log_sum_w = 0.0;
        double sum_accept = 0.0;
        int n_leapfrog = 0;
        bool turning = false;
        bool diverged = false;

        bool valid() const { return !turning && !diverged; }
    };

    void initialize() {
        for (int attempt = 0; attempt < 100; ++attempt) {
            VectorXd x(dim_);
            for (int i = 0; i < dim_; ++i) x[i] = rng_.uniform(-opts_.init_range, opts_.init_range);
            VectorXd g(dim_);
            const double v = f_(x, g);
            if (std::isfinite(v) && g.allFinite()) {
                theta_ = x;
                grad_ = g;
                logp_ = v;
                return;
            }
        }
        throw numeric_error("could not find a starting point with a finite log density");
    }

    double kinetic(const VectorXd& r) const {
        return 0.5 * r.cwiseProduct(r).dot(inv_mass_);
    }

    VectorXd sample_momentum() {
        VectorXd r(dim_);
        for (int i = 0; i < dim_; ++i) r[i] = rng_.normal() / std::sqrt(inv_mass_[i]);
        return r;
    }

    // One leapfrog step; returns false when the density or gradient blew up.
    bool leapfrog(Point& p, double eps) {
        p.r += 0.5 * eps * p.grad;
        p.theta += eps * inv_mass_.cwiseProduct(p.r);
        p.logp = f_(p.theta, p.grad);
        if (!std::isfinite(p.logp) || !p.grad.allFinite()) return false;
        p.r += 0.5 * eps * p.grad;
        return true;
    }

    bool uturn(const Point& minus, const Point& plus) const {
        const VectorXd d = plus.theta - minus.theta;
        return d.dot(inv_mass_.cwiseProduct(minus.r)) < 0.0 ||
               d.dot(inv_mass_.cwiseProduct(plus.r)) < 0.0;
    }

    Subtree leaf(Point from, int dir, double eps, double h0) {
        Subtree s;
        const bool ok = leapfrog(from, dir * eps);
        const double h = ok ? -from.logp + kinetic(from.r)
                            : std::numeric_limits<double>::infinity();
        const double dh = h - h0;
        s.n_leapfrog = 1;
        s.sum_accept = (dh < 0.0) ? 1.0 : std::exp(-dh);
        if (!std::isfinite(s.sum_accept)) s.sum_accept = 0.0;
        s.log_sum_w = -dh;
        if (!(dh <= opts_.max_delta_h)) {
            s.diverged = true;
            s.log_sum_w = neg_inf();
        }
        s.minus = s.plus = from;
        s.theta_prop = from.theta;
        s.grad_prop = from.grad;
        s.logp_prop = from.logp;
        return s;
    }

    Subtree build_tree(int depth, const Point& from, int dir, double eps, double h0) {
        if (depth == 0) return leaf(from, dir, eps, h0);
        Subtree t1 = build_tree(depth - 1, from, dir, eps, h0);
        if (!t1.valid()) return t1;
        const Point& edge = (dir == 1) ? t1.plus : t1.minus;
        Subtree t2 = build_tree(depth - 1, edge, dir, eps, h0);
        t1.n_leapfrog += t2.n_leapfrog;
        t1.sum_accept += t2.sum_accept;
        if (!t2.valid()) {
            t1.turning = t2.turning;
            t1.diverged = t2.diverged;
            return t1;
        }
        const double total = log_sum_exp(t1.log_sum_w, t2.log_sum_w);
        if (std::log(rng_.uniform()) < t2.log_sum_w - total) {
            t1.theta_prop = t2.theta_prop;
            t1.grad_prop = t2.grad_prop;
            t1.logp_prop = t2.logp_prop;
        }
        t1.log_sum_w = total;
        if (dir == 1)
            t1.plus = t2.plus;
        else
            t1.minus = t2.minus;
        t1.turning = uturn(t1.minus, t1.plus);
        return t1;
    }

    Transition transition(double eps) {
        Point init{theta_, sample_momentum(), grad_, logp_};
        const double h0 = -logp_ + kinetic(init.r);

        Point minus = init, plus = init;
        VectorXd theta_prop = theta_, grad_prop = grad_;
        double logp_prop = logp_;
        double log_sum_w = 0.0; // the initial point carries weight exp(0)
        double sum_accept = 0.0;
        int n_leapfrog = 0;

        Transition tr;
        int depth = 0;
        for (; depth < opts_.max_tree_depth; ++depth) {
            const int dir = rng_.uniform() < 0.5 ? -1 : 1;
            const Point& edge = (dir == 1) ? plus : minus;
            Subtree sub = build_tree(depth, edge, dir, eps, h0);
            sum_accept += sub.sum_accept;
            n_leapfrog += sub.n_leapfrog;
            if (sub.diverged) tr.diverged = true;
            if (!sub.valid()) break;
            // Biased progressive sampling: favor the fresh half.
            if (std::log(rng_.uniform()) < sub.log_sum_w - log_sum_w) {
                theta_prop = sub.theta_prop;
                grad_prop = sub.grad_prop;
                logp_prop = sub.logp_prop;
            }
            log_sum_w = log_sum_exp(log_sum_w, sub.log_sum_w);
            if (dir == 1)
                plus = sub.plus;
            else
                minus = sub.minus;
            if (uturn(minus, plus)) break;
        }
        if (depth == opts_.max_tree_depth) tr.hit_max_depth = true;

        theta_ = theta_prop;
        grad_ = grad_prop;
        logp_ = logp_prop;
        tr.accept_prob = n_leapfrog > 0 ? sum_accept / n_leapfrog : 0.0;
        return tr;
    }

    double find_reasonable_epsilon() {
        double eps = 1.0;
        Point p{theta_, sample_momentum(), grad_, logp_};
        const double h0 = -p.logp + kinetic(p.r);
        auto log_ratio_at = [&](double e) {
            Point q = p;
            if (!leapfrog(q, e)) return neg_inf();
            const double h = -q.logp + kinetic(q.r);
            return h0 - h;
        };
        double lr = log_ratio_at(eps);
        const double dir = lr > std::log(0.5) ? 1.0 : -1.0;
        for (int i = 0; i < 60; ++i) {
            if (dir * lr <= dir * std::log(0.5)) break;
            eps *= std::pow(2.0, dir);
            if (eps < 1e-10 || eps > 1e7) break;
            lr = log_ratio_at(eps);
        }
        return std::clamp(eps, 1e-10, 1e7);
    }

    // Half-open [start, end) warmup iteration ranges whose draws feed the
    // diagonal mass estimate; doubling sizes, final window stretched to the
    // end of the adaptation span.
    std::vector<std::pair<int, int>> mass_windows(int warmup) const {
        const int init = opts_.init_buffer > 0
                             ? opts_.init_buffer
                             : std::max(1, static_cast<int>(std::lround(0.15 * warmup)));
        const int term = opts_.term_buffer > 0
                             ? opts_.term_buffer
                             : std::max(1, static_cast<int>(std::lround(0.10 * warmup)));
        std::vector<std::pair<int, int>> windows;
        const int end_all = warmup - term;
        if (end_all - init < 10) return windows;
        int start = init;
        int size = opts_.window_base;
        while (true) {
            int end = start + size;
            if (end + 2 * size > end_all) {
                windows.emplace_back(start, end_all);
                break;
            }
            windows.emplace_back(start, end);
            start = end;
            size *= 2;
        }
        return windows;
    }

    void update_inv_mass(const VectorXd& sum, const VectorXd& sumsq, int n) {
        if (n < 2) return;
        const double nn = static_cast<double>(n);
        VectorXd var = (sumsq - sum.cwiseProduct(sum) / nn) / (nn - 1.0);
        const double shrink = nn / (nn + 5.0);
        var = (shrink * var.array() + 1e-3 * (1.0 - shrink)).matrix();
        for (int i = 0; i < dim_; ++i)
            if (std::isfinite(var[i]) && var[i] > 0.0) inv_mass_[i] = var[i];
    }

    const Objective& f_;
    int dim_;
    NutsOptions opts_;
    Rng rng_;
    VectorXd inv_mass_;
    VectorXd theta_, grad_;
    double logp_ = 0.0;
    DualAveraging da_;
};

} // namespace nuts_detail

// Runs `opts.chains` NUTS chains; chain c uses the rng child ("chain", c), so
// results do not depend on the thread count.
inline std::vector<ChainRun> nuts_sample(const Objective& logp, int dim, const Rng& master,
                                         const NutsOptions& opts = {}) {
    std::vector<ChainRun> runs(opts.chains);
    parallel_for_indexed(opts.chains, opts.threads, [&](int c) {
        nuts_detail::Sampler sampler(logp, dim, opts, master.child("chain", c));
        runs[c] = sampler.run();
    });
    return runs;
}

} // namespace bdarma

#endif
