#ifndef BDARMA_POSTERIOR_HPP
#define BDARMA_POSTERIOR_HPP

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "bdarma/dirichlet.hpp"
#include "bdarma/math.hpp"
#include "bdarma/model.hpp"
#include "bdarma/rng.hpp"
#include "bdarma/simplex.hpp"

namespace bdarma {

// Largest |linear predictor| for the precision before exp/lgamma overflow
// becomes a concern; states beyond it are rejected with -inf.
inline constexpr double kMaxLogPhi = 300.0;
inline constexpr double kMinDirichletAlpha = 1e-290;

// Observation-side quantities precomputed once per series, shared by the
// Dirichlet and Gaussian likelihoods.
struct FitData {
    MatrixXd e;    // T x K, link-forward of each row
    MatrixXd logy; // T x J
    MatrixXd X;    // T x r_mean
    MatrixXd Z;    // T x r_scale
    MatrixXd L;    // J x K inverse-link matrix

    static FitData build(const ModelSpec& spec, const CompositionalSeries& data) {
        if (data.J() != spec.J)
            throw data_error("series has " + std::to_string(data.J()) + " components, model has " +
                             std::to_string(spec.J));
        const int T = data.T();
        const int K = spec.K();
        FitData fd;
        fd.e.resize(T, K);
        fd.logy = data.values().array().log();
        for (int t = 0; t < T; ++t)
            fd.e.row(t) = link_forward(spec.link, data.row(t), spec.ref()).transpose();
        fd.X = spec.mean_design.rows(T);
        fd.Z = spec.scale_design.rows(T);
        fd.L = link_matrix(spec.link, spec.J, spec.ref());
        return fd;
    }
};

// Shared VARMA recursion on the link scale.
//
// Rows 0..m-1 of eta are pinned to the observed coordinates (innovation zero,
// no likelihood contribution); rows t >= m follow
//   eta_t = u_t + sum_p A_p (e_{t-p} - c * u_{t-p}) + sum_q B_q (e_{t-q} - eta_{t-q})
// with u_t = beta * x_t and c = 1 for the centered form, 0 otherwise.
namespace recursion {

// Returns false when the recursion leaves the representable range.
inline bool forward(const Params& par, bool centered, const MatrixXd& e, const MatrixXd& X,
                    MatrixXd& U, MatrixXd& eta) {
    const int T = static_cast<int>(e.rows());
    const int P = static_cast<int>(par.A.size());
    const int Q = static_cast<int>(par.B.size());
    const int m = std::max(P, Q);
    U.noalias() = X * par.beta.transpose();
    eta.resize(T, e.cols());
    eta.topRows(std::min(m, T)) = e.topRows(std::min(m, T));
    for (int t = m; t < T; ++t) {
        VectorXd acc = U.row(t).transpose();
        for (int p = 1; p <= P; ++p) {
            if (centered)
                acc.noalias() += par.A[p - 1] * (e.row(t - p) - U.row(t - p)).transpose();
            else
                acc.noalias() += par.A[p - 1] * e.row(t - p).transpose();
        }
        for (int q = 1; q <= Q; ++q)
            acc.noalias() += par.B[q - 1] * (e.row(t - q) - eta.row(t - q)).transpose();
        if (!acc.allFinite()) return false;
        eta.row(t) = acc.transpose();
    }
    return true;
}

// Reverse sweep. `eta_bar` holds the direct d loglik / d eta_t on entry and is
// consumed in place; block gradients are written to the outputs.
inline void backward(const Params& par, bool centered, const MatrixXd& e, const MatrixXd& X,
                     const MatrixXd& U, const MatrixXd& eta, MatrixXd& eta_bar,
                     std::vector<MatrixXd>& gA, std::vector<MatrixXd>& gB, MatrixXd& gbeta) {
    const int T = static_cast<int>(e.rows());
    const int K = static_cast<int>(e.cols());
    const int P = static_cast<int>(par.A.size());
    const int Q = static_cast<int>(par.B.size());
    const int m = std::max(P, Q);
    gA.assign(P, MatrixXd::Zero(K, K));
    gB.assign(Q, MatrixXd::Zero(K, K));
    MatrixXd gU = MatrixXd::Zero(T, K);
    for (int t = T - 1; t >= m; --t) {
        for (int q = 1; q <= Q; ++q)
            if (t + q < T) eta_bar.row(t).noalias() -= eta_bar.row(t + q) * par.B[q - 1];
        const VectorXd bar = eta_bar.row(t).transpose();
        for (int p = 1; p <= P; ++p) {
            if (centered) {
                gA[p - 1].noalias() += bar * (e.row(t - p) - U.row(t - p));
                gU.row(t - p).noalias() -= bar.transpose() * par.A[p - 1];
            } else {
                gA[p - 1].noalias() += bar * e.row(t - p);
            }
        }
        for (int q = 1; q <= Q; ++q)
            gB[q - 1].noalias() += bar * (e.row(t - q) - eta.row(t - q));
        gU.row(t) += bar.transpose();
    }
    gbeta.noalias() = gU.transpose() * X;
}

} // namespace recursion

// Log prior over the flat parameter vector, including the change-of-variable
// terms for the log-scale coordinates. Gradients accumulate into `grad`.
inline double log_prior_and_grad(const Layout& layout, const VectorXd& theta, VectorXd* grad) {
    double lp = 0.0;
    const auto& group = layout.group();
    const double tau = layout.tau();
    const int lam0 = layout.lambda_offset();
    VectorXd lambda;
    if (layout.horseshoe())
        lambda = theta.segment(lam0, layout.n_lambda()).array().exp();
    for (int i = 0; i < layout.dim(); ++i) {
        const auto& e = layout.entries()[i];
        if (e.block == Layout::Block::Lambda) {
            const double l = lambda[e.col];
            lp += half_cauchy_logpdf(l) + theta[i];
            if (grad) (*grad)[i] += 1.0 - 2.0 * l * l / (1.0 + l * l);
            continue;
        }
        if (i == layout.gamma_intercept_index()) {
            const double g0 = std::exp(theta[i]);
            lp += gamma_logpdf(g0, layout.gamma_shape(), layout.gamma_rate()) + theta[i];
            if (grad) (*grad)[i] += layout.gamma_shape() - layout.gamma_rate() * g0;
            continue;
        }
        const double mean = layout.prior_mean()[i];
        double sd = layout.prior_sd()[i];
        if (group[i] >= 0) sd = tau * lambda[group[i]];
        const double z = (theta[i] - mean) / sd;
        lp += -0.5 * kLog2Pi - std::log(sd) - 0.5 * z * z;
        if (grad) {
            (*grad)[i] -= z / sd;
            if (group[i] >= 0) (*grad)[lam0 + group[i]] += z * z - 1.0;
        }
    }
    return lp;
}

// Log posterior (or pure log likelihood) of the Dirichlet ARMA model, with an
// analytic gradient and optional per-time likelihood terms.
class DarmaPosterior {
  public:
    DarmaPosterior(ModelSpec spec, const CompositionalSeries& data, bool include_prior = true)
        : spec_(std::move(spec)),
          layout_(Layout::build(spec_)),
          fd_(FitData::build(spec_, data)),
          include_prior_(include_prior) {}

    const ModelSpec& spec() const { return spec_; }
    const Layout& layout() const { return layout_; }
    const FitData& data() const { return fd_; }
    int dim() const { return layout_.dim(); }
    int first_lik_row() const { return spec_.lag_depth(); }
    int T() const { return static_cast<int>(fd_.e.rows()); }

    double operator()(const VectorXd& theta, VectorXd* grad = nullptr,
                      VectorXd* per_time = nullptr) const {
        if (grad) grad->setZero(dim());
        const Params par = layout_.unpack(theta);
        const int T = this->T();
        const int K = spec_.K();
        const int J = spec_.J;
        const int m = first_lik_row();
        if (per_time) per_time->setZero(T);

        auto reject = [&]() {
            if (per_time)
                per_time->segment(m, T - m).setConstant(neg_inf());
            return neg_inf();
        };

        MatrixXd U, eta;
        if (!recursion::forward(par, spec_.centered, fd_.e, fd_.X, U, eta)) return reject();

        const VectorXd gam = par.scale_coefficients();
        VectorXd logphi = fd_.Z * gam;
        if ((logphi.array().abs() > kMaxLogPhi).any()) return reject();

        double loglik = 0.0;
        MatrixXd eta_bar;
        VectorXd glogphi;
        if (grad) {
            eta_bar = MatrixXd::Zero(T, K);
            glogphi = VectorXd::Zero(T);
        }
        VectorXd c(J), mu(J), gmu(J);
        for (int t = m; t < T; ++t) {
            const double phi = std::exp(logphi[t]);
            c.noalias() = fd_.L * eta.row(t).transpose();
            const double cmax = c.maxCoeff();
            mu = (c.array() - cmax).exp();
            mu /= mu.sum();
            double term = std::lgamma(phi);
            bool bad = false;
            for (int j = 0; j < J; ++j) {
                const double a = phi * mu[j];
                if (a < kMinDirichletAlpha) {
                    bad = true;
                    break;
                }
                term += -std::lgamma(a) + (a - 1.0) * fd_.logy(t, j);
            }
            if (bad || !std::isfinite(term)) return reject();
            loglik += term;
            if (per_time) (*per_time)[t] = term;
            if (grad) {
                double dphi = digamma(phi);
                for (int j = 0; j < J; ++j) {
                    const double a = phi * mu[j];
                    const double da = digamma(a);
                    gmu[j] = phi * (fd_.logy(t, j) - da);
                    dphi += mu[j] * (fd_.logy(t, j) - da);
                }
                eta_bar.row(t).noalias() =
                    (fd_.L.transpose() * softmax_backprop(mu, gmu)).transpose();
                glogphi[t] = phi * dphi;
            }
        }

        if (grad) {
            std::vector<MatrixXd> gA, gB;
            MatrixXd gbeta;
            recursion::backward(par, spec_.centered, fd_.e, fd_.X, U, eta, eta_bar, gA, gB, gbeta);
            VectorXd ggamma = fd_.Z.transpose() * glogphi;
            if (par.gamma_intercept_log && ggamma.size() > 0) ggamma[0] *= gam[0];
            *grad = layout_.pack_grad(gA, gB, gbeta, ggamma,
                                      VectorXd::Zero(layout_.n_lambda()));
        }

        double lp = loglik;
        if (include_prior_) lp += log_prior_and_grad(layout_, theta, grad);
        return lp;
    }

    // Per-time conditional log likelihood log p(y_t | y_{1:t-1}, theta); rows
    // before the lag depth are zero. The recursion only reads past rows, so a
    // single full-length pass gives the conditional terms at every t.
    VectorXd log_lik_by_time(const VectorXd& theta) const {
        VectorXd out;
        (*this)(theta, nullptr, &out);
        return out;
    }

    // Mean compositions and precisions implied by theta at every t.
    void fitted(const VectorXd& theta, MatrixXd& mu, VectorXd& phi) const {
        const Params par = layout_.unpack(theta);
        MatrixXd U, eta;
        if (!recursion::forward(par, spec_.centered, fd_.e, fd_.X, U, eta))
            throw numeric_error("linear predictor diverged");
        const int T = this->T();
        mu.resize(T, spec_.J);
        for (int t = 0; t < T; ++t)
            mu.row(t) =
                link_inverse_values(spec_.link, eta.row(t).transpose(), spec_.ref()).transpose();
        phi = (fd_.Z * par.scale_coefficients()).array().exp();
    }

  private:
    ModelSpec spec_;
    Layout layout_;
    FitData fd_;
    bool include_prior_;
};

// Draws a series of length T from the model after discarding `burn` warmup
// steps. Design rows are indexed so that the kept window sees rows 1..T,
// matching what a subsequent fit will use.
struct SimulatedSeries {
    CompositionalSeries series;
    MatrixXd mu;  // T x J
    VectorXd phi; // T
};

// A trajectory whose linear predictor drifts past this bound is discarded and
// regenerated from the next stretch of the stream.
inline constexpr double kExplosionBound = 30.0;
inline constexpr int kMaxSimAttempts = 100;

inline SimulatedSeries simulate_darma(const ModelSpec& spec, const Params& par, int T, Rng& rng,
                                      int burn = 200, int* retries = nullptr) {
    spec.validate();
    const int J = spec.J;
    const int m = spec.lag_depth();
    const int N = burn + T;
    const VectorXd gam = par.scale_coefficients();

    std::vector<VectorXd> e(N), eta(N), u(N);
    MatrixXd y(N, J);
    VectorXd phis(N);
    MatrixXd mus(N, J);
    for (int attempt = 0; attempt < kMaxSimAttempts; ++attempt) {
        bool exploded = false;
        for (int i = 0; i < N && !exploded; ++i) {
            const double tau = static_cast<double>(i + 1 - burn); // kept window is 1..T
            const VectorXd x = spec.mean_design.row(tau);
            const VectorXd z = spec.scale_design.row(tau);
            u[i] = par.beta * x;
            VectorXd h = u[i];
            if (i >= m) {
                for (int p = 1; p <= spec.P; ++p) {
                    if (spec.centered)
                        h.noalias() += par.A[p - 1] * (e[i - p] - u[i - p]);
                    else
                        h.noalias() += par.A[p - 1] * e[i - p];
                }
                for (int q = 1; q <= spec.Q; ++q)
                    h.noalias() += par.B[q - 1] * (e[i - q] - eta[i - q]);
            }
            if (h.cwiseAbs().maxCoeff() > kExplosionBound) {
                exploded = true;
                break;
            }
            const Composition mu = link_inverse(spec.link, h, spec.ref());
            const double phi = std::exp(z.dot(gam));
            const Composition draw =
                dirichlet_sample(rng, DirichletParams::from(mu, phi), ZeroPolicy::Epsilon);
            y.row(i) = draw.values().transpose();
            mus.row(i) = mu.values().transpose();
            phis[i] = phi;
            e[i] = link_forward(spec.link, draw.values(), spec.ref());
            eta[i] = (i < m) ? e[i] : h;
        }
        if (!exploded) {
            SimulatedSeries out;
            out.series = CompositionalSeries::from_matrix(y.bottomRows(T));
            out.mu = mus.bottomRows(T);
            out.phi = phis.tail(T);
            return out;
        }
        if (retries) ++*retries;
    }
    throw numeric_error("simulated trajectory kept exploding; coefficients look non-stationary");
}

} // namespace bdarma

#endif
