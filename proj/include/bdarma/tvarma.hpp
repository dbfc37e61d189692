#ifndef BDARMA_TVARMA_HPP
#define BDARMA_TVARMA_HPP

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "bdarma/math.hpp"
#include "bdarma/model.hpp"
#include "bdarma/posterior.hpp"

namespace bdarma {

// Gaussian VARMA on the link-transformed series: e_t ~ N(eta_t, Sigma), with
// the same recursion, masks and design as the Dirichlet model. Sigma = L L'
// with a log-diagonal lower Cholesky factor. Fitted by maximum likelihood.
class TvarmaLikelihood {
  public:
    TvarmaLikelihood(ModelSpec spec, const CompositionalSeries& data)
        : spec_(std::move(spec)), fd_(FitData::build(spec_, data)) {
        mask_ = Mask::named(spec_.mask, spec_.K());
        n_ab_ = mask_.free_count();
    }

    const ModelSpec& spec() const { return spec_; }
    const FitData& data() const { return fd_; }

    int K() const { return spec_.K(); }
    int first_lik_row() const { return spec_.lag_depth(); }
    int T() const { return static_cast<int>(fd_.e.rows()); }

    int dim() const {
        const int K = this->K();
        return n_ab_ * (spec_.P + spec_.Q) + K * spec_.mean_design.columns() + K +
               K * (K - 1) / 2;
    }

    struct Unpacked {
        Params par;    // A, B, beta (gamma unused)
        MatrixXd chol; // K x K lower-triangular factor of Sigma
    };

    Unpacked unpack(const VectorXd& theta) const {
        if (theta.size() != dim())
            throw config_error("parameter vector has length " + std::to_string(theta.size()) +
                               ", model needs " + std::to_string(dim()));
        const int K = this->K();
        Unpacked u;
        u.par.A.assign(spec_.P, MatrixXd::Zero(K, K));
        u.par.B.assign(spec_.Q, MatrixXd::Zero(K, K));
        u.par.beta = MatrixXd::Zero(K, spec_.mean_design.columns());
        int i = 0;
        for (int p = 0; p < spec_.P; ++p)
            for (int r = 0; r < K; ++r)
                for (int c = 0; c < K; ++c)
                    if (mask_.allows(r, c)) u.par.A[p](r, c) = theta[i++];
        for (int q = 0; q < spec_.Q; ++q)
            for (int r = 0; r < K; ++r)
                for (int c = 0; c < K; ++c)
                    if (mask_.allows(r, c)) u.par.B[q](r, c) = theta[i++];
        for (int r = 0; r < K; ++r)
            for (int c = 0; c < u.par.beta.cols(); ++c) u.par.beta(r, c) = theta[i++];
        u.chol = MatrixXd::Zero(K, K);
        for (int d = 0; d < K; ++d) u.chol(d, d) = std::exp(theta[i++]);
        for (int r = 0; r < K; ++r)
            for (int c = 0; c < r; ++c) u.chol(r, c) = theta[i++];
        return u;
    }

    VectorXd pack(const Params& par, const MatrixXd& chol) const {
        const int K = this->K();
        VectorXd theta(dim());
        int i = 0;
        for (int p = 0; p < spec_.P; ++p)
            for (int r = 0; r < K; ++r)
                for (int c = 0; c < K; ++c)
                    if (mask_.allows(r, c)) theta[i++] = par.A[p](r, c);
        for (int q = 0; q < spec_.Q; ++q)
            for (int r = 0; r < K; ++r)
                for (int c = 0; c < K; ++c)
                    if (mask_.allows(r, c)) theta[i++] = par.B[q](r, c);
        for (int r = 0; r < K; ++r)
            for (int c = 0; c < par.beta.cols(); ++c) theta[i++] = par.beta(r, c);
        for (int d = 0; d < K; ++d) theta[i++] = std::log(chol(d, d));
        for (int r = 0; r < K; ++r)
            for (int c = 0; c < r; ++c) theta[i++] = chol(r, c);
        return theta;
    }

    std::vector<std::string> names() const {
        std::vector<std::string> out;
        const int K = this->K();
        for (int p = 0; p < spec_.P; ++p)
            for (int r = 0; r < K; ++r)
                for (int c = 0; c < K; ++c)
                    if (mask_.allows(r, c))
                        out.push_back("a" + std::to_string(p + 1) + "_" + std::to_string(r + 1) +
                                      "_" + std::to_string(c + 1));
        for (int q = 0; q < spec_.Q; ++q)
            for (int r = 0; r < K; ++r)
                for (int c = 0; c < K; ++c)
                    if (mask_.allows(r, c))
                        out.push_back("b" + std::to_string(q + 1) + "_" + std::to_string(r + 1) +
                                      "_" + std::to_string(c + 1));
        for (int r = 0; r < K; ++r)
            for (int c = 0; c < spec_.mean_design.columns(); ++c)
                out.push_back("beta_" + std::to_string(r + 1) + "_" + std::to_string(c + 1));
        for (int d = 0; d < K; ++d) out.push_back("log_chol_" + std::to_string(d + 1));
        for (int r = 0; r < K; ++r)
            for (int c = 0; c < r; ++c)
                out.push_back("chol_" + std::to_string(r + 1) + "_" + std::to_string(c + 1));
        return out;
    }

    double operator()(const VectorXd& theta, VectorXd* grad = nullptr) const {
        if (grad) grad->setZero(dim());
        const Unpacked u = unpack(theta);
        const int T = this->T();
        const int K = this->K();
        const int m = first_lik_row();
        const int n = T - m;

        MatrixXd U, eta;
        if (!recursion::forward(u.par, spec_.centered, fd_.e, fd_.X, U, eta)) return neg_inf();

        MatrixXd R = fd_.e.bottomRows(n) - eta.bottomRows(n); // n x K residuals
        const auto Lt = u.chol.triangularView<Eigen::Lower>();
        MatrixXd W = Lt.solve(R.transpose()); // K x n
        double logdet = 0.0;
        for (int d = 0; d < K; ++d) logdet += std::log(u.chol(d, d));
        const double loglik =
            -0.5 * n * K * kLog2Pi - n * logdet - 0.5 * W.squaredNorm();
        if (!std::isfinite(loglik)) return neg_inf();
        if (!grad) return loglik;

        MatrixXd Qm = u.chol.transpose().triangularView<Eigen::Upper>().solve(W); // K x n
        MatrixXd eta_bar = MatrixXd::Zero(T, K);
        eta_bar.bottomRows(n) = Qm.transpose();

        std::vector<MatrixXd> gA, gB;
        MatrixXd gbeta;
        recursion::backward(u.par, spec_.centered, fd_.e, fd_.X, U, eta, eta_bar, gA, gB, gbeta);

        MatrixXd S = R.transpose() * R;
        MatrixXd SigInv = Lt.solve(MatrixXd::Identity(K, K));
        SigInv = u.chol.transpose().triangularView<Eigen::Upper>().solve(SigInv);
        MatrixXd G = 0.5 * SigInv * S * SigInv - 0.5 * n * SigInv;
        MatrixXd gL = 2.0 * G * u.chol;

        int i = 0;
        for (int p = 0; p < spec_.P; ++p)
            for (int r = 0; r < K; ++r)
                for (int c = 0; c < K; ++c)
                    if (mask_.allows(r, c)) (*grad)[i++] = gA[p](r, c);
        for (int q = 0; q < spec_.Q; ++q)
            for (int r = 0; r < K; ++r)
                for (int c = 0; c < K; ++c)
                    if (mask_.allows(r, c)) (*grad)[i++] = gB[q](r, c);
        for (int r = 0; r < K; ++r)
            for (int c = 0; c < gbeta.cols(); ++c) (*grad)[i++] = gbeta(r, c);
        for (int d = 0; d < K; ++d) (*grad)[i++] = gL(d, d) * u.chol(d, d);
        for (int r = 0; r < K; ++r)
            for (int c = 0; c < r; ++c) (*grad)[i++] = gL(r, c);
        return loglik;
    }

  private:
    ModelSpec spec_;
    FitData fd_;
    Mask mask_;
    int n_ab_ = 0;
};

// Gaussian-noise counterpart of simulate_darma; mu holds the inverse-linked
// recursion mean and phi is unused (zero).
inline SimulatedSeries simulate_tvarma(const ModelSpec& spec, const Params& par,
                                       const MatrixXd& chol, int T, Rng& rng, int burn = 200,
                                       int* retries = nullptr) {
    spec.validate();
    const int J = spec.J;
    const int K = spec.K();
    const int m = spec.lag_depth();
    const int N = burn + T;

    std::vector<VectorXd> e(N), eta(N), u(N);
    MatrixXd y(N, J), mus(N, J);
    for (int attempt = 0; attempt < kMaxSimAttempts; ++attempt) {
        bool exploded = false;
        for (int i = 0; i < N && !exploded; ++i) {
            const double tau = static_cast<double>(i + 1 - burn);
            const VectorXd x = spec.mean_design.row(tau);
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
            VectorXd z(K);
            for (int k = 0; k < K; ++k) z[k] = rng.normal();
            e[i] = h + chol.triangularView<Eigen::Lower>() * z;
            eta[i] = (i < m) ? e[i] : h;
            y.row(i) = Composition::from(link_inverse_values(spec.link, e[i], spec.ref()),
                                         ZeroPolicy::Epsilon)
                           .values()
                           .transpose();
            mus.row(i) = link_inverse_values(spec.link, h, spec.ref()).transpose();
        }
        if (!exploded) {
            SimulatedSeries out;
            out.series = CompositionalSeries::from_matrix(y.bottomRows(T));
            out.mu = mus.bottomRows(T);
            out.phi = VectorXd::Zero(T);
            return out;
        }
        if (retries) ++*retries;
    }
    throw numeric_error("simulated trajectory kept exploding; coefficients look non-stationary");
}

} // namespace bdarma

#endif
