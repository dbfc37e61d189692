#ifndef BDARMA_DIRICHLET_HPP
#define BDARMA_DIRICHLET_HPP

#include <Eigen/Dense>
#include <cmath>

#include "bdarma/math.hpp"
#include "bdarma/rng.hpp"
#include "bdarma/simplex.hpp"

namespace bdarma {

// log p(y | mu, phi) for y ~ Dirichlet(phi * mu).
inline double dirichlet_logpdf(const VectorXd& y, const VectorXd& mu, double phi) {
    double out = std::lgamma(phi);
    for (Eigen::Index j = 0; j < y.size(); ++j) {
        const double a = phi * mu[j];
        out += -std::lgamma(a) + (a - 1.0) * std::log(y[j]);
    }
    return out;
}

inline double dirichlet_logpdf(const Composition& y, const DirichletParams& p) {
    return dirichlet_logpdf(y.values(), p.mean.values(), p.scale);
}

// Gradient of the logpdf with respect to mu, holding phi fixed.
inline VectorXd dirichlet_grad_mu(const VectorXd& y, const VectorXd& mu, double phi) {
    VectorXd g(y.size());
    for (Eigen::Index j = 0; j < y.size(); ++j)
        g[j] = phi * (std::log(y[j]) - digamma(phi * mu[j]));
    return g;
}

// Chain rule through mu = softmax(c): d logpdf / dc_k = mu_k * (g_k - sum_j mu_j g_j).
inline VectorXd softmax_backprop(const VectorXd& mu, const VectorXd& grad_mu) {
    const double bar = mu.dot(grad_mu);
    return mu.array() * (grad_mu.array() - bar);
}

// d logpdf / d log(phi).
inline double dirichlet_grad_logphi(const VectorXd& y, const VectorXd& mu, double phi) {
    double acc = digamma(phi);
    for (Eigen::Index j = 0; j < y.size(); ++j)
        acc += mu[j] * (std::log(y[j]) - digamma(phi * mu[j]));
    return phi * acc;
}

// Draw from Dirichlet(alpha) as normalized Gamma(alpha_j, 1) variates.
inline VectorXd dirichlet_sample_values(Rng& rng, const VectorXd& alpha) {
    VectorXd parts(alpha.size());
    for (Eigen::Index j = 0; j < alpha.size(); ++j) parts[j] = rng.gamma(alpha[j]);
    const double sum = parts.sum();
    if (!(sum > 0.0)) {
        // All-zero underflow is only reachable for tiny alphas; restart keeps
        // the draw exact rather than clamping.
        return dirichlet_sample_values(rng, alpha);
    }
    return parts / sum;
}

inline Composition dirichlet_sample(Rng& rng, const DirichletParams& p,
                                    ZeroPolicy policy = ZeroPolicy::Epsilon) {
    VectorXd alpha = p.scale * p.mean.values();
    return Composition::from_unnormalized(dirichlet_sample_values(rng, alpha), policy);
}

} // namespace bdarma

#endif
