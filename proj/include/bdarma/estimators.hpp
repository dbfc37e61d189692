#ifndef BDARMA_ESTIMATORS_HPP
#define BDARMA_ESTIMATORS_HPP

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "bdarma/hmc.hpp"
#include "bdarma/optimize.hpp"
#include "bdarma/posterior.hpp"
#include "bdarma/rng.hpp"
#include "bdarma/summary.hpp"
#include "bdarma/tvarma.hpp"

namespace bdarma {

struct BayesFit {
    std::vector<std::string> names;
    std::vector<ChainRun> chains;
    std::vector<ParamSummary> summary;
    std::vector<std::string> warnings;

    int total_divergences() const {
        int n = 0;
        for (const auto& c : chains) n += c.divergences;
        return n;
    }

    int n_draws() const {
        int n = 0;
        for (const auto& c : chains) n += static_cast<int>(c.draws.rows());
        return n;
    }

    // All post-warmup draws stacked chain by chain.
    MatrixXd draws() const {
        if (chains.empty()) return {};
        MatrixXd out(n_draws(), chains[0].draws.cols());
        int row = 0;
        for (const auto& c : chains) {
            out.middleRows(row, c.draws.rows()) = c.draws;
            row += static_cast<int>(c.draws.rows());
        }
        return out;
    }

    const ParamSummary& param(const std::string& name) const {
        for (const auto& p : summary)
            if (p.name == name) return p;
        throw config_error("no parameter named " + name);
    }
};

inline BayesFit run_nuts(const Objective& logp, int dim, const std::vector<std::string>& names,
                         const Rng& rng, const NutsOptions& opts) {
    BayesFit fit;
    fit.names = names;
    fit.chains = nuts_sample(logp, dim, rng, opts);
    fit.summary = summarize_draws(names, fit.chains);
    fit.warnings = sampler_warnings(fit.chains, fit.summary);
    return fit;
}

inline BayesFit fit_bayes_darma(const DarmaPosterior& post, const Rng& rng,
                                const NutsOptions& opts = {}) {
    Objective f = [&post](const VectorXd& x, VectorXd& g) { return post(x, &g); };
    return run_nuts(f, post.dim(), post.layout().names(), rng.child("nuts"), opts);
}

struct MleOptions {
    OptimOptions optim;
    int retries = 8;
    double init_range = 1.0;
    bool compute_covariance = true;
};

struct MleFit {
    std::vector<std::string> names;
    VectorXd theta;
    double loglik = neg_inf();
    VectorXd grad;
    MatrixXd covariance; // inverse observed information; empty if not computed
    bool converged = false;
    int attempts = 0;

    double value(const std::string& name) const {
        for (size_t i = 0; i < names.size(); ++i)
            if (names[i] == name) return theta[static_cast<Eigen::Index>(i)];
        throw config_error("no parameter named " + name);
    }
};

// Multistart BFGS: fresh uniform starting points until one run converges,
// keeping the best optimum seen either way.
inline MleFit fit_mle(const Objective& f, int dim, const std::vector<std::string>& names,
                      const Rng& rng, const MleOptions& opts = {}) {
    MleFit fit;
    fit.names = names;
    Rng init_rng = rng.child("mle_init");
    for (int attempt = 0; attempt < std::max(1, opts.retries); ++attempt) {
        VectorXd x0(dim);
        for (int i = 0; i < dim; ++i) x0[i] = init_rng.uniform(-opts.init_range, opts.init_range);
        const OptimResult r = bfgs_maximize(f, x0, opts.optim);
        ++fit.attempts;
        if (r.value > fit.loglik) {
            fit.theta = r.x;
            fit.loglik = r.value;
            fit.grad = r.grad;
            fit.converged = r.converged;
        }
        if (fit.converged) break;
    }
    if (opts.compute_covariance && fit.theta.size() == dim) {
        const MatrixXd H = hessian_of(f, fit.theta);
        const MatrixXd info = -H;
        Eigen::FullPivLU<MatrixXd> lu(info);
        if (lu.isInvertible()) fit.covariance = lu.inverse();
    }
    return fit;
}

inline MleFit fit_mle_darma(const ModelSpec& spec, const CompositionalSeries& data, const Rng& rng,
                            const MleOptions& opts = {}) {
    // The likelihood does not involve the prior blocks, so strip the
    // parameter-expanding prior options from the layout.
    ModelSpec ml = spec;
    ml.prior.horseshoe = false;
    ml.prior.gamma_intercept_gamma = false;
    DarmaPosterior post(ml, data, /*include_prior=*/false);
    Objective f = [&post](const VectorXd& x, VectorXd& g) { return post(x, &g); };
    MleFit fit = fit_mle(f, post.dim(), post.layout().names(), rng.child("mle"), opts);
    return fit;
}

inline MleFit fit_mle_tvarma(const ModelSpec& spec, const CompositionalSeries& data, const Rng& rng,
                             const MleOptions& opts = {}) {
    TvarmaLikelihood lik(spec, data);
    Objective f = [&lik](const VectorXd& x, VectorXd& g) { return lik(x, &g); };
    return fit_mle(f, lik.dim(), lik.names(), rng.child("mle_tvarma"), opts);
}

} // namespace bdarma

#endif
