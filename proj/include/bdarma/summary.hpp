#ifndef BDARMA_SUMMARY_HPP
#define BDARMA_SUMMARY_HPP

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "bdarma/diagnostics.hpp"
#include "bdarma/hmc.hpp"
#include "bdarma/math.hpp"

namespace bdarma {

struct ParamSummary {
    std::string name;
    double mean = 0.0;
    double sd = 0.0;
    double median = 0.0;
    double q2_5 = 0.0;
    double q97_5 = 0.0;
    double rhat = 0.0;
    double ess = 0.0;
};

inline std::vector<ParamSummary> summarize_draws(const std::vector<std::string>& names,
                                                 const std::vector<ChainRun>& chains) {
    const int dim = static_cast<int>(names.size());
    std::vector<ParamSummary> out(dim);
    for (int i = 0; i < dim; ++i) {
        std::vector<VectorXd> per_chain;
        std::vector<double> all;
        for (const auto& c : chains) {
            per_chain.push_back(c.draws.col(i));
            for (int s = 0; s < c.draws.rows(); ++s) all.push_back(c.draws(s, i));
        }
        ParamSummary& p = out[i];
        p.name = names[i];
        p.mean = mean_of(all);
        p.sd = std::sqrt(variance_of(all));
        p.median = quantile(all, 0.5);
        p.q2_5 = quantile(all, 0.025);
        p.q97_5 = quantile(all, 0.975);
        p.rhat = split_rhat(per_chain);
        p.ess = ess(per_chain);
    }
    return out;
}

// Post-sampling health checks: divergent transitions above 1% and split
// R-hat above 1.05 are worth flagging.
inline std::vector<std::string> sampler_warnings(const std::vector<ChainRun>& chains,
                                                 const std::vector<ParamSummary>& summary) {
    std::vector<std::string> out;
    int div = 0, total = 0, depth = 0;
    for (const auto& c : chains) {
        div += c.divergences;
        depth += c.max_depth_hits;
        total += static_cast<int>(c.draws.rows());
    }
    if (total > 0 && div > 0.01 * total)
        out.push_back(std::to_string(div) + " of " + std::to_string(total) +
                      " post-warmup draws were divergent; results may be biased");
    if (depth > 0)
        out.push_back(std::to_string(depth) + " draws hit the maximum tree depth");
    for (const auto& p : summary)
        if (std::isfinite(p.rhat) && p.rhat > 1.05)
            out.push_back("split R-hat for " + p.name + " is " + std::to_string(p.rhat) +
                          " (> 1.05); chains have not mixed");
    return out;
}

} // namespace bdarma

#endif
