#ifndef BDARMA_LFO_HPP
#define BDARMA_LFO_HPP

#include <Eigen/Dense>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "bdarma/estimators.hpp"
#include "bdarma/math.hpp"
#include "bdarma/model.hpp"
#include "bdarma/posterior.hpp"
#include "bdarma/psis.hpp"

namespace bdarma {

struct LfoOptions {
    int L = 0;                // first conditioning length; 0 -> T / 2
    int M = 1;                // forecast block width
    double k_threshold = 0.7; // refit when the tail shape exceeds this
    bool exact = false;       // refit at every step instead of reweighting
    NutsOptions nuts;
};

struct LfoResult {
    double elpd = 0.0;
    VectorXd per_step;            // log p(y_{t+1:t+M} | y_{1:t}) for t = L..T-M
    std::vector<int> step_times;  // the t of each entry above
    std::vector<int> refit_times; // conditioning lengths where a fit ran
    VectorXd khat;                // tail shape used at each step (NaN right after a refit)
    int refits = 0;
};

namespace lfo_detail {

// Per-draw conditional log likelihood over the full series for every
// retained draw of a fit on the y_{1:t_fit} prefix.
inline MatrixXd loglik_matrix(const DarmaPosterior& full_post, const BayesFit& fit) {
    const MatrixXd draws = fit.draws();
    MatrixXd ll(draws.rows(), full_post.T());
    for (int s = 0; s < draws.rows(); ++s)
        ll.row(s) = full_post.log_lik_by_time(draws.row(s).transpose()).transpose();
    return ll;
}

} // namespace lfo_detail

// Expected log predictive density for M-step-ahead forecasting, evaluated
// sequentially from conditioning length L onward. Sampler seeds derive from
// (rng, conditioning length) only, so two identical candidate models produce
// bit-identical paths through the refit schedule.
inline LfoResult lfo_elpd(const ModelSpec& spec, const CompositionalSeries& data, const Rng& rng,
                          const LfoOptions& opts) {
    const int T = data.T();
    const int M = opts.M;
    const int L = opts.L > 0 ? opts.L : T / 2;
    if (M < 1) throw config_error("forecast block width must be at least 1");
    if (L < spec.lag_depth() + 1 || L >= T)
        throw config_error("initial conditioning length " + std::to_string(L) +
                           " is out of range");

    const DarmaPosterior full_post(spec, data, true);

    auto fit_prefix = [&](int t_fit) {
        const DarmaPosterior post(spec, data.head(t_fit), true);
        return fit_bayes_darma(post, rng.child("lfo", static_cast<uint64_t>(t_fit)), opts.nuts);
    };

    LfoResult res;
    int t_fit = L;
    BayesFit fit = fit_prefix(t_fit);
    MatrixXd ll = lfo_detail::loglik_matrix(full_post, fit);
    res.refit_times.push_back(t_fit);
    res.refits = 1;

    const int n_steps = T - M - L + 1;
    res.per_step.resize(n_steps);
    res.khat.resize(n_steps);
    const int S = static_cast<int>(ll.rows());

    for (int t = L; t + M <= T; ++t) {
        const int i = t - L;
        res.step_times.push_back(t);
        VectorXd log_ratios = VectorXd::Zero(S);
        if (t > t_fit)
            log_ratios = ll.middleCols(t_fit, t - t_fit).rowwise().sum();

        double khat = std::numeric_limits<double>::quiet_NaN();
        VectorXd lw;
        bool refit_here = opts.exact && t > t_fit;
        if (!refit_here && t > t_fit) {
            const PsisResult ps = psis(log_ratios);
            khat = ps.khat;
            lw = ps.log_weights;
            if (khat > opts.k_threshold) refit_here = true;
        }
        if (refit_here) {
            t_fit = t;
            fit = fit_prefix(t_fit);
            ll = lfo_detail::loglik_matrix(full_post, fit);
            res.refit_times.push_back(t_fit);
            ++res.refits;
            khat = std::numeric_limits<double>::quiet_NaN();
        }
        if (t == t_fit) lw = VectorXd::Zero(S);

        const VectorXd block = ll.middleCols(t, M).rowwise().sum();
        const VectorXd joint = lw + block;
        res.per_step[i] =
            log_sum_exp(std::span<const double>(joint.data(), joint.size())) -
            log_sum_exp(std::span<const double>(lw.data(), lw.size()));
        res.khat[i] = khat;
    }
    res.elpd = res.per_step.sum();
    return res;
}

// Candidate ranking by LFO ELPD under common random numbers.
struct Candidate {
    std::string name;
    ModelSpec spec;
};

struct CandidateScore {
    std::string name;
    LfoResult lfo;
    double elpd_diff = 0.0;    // against the best candidate
    double elpd_diff_se = 0.0; // paired over steps
    bool failed = false;       // fit threw; excluded from ranking
    std::string error;
};

// Scores every candidate and ranks the survivors; a candidate whose fits
// throw is kept in the output, marked failed, and sorted last.
inline std::vector<CandidateScore> rank_by_lfo(const std::vector<Candidate>& candidates,
                                               const CompositionalSeries& data, const Rng& rng,
                                               const LfoOptions& opts) {
    std::vector<CandidateScore> scores;
    for (const auto& c : candidates) {
        CandidateScore s;
        s.name = c.name;
        try {
            s.lfo = lfo_elpd(c.spec, data, rng, opts);
        } catch (const std::exception& e) {
            s.failed = true;
            s.error = e.what();
        }
        scores.push_back(std::move(s));
    }
    int best = -1;
    for (size_t i = 0; i < scores.size(); ++i)
        if (!scores[i].failed && (best < 0 || scores[i].lfo.elpd > scores[best].lfo.elpd))
            best = static_cast<int>(i);
    if (best < 0) throw numeric_error("every candidate failed to fit");
    for (auto& s : scores) {
        if (s.failed) continue;
        const VectorXd d = s.lfo.per_step - scores[best].lfo.per_step;
        s.elpd_diff = d.sum();
        const int n = static_cast<int>(d.size());
        if (n > 1) {
            const double mean = d.mean();
            s.elpd_diff_se = std::sqrt((d.array() - mean).square().sum() / (n - 1) * n);
        }
    }
    std::sort(scores.begin(), scores.end(),
              [](const CandidateScore& a, const CandidateScore& b) {
                  if (a.failed != b.failed) return !a.failed;
                  return a.lfo.elpd > b.lfo.elpd;
              });
    return scores;
}

} // namespace bdarma

#endif
