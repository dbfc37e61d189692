#ifndef BDARMA_STUDY_HPP
#define BDARMA_STUDY_HPP

#include <Eigen/Dense>
#include <cmath>
#include <string>
#include <vector>

#include "bdarma/estimators.hpp"
#include "bdarma/forecast.hpp"
#include "bdarma/metrics.hpp"
#include "bdarma/model.hpp"
#include "bdarma/posterior.hpp"
#include "bdarma/threading.hpp"
#include "bdarma/tvarma.hpp"

namespace bdarma {

// ---------------------------------------------------------------------------
// Three-component ARMA(1,1) recovery studies: one generating process with
// Dirichlet observation noise, one with Gaussian noise on the log-ratio
// scale, both sharing the same recursion coefficients. The uncentered
// recursion is used throughout so the intercepts are directly comparable
// across the Dirichlet and Gaussian fits.
// ---------------------------------------------------------------------------

inline ModelSpec study_model_spec() {
    ModelSpec spec;
    spec.J = 3;
    spec.P = 1;
    spec.Q = 1;
    spec.link = Link::Alr;
    spec.centered = false;
    spec.mean_design = DesignSpec::intercept_only();
    spec.scale_design = DesignSpec::intercept_only();
    spec.prior.a = {0.0, 0.5};
    spec.prior.b = {0.0, 0.5};
    spec.prior.beta.set_all({0.0, 0.5});
    spec.prior.gamma_intercept_gamma = true;
    return spec;
}

inline Params study_truth() {
    Params par;
    MatrixXd A(2, 2), B(2, 2);
    A << 0.95, -0.18, 0.3, 0.95;
    B << 0.65, 0.15, 0.2, 0.65;
    par.A = {A};
    par.B = {B};
    par.beta = MatrixXd(2, 1);
    par.beta << -0.07, 0.10;
    par.gamma = VectorXd::Constant(1, std::log(1000.0));
    return par;
}

// Innovation covariance factor for the Gaussian generating process.
inline MatrixXd study_tvarma_chol(double sigma = 0.05, double rho = 0.30) {
    MatrixXd Sigma(2, 2);
    Sigma << sigma * sigma, rho * sigma * sigma, rho * sigma * sigma, sigma * sigma;
    return MatrixXd(Sigma.llt().matrixL());
}

inline std::vector<std::string> study_coefficients() {
    return {"a1_1_1", "a1_1_2", "a1_2_1", "a1_2_2", "b1_1_1",
            "b1_1_2", "b1_2_1", "b1_2_2", "beta_1_1", "beta_2_1"};
}

inline double coefficient_truth(const std::string& name, const Params& par) {
    if (name.rfind("a1_", 0) == 0)
        return par.A[0](name[3] - '1', name[5] - '1');
    if (name.rfind("b1_", 0) == 0)
        return par.B[0](name[3] - '1', name[5] - '1');
    if (name.rfind("beta_", 0) == 0)
        return par.beta(name[5] - '1', name[7] - '1');
    throw config_error("unknown study coefficient " + name);
}

enum class StudyDgm { Dirichlet, Gaussian };

struct SimulationStudyOptions {
    StudyDgm dgm = StudyDgm::Dirichlet;
    int replicates = 50;
    int train = 500;
    int horizon = 40;
    int burn = 100;
    double sigma = 0.05; // Gaussian generating process only
    double rho = 0.30;
    NutsOptions nuts{.chains = 4, .warmup = 500, .samples = 500};
    MleOptions mle;
    int forecast_paths = 2000;
    int threads = 1;
};

struct CoefficientRecovery {
    std::string name;
    double truth = 0.0;
    double bias = 0.0;
    double rmse = 0.0;
    double interval_length = 0.0;
    double coverage = 0.0;
};

struct ModelStudyMetrics {
    std::string model;
    std::vector<CoefficientRecovery> coefficients;
    VectorXd frmse; // per component
    VectorXd fmae;
    double total_frmse = 0.0;
    double total_fmae = 0.0;
    int failures = 0;
    int fit_retries = 0; // extra optimizer starts / zero for posterior fits

    const CoefficientRecovery& coefficient(const std::string& name) const {
        for (const auto& c : coefficients)
            if (c.name == name) return c;
        throw config_error("no coefficient named " + name);
    }
};

struct SimulationStudyResult {
    SimulationStudyOptions options;
    ModelStudyMetrics bayes;     // posterior fit of the Dirichlet model
    ModelStudyMetrics darma_ml;  // maximum likelihood Dirichlet fit
    ModelStudyMetrics tvarma_ml; // maximum likelihood Gaussian fit
    int dgm_retries = 0;

    std::vector<const ModelStudyMetrics*> models() const {
        return {&bayes, &darma_ml, &tvarma_ml};
    }
};

namespace study_detail {

struct CoefEstimate {
    double estimate = 0.0;
    double lo = 0.0;
    double hi = 0.0;
};

struct ModelOutcome {
    bool ok = false;
    std::vector<CoefEstimate> coefs; // aligned with the coefficient list
    MatrixXd fc;                     // H x J forecast means
    int fit_retries = 0;
};

struct RepOutcome {
    bool simulated = false;
    int dgm_retries = 0;
    ModelOutcome bayes, darma_ml, tvarma_ml;
    MatrixXd realized; // H x J
};

inline std::vector<CoefEstimate> bayes_estimates(const BayesFit& fit,
                                                 const std::vector<std::string>& coefs) {
    std::vector<CoefEstimate> out;
    for (const auto& name : coefs) {
        const ParamSummary& p = fit.param(name);
        out.push_back({p.mean, p.q2_5, p.q97_5});
    }
    return out;
}

// Wald intervals from the inverse observed information.
inline std::vector<CoefEstimate> mle_estimates(const MleFit& fit,
                                               const std::vector<std::string>& coefs) {
    std::vector<CoefEstimate> out;
    for (const auto& name : coefs) {
        int idx = -1;
        for (size_t i = 0; i < fit.names.size(); ++i)
            if (fit.names[i] == name) idx = static_cast<int>(i);
        if (idx < 0) throw config_error("fit has no coefficient " + name);
        const double est = fit.theta[idx];
        double se = 0.0;
        if (fit.covariance.size() > 0 && fit.covariance(idx, idx) > 0.0)
            se = std::sqrt(fit.covariance(idx, idx));
        out.push_back({est, est - 1.959963984540054 * se, est + 1.959963984540054 * se});
    }
    return out;
}

inline ModelStudyMetrics reduce_model(const std::string& model,
                                      const std::vector<RepOutcome>& reps,
                                      const ModelOutcome RepOutcome::*field,
                                      const std::vector<std::string>& coefs, const Params& truth,
                                      int J) {
    ModelStudyMetrics out;
    out.model = model;
    std::vector<RecoveryAccumulator> acc(coefs.size());
    ForecastErrorAccumulator ferr(J);
    for (const auto& rep : reps) {
        const ModelOutcome& mo = rep.*field;
        if (!rep.simulated || !mo.ok) {
            ++out.failures;
            continue;
        }
        out.fit_retries += mo.fit_retries;
        for (size_t i = 0; i < coefs.size(); ++i)
            acc[i].add(mo.coefs[i].estimate, mo.coefs[i].lo, mo.coefs[i].hi,
                       coefficient_truth(coefs[i], truth));
        ferr.add(mo.fc, rep.realized);
    }
    for (size_t i = 0; i < coefs.size(); ++i) {
        CoefficientRecovery r;
        r.name = coefs[i];
        r.truth = coefficient_truth(coefs[i], truth);
        r.bias = acc[i].bias();
        r.rmse = acc[i].rmse();
        r.interval_length = acc[i].interval_length();
        r.coverage = acc[i].coverage();
        out.coefficients.push_back(r);
    }
    out.frmse = ferr.frmse();
    out.fmae = ferr.fmae();
    out.total_frmse = ferr.total_frmse();
    out.total_fmae = ferr.total_fmae();
    return out;
}

} // namespace study_detail

inline SimulationStudyResult run_simulation_study(const Rng& master,
                                                  const SimulationStudyOptions& opts) {
    const ModelSpec spec = study_model_spec();
    const Params truth = study_truth();
    const MatrixXd chol = study_tvarma_chol(opts.sigma, opts.rho);
    const auto coefs = study_coefficients();
    const int H = opts.horizon;
    const int T = opts.train;

    std::vector<study_detail::RepOutcome> reps(opts.replicates);
    parallel_for_indexed(opts.replicates, opts.threads, [&](int r) {
        const Rng rep_rng = master.child("rep", static_cast<uint64_t>(r));
        study_detail::RepOutcome& out = reps[r];
        CompositionalSeries train;
        try {
            Rng sim_rng = rep_rng.child("sim");
            const SimulatedSeries sim =
                opts.dgm == StudyDgm::Dirichlet
                    ? simulate_darma(spec, truth, T + H, sim_rng, opts.burn, &out.dgm_retries)
                    : simulate_tvarma(spec, truth, chol, T + H, sim_rng, opts.burn,
                                      &out.dgm_retries);
            train = sim.series.head(T);
            out.realized = sim.series.values().bottomRows(H);
            out.simulated = true;
        } catch (const std::exception&) {
            return;
        }

        try {
            NutsOptions nuts = opts.nuts;
            nuts.threads = 1;
            const DarmaPosterior post(spec, train, true);
            const BayesFit fit = fit_bayes_darma(post, rep_rng.child("bayes"), nuts);
            out.bayes.coefs = study_detail::bayes_estimates(fit, coefs);
            out.bayes.fc = forecast_bayes_darma(spec, train, post.layout(), fit.draws(), H,
                                                rep_rng.child("fc_bayes"))
                               .mean;
            out.bayes.ok = true;
        } catch (const std::exception&) {
        }

        try {
            const MleFit ml = fit_mle_darma(spec, train, rep_rng.child("ml"), opts.mle);
            out.darma_ml.coefs = study_detail::mle_estimates(ml, coefs);
            out.darma_ml.fit_retries = ml.attempts - 1;
            out.darma_ml.fc = forecast_mle_darma(spec, train, ml.theta, H, opts.forecast_paths,
                                                 rep_rng.child("fc_ml"))
                                  .mean;
            out.darma_ml.ok = true;
        } catch (const std::exception&) {
        }

        try {
            const MleFit tv = fit_mle_tvarma(spec, train, rep_rng.child("tv"), opts.mle);
            out.tvarma_ml.coefs = study_detail::mle_estimates(tv, coefs);
            out.tvarma_ml.fit_retries = tv.attempts - 1;
            out.tvarma_ml.fc = forecast_mle_tvarma(spec, train, tv.theta, H, opts.forecast_paths,
                                                   rep_rng.child("fc_tv"))
                                   .mean;
            out.tvarma_ml.ok = true;
        } catch (const std::exception&) {
        }
    });

    SimulationStudyResult res;
    res.options = opts;
    for (const auto& rep : reps) res.dgm_retries += rep.dgm_retries;
    res.bayes = study_detail::reduce_model("bayes", reps, &study_detail::RepOutcome::bayes, coefs,
                                           truth, spec.J);
    res.darma_ml = study_detail::reduce_model("mle_darma", reps,
                                              &study_detail::RepOutcome::darma_ml, coefs, truth,
                                              spec.J);
    res.tvarma_ml = study_detail::reduce_model("mle_tvarma", reps,
                                               &study_detail::RepOutcome::tvarma_ml, coefs, truth,
                                               spec.J);
    return res;
}

// ---------------------------------------------------------------------------
// Twelve-component forecasting benchmark: a dense seasonal AR(1) generating
// process with Dirichlet noise, fitted under four prior/mask variants of the
// posterior model plus two maximum likelihood baselines.
// ---------------------------------------------------------------------------

inline constexpr int kBenchmarkJ = 12;

// Dense transition truth: dominant diagonal, positive first band, small
// alternating-sign entries everywhere else.
inline MatrixXd benchmark_transition(int K) {
    MatrixXd A(K, K);
    for (int r = 0; r < K; ++r)
        for (int c = 0; c < K; ++c) {
            if (r == c)
                A(r, c) = 0.46;
            else if (std::abs(r - c) == 1)
                A(r, c) = 0.13;
            else
                A(r, c) = ((r + c) % 2 == 0 ? 0.055 : -0.055);
        }
    return A;
}

inline ModelSpec benchmark_base_spec() {
    ModelSpec spec;
    spec.J = kBenchmarkJ;
    spec.P = 1;
    spec.Q = 0;
    spec.link = Link::Alr;
    spec.centered = true;
    spec.mean_design = DesignSpec::parse("intercept,fourier:7:2,trend");
    spec.scale_design = DesignSpec::parse("intercept,fourier:7:1");
    return spec;
}

inline Params benchmark_truth() {
    const ModelSpec spec = benchmark_base_spec();
    const int K = spec.K();
    Params par;
    par.A = {benchmark_transition(K)};
    par.beta = MatrixXd::Zero(K, spec.mean_design.columns());
    for (int r = 0; r < K; ++r) {
        par.beta(r, 0) = 0.25 * ((r % 3) - 1); // intercepts in {-.25, 0, .25}
        par.beta(r, 1) = 0.18 * ((r % 2 == 0) ? 1.0 : -1.0);
        par.beta(r, 2) = 0.10;
        par.beta(r, 3) = -0.08;
        par.beta(r, 4) = 0.12 * ((r % 2 == 0) ? -1.0 : 1.0);
        par.beta(r, 5) = 0.05 * ((r % 4 < 2) ? 1.0 : -1.0); // mild per-component trend
    }
    par.gamma = VectorXd::Zero(spec.scale_design.columns());
    par.gamma << std::log(300.0), 0.35, -0.2;
    return par;
}

enum class BenchmarkVariant {
    NormalFull,
    HorseshoeFull,
    NearestNeighbor,
    Diagonal,
    DarMle,
    Tvar,
};

inline std::string benchmark_variant_name(BenchmarkVariant v) {
    switch (v) {
        case BenchmarkVariant::NormalFull: return "normal_full";
        case BenchmarkVariant::HorseshoeFull: return "horseshoe_full";
        case BenchmarkVariant::NearestNeighbor: return "nearest_neighbor";
        case BenchmarkVariant::Diagonal: return "diagonal";
        case BenchmarkVariant::DarMle: return "dar_mle";
        case BenchmarkVariant::Tvar: return "tvar";
    }
    return "unknown";
}

inline ModelSpec benchmark_variant_spec(BenchmarkVariant v) {
    ModelSpec spec = benchmark_base_spec();
    spec.prior.banded_a = true;
    spec.prior.a.sd = 0.5;
    spec.prior.beta.set_all({0.0, 1.0});
    spec.prior.gamma.set_all({0.0, 1.0});
    spec.prior.gamma_intercept_gamma = false;
    spec.prior.gamma.intercept = {0.0, 2.0};
    switch (v) {
        case BenchmarkVariant::NormalFull:
        case BenchmarkVariant::DarMle:
        case BenchmarkVariant::Tvar:
            break;
        case BenchmarkVariant::HorseshoeFull:
            spec.prior.banded_a = false;
            spec.prior.a = {0.0, 0.5};
            spec.prior.horseshoe = true;
            break;
        case BenchmarkVariant::NearestNeighbor:
            spec.mask = "nearest_neighbor";
            break;
        case BenchmarkVariant::Diagonal:
            spec.mask = "diagonal";
            break;
    }
    return spec;
}

struct BenchmarkOptions {
    int replicates = 5;
    int train = 400;
    int horizon = 56;
    int burn = 100;
    NutsOptions nuts{.chains = 2, .warmup = 300, .samples = 300};
    MleOptions mle;
    int forecast_paths = 500;
    int threads = 1;
};

struct BenchmarkResult {
    BenchmarkOptions options;
    std::vector<std::string> models;
    MatrixXd total_frmse;            // replicates x models, NaN where a fit failed
    MatrixXd total_fmae;             // same shape
    MatrixXd pooled_frmse;           // models x J
    std::vector<int> free_a_entries; // per model

    int column(const std::string& model) const {
        for (size_t i = 0; i < models.size(); ++i)
            if (models[i] == model) return static_cast<int>(i);
        throw config_error("no benchmark model named " + model);
    }
};

inline BenchmarkResult run_benchmark(const Rng& master, const BenchmarkOptions& opts) {
    const std::vector<BenchmarkVariant> variants = {
        BenchmarkVariant::NormalFull,      BenchmarkVariant::HorseshoeFull,
        BenchmarkVariant::NearestNeighbor, BenchmarkVariant::Diagonal,
        BenchmarkVariant::DarMle,          BenchmarkVariant::Tvar};
    const ModelSpec truth_spec = benchmark_base_spec();
    const Params truth = benchmark_truth();
    const int H = opts.horizon;
    const int T = opts.train;
    const int J = truth_spec.J;
    const int V = static_cast<int>(variants.size());

    // Simulated data is shared across the fitted variants of a replicate.
    std::vector<CompositionalSeries> trains(opts.replicates);
    std::vector<MatrixXd> realized(opts.replicates);
    for (int r = 0; r < opts.replicates; ++r) {
        Rng sim_rng = master.child("rep", static_cast<uint64_t>(r)).child("sim");
        const SimulatedSeries sim = simulate_darma(truth_spec, truth, T + H, sim_rng, opts.burn);
        trains[r] = sim.series.head(T);
        realized[r] = sim.series.values().bottomRows(H);
    }

    struct Cell {
        MatrixXd fc;
        bool ok = false;
    };
    std::vector<std::vector<Cell>> cells(opts.replicates, std::vector<Cell>(V));

    parallel_for_indexed(opts.replicates * V, opts.threads, [&](int idx) {
        const int r = idx / V;
        const int v = idx % V;
        const BenchmarkVariant variant = variants[v];
        const ModelSpec spec = benchmark_variant_spec(variant);
        const std::string name = benchmark_variant_name(variant);
        const Rng rep_rng = master.child("rep", static_cast<uint64_t>(r));
        Cell& cell = cells[r][v];
        try {
            if (variant == BenchmarkVariant::Tvar) {
                const MleFit fit = fit_mle_tvarma(spec, trains[r], rep_rng.child("fit", name),
                                                  opts.mle);
                cell.fc = forecast_mle_tvarma(spec, trains[r], fit.theta, H, opts.forecast_paths,
                                              rep_rng.child("fc", name))
                              .mean;
            } else if (variant == BenchmarkVariant::DarMle) {
                const MleFit fit = fit_mle_darma(spec, trains[r], rep_rng.child("fit", name),
                                                 opts.mle);
                cell.fc = forecast_mle_darma(spec, trains[r], fit.theta, H, opts.forecast_paths,
                                             rep_rng.child("fc", name))
                              .mean;
            } else {
                NutsOptions nuts = opts.nuts;
                nuts.threads = 1;
                const DarmaPosterior post(spec, trains[r], true);
                const BayesFit fit = fit_bayes_darma(post, rep_rng.child("fit", name), nuts);
                cell.fc = forecast_bayes_darma(spec, trains[r], post.layout(), fit.draws(), H,
                                               rep_rng.child("fc", name))
                              .mean;
            }
            cell.ok = true;
        } catch (const std::exception&) {
            cell.ok = false;
        }
    });

    BenchmarkResult res;
    res.options = opts;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    res.total_frmse = MatrixXd::Constant(opts.replicates, V, nan);
    res.total_fmae = MatrixXd::Constant(opts.replicates, V, nan);
    res.pooled_frmse = MatrixXd::Zero(V, J);
    for (int v = 0; v < V; ++v) {
        res.models.push_back(benchmark_variant_name(variants[v]));
        const ModelSpec spec = benchmark_variant_spec(variants[v]);
        res.free_a_entries.push_back(Mask::named(spec.mask, spec.K()).free_count());
        ForecastErrorAccumulator pooled(J);
        for (int r = 0; r < opts.replicates; ++r) {
            if (!cells[r][v].ok) continue;
            ForecastErrorAccumulator one(J);
            one.add(cells[r][v].fc, realized[r]);
            res.total_frmse(r, v) = one.total_frmse();
            res.total_fmae(r, v) = one.total_fmae();
            pooled.add(cells[r][v].fc, realized[r]);
        }
        res.pooled_frmse.row(v) = pooled.frmse().transpose();
    }
    return res;
}

} // namespace bdarma

#endif
