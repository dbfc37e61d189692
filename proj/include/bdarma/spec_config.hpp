#ifndef BDARMA_SPEC_CONFIG_HPP
#define BDARMA_SPEC_CONFIG_HPP

#include <sstream>
#include <string>
#include <vector>

#include "bdarma/config.hpp"
#include "bdarma/estimators.hpp"
#include "bdarma/lfo.hpp"
#include "bdarma/model.hpp"
#include "bdarma/study.hpp"

namespace bdarma {

namespace cfg_detail {

// Candidate sections override base keys: `<prefix><key>` wins over `<key>`.
struct Scoped {
    const Config& cfg;
    std::string prefix;

    bool has(const std::string& key) const {
        return cfg.has(prefix + key) || cfg.has(key);
    }
    std::string str(const std::string& key, const std::string& fallback) const {
        if (cfg.has(prefix + key)) return cfg.get_string(prefix + key);
        return cfg.get_string(key, fallback);
    }
    int num(const std::string& key, int fallback) const {
        if (cfg.has(prefix + key)) return cfg.get_int(prefix + key);
        return cfg.get_int(key, fallback);
    }
    double real(const std::string& key, double fallback) const {
        if (cfg.has(prefix + key)) return cfg.get_double(prefix + key);
        return cfg.get_double(key, fallback);
    }
    bool flag(const std::string& key, bool fallback) const {
        if (cfg.has(prefix + key)) return cfg.get_bool(prefix + key);
        return cfg.get_bool(key, fallback);
    }
};

inline std::vector<double> parse_doubles(const std::string& text, const std::string& key) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string tok;
    while (ss >> tok) {
        try {
            out.push_back(std::stod(tok));
        } catch (const std::exception&) {
            throw config_error("config key " + key + " has a non-numeric entry: " + tok);
        }
    }
    return out;
}

} // namespace cfg_detail

inline Link link_from_name(const std::string& name) {
    if (name == "alr") return Link::Alr;
    if (name == "clr") return Link::Clr;
    if (name == "ilr") return Link::Ilr;
    throw config_error("unknown link: " + name + " (expected alr, clr or ilr)");
}

inline std::string link_name(Link link) {
    switch (link) {
        case Link::Alr: return "alr";
        case Link::Clr: return "clr";
        case Link::Ilr: return "ilr";
    }
    return "alr";
}

// Model block of the run configuration; `prefix` selects a candidate section
// (e.g. "candidate.small.") whose keys override the base ones.
inline ModelSpec model_spec_from_config(const Config& cfg, const std::string& prefix = "") {
    cfg_detail::Scoped s{cfg, prefix};
    ModelSpec spec;
    spec.J = s.num("model.components", 3);
    spec.P = s.num("model.p", 1);
    spec.Q = s.num("model.q", 0);
    spec.link = link_from_name(s.str("model.link", "alr"));
    spec.reference = s.num("model.reference", 0);
    spec.centered = s.flag("model.centered", true);
    spec.mask = s.str("model.mask", "full");
    spec.mean_design = DesignSpec::parse(s.str("design.mean", "intercept"));
    spec.scale_design = DesignSpec::parse(s.str("design.scale", "intercept"));

    PriorConfig& pr = spec.prior;
    pr.a.mean = s.real("prior.a.mean", 0.0);
    pr.a.sd = s.real("prior.a.sd", 0.5);
    pr.banded_a = s.flag("prior.a.banded", false);
    pr.banded_a_diag = s.real("prior.a.banded_diag", 0.4);
    pr.banded_a_offdiag = s.real("prior.a.banded_offdiag", 0.1);
    pr.b.mean = s.real("prior.b.mean", 0.0);
    pr.b.sd = s.real("prior.b.sd", 0.5);
    auto term = [&](const char* block, const char* kind, NormalPrior fallback) {
        NormalPrior p;
        const std::string base = std::string("prior.") + block + "." + kind;
        p.mean = s.real(base + ".mean", fallback.mean);
        p.sd = s.real(base + ".sd", fallback.sd);
        return p;
    };
    const NormalPrior beta_all{s.real("prior.beta.mean", 0.0), s.real("prior.beta.sd", 0.5)};
    pr.beta.intercept = term("beta", "intercept", beta_all);
    pr.beta.fourier = term("beta", "fourier", beta_all);
    pr.beta.trend = term("beta", "trend", beta_all);
    const NormalPrior gamma_all{s.real("prior.gamma.mean", 0.0), s.real("prior.gamma.sd", 2.0)};
    pr.gamma.intercept = term("gamma", "intercept", gamma_all);
    pr.gamma.fourier = term("gamma", "fourier", gamma_all);
    pr.gamma.trend = term("gamma", "trend", gamma_all);
    pr.gamma_intercept_gamma = s.flag("prior.gamma.intercept.positive", false);
    pr.gamma_intercept_shape = s.real("prior.gamma.intercept.shape", 25.0 / 7.0);
    pr.gamma_intercept_rate = s.real("prior.gamma.intercept.rate", 5.0 / 7.0);
    pr.horseshoe = s.flag("prior.horseshoe", false);
    pr.horseshoe_tau = s.real("prior.horseshoe.tau", 1.0);

    spec.validate();
    return spec;
}

inline NutsOptions nuts_from_config(const Config& cfg, int threads) {
    NutsOptions o;
    o.chains = cfg.get_int("sampler.chains", 4);
    o.warmup = cfg.get_int("sampler.warmup", 1000);
    o.samples = cfg.get_int("sampler.samples", 1000);
    o.target_accept = cfg.get_double("sampler.target_accept", 0.8);
    o.max_tree_depth = cfg.get_int("sampler.max_tree_depth", 10);
    o.init_range = cfg.get_double("sampler.init_range", 1.0);
    o.threads = threads;
    return o;
}

inline MleOptions mle_from_config(const Config& cfg) {
    MleOptions o;
    o.retries = cfg.get_int("mle.retries", 8);
    o.init_range = cfg.get_double("mle.init_range", 1.0);
    o.optim.grad_tol = cfg.get_double("mle.grad_tol", 1e-6);
    o.optim.max_iterations = cfg.get_int("mle.max_iterations", 2000);
    return o;
}

inline LfoOptions lfo_from_config(const Config& cfg, int threads) {
    LfoOptions o;
    o.L = cfg.get_int("lfo.initial", 0);
    o.M = cfg.get_int("lfo.block", 1);
    o.k_threshold = cfg.get_double("lfo.k_threshold", 0.7);
    o.exact = cfg.get_string("lfo.mode", "psis") == "exact";
    if (cfg.get_string("lfo.mode", "psis") != "psis" && !o.exact)
        throw config_error("lfo.mode must be psis or exact");
    o.nuts = nuts_from_config(cfg, threads);
    return o;
}

// Generating values for `simulate`: row-major matrices under true.a<p>,
// true.b<q>, true.beta, plus true.gamma.
inline Params params_from_config(const Config& cfg, const ModelSpec& spec,
                                 bool require_scale = true) {
    const int K = spec.K();
    Params par;
    auto matrix_of = [&](const std::string& key, int rows, int cols) {
        const auto vals = cfg_detail::parse_doubles(cfg.get_string(key), key);
        if (static_cast<int>(vals.size()) != rows * cols)
            throw config_error("config key " + key + " needs " + std::to_string(rows * cols) +
                               " entries, found " + std::to_string(vals.size()));
        MatrixXd m(rows, cols);
        for (int r = 0; r < rows; ++r)
            for (int c = 0; c < cols; ++c) m(r, c) = vals[r * cols + c];
        return m;
    };
    for (int p = 1; p <= spec.P; ++p)
        par.A.push_back(matrix_of("true.a" + std::to_string(p), K, K));
    for (int q = 1; q <= spec.Q; ++q)
        par.B.push_back(matrix_of("true.b" + std::to_string(q), K, K));
    const int r_mean = spec.mean_design.columns();
    par.beta = r_mean > 0 ? matrix_of("true.beta", K, r_mean) : MatrixXd::Zero(K, 0);
    const int r_scale = spec.scale_design.columns();
    if (r_scale > 0) {
        if (!require_scale && !cfg.has("true.gamma")) {
            par.gamma = VectorXd::Zero(r_scale);
            return par;
        }
        const auto vals = cfg_detail::parse_doubles(cfg.get_string("true.gamma"), "true.gamma");
        if (static_cast<int>(vals.size()) != r_scale)
            throw config_error("config key true.gamma needs " + std::to_string(r_scale) +
                               " entries");
        par.gamma = Eigen::Map<const VectorXd>(vals.data(), r_scale);
    }
    return par;
}

// Gaussian innovation factor from true.sigma (one value or K values) and an
// optional common correlation true.rho.
inline MatrixXd innovation_chol_from_config(const Config& cfg, int K) {
    std::vector<double> sigma =
        cfg_detail::parse_doubles(cfg.get_string("true.sigma", "0.05"), "true.sigma");
    if (sigma.size() == 1) sigma.assign(K, sigma[0]);
    if (static_cast<int>(sigma.size()) != K)
        throw config_error("true.sigma needs one value or " + std::to_string(K));
    const double rho = cfg.get_double("true.rho", 0.0);
    MatrixXd Sigma(K, K);
    for (int r = 0; r < K; ++r)
        for (int c = 0; c < K; ++c) Sigma(r, c) = (r == c ? 1.0 : rho) * sigma[r] * sigma[c];
    Eigen::LLT<MatrixXd> llt(Sigma);
    if (llt.info() != Eigen::Success)
        throw config_error("innovation covariance from true.sigma/true.rho is not positive "
                           "definite");
    return MatrixXd(llt.matrixL());
}

inline SimulationStudyOptions study_options_from_config(const Config& cfg, int threads) {
    SimulationStudyOptions o;
    const std::string which = cfg.get_string("study", "study1");
    if (which == "study1")
        o.dgm = StudyDgm::Dirichlet;
    else if (which == "study2")
        o.dgm = StudyDgm::Gaussian;
    else
        throw config_error("study must be study1, study2, or benchmark");
    o.replicates = cfg.get_int("study.replicates", o.replicates);
    o.train = cfg.get_int("study.train", o.train);
    o.horizon = cfg.get_int("study.horizon", o.horizon);
    o.burn = cfg.get_int("study.burn", o.burn);
    o.sigma = cfg.get_double("study.sigma", o.sigma);
    o.rho = cfg.get_double("study.rho", o.rho);
    o.forecast_paths = cfg.get_int("study.forecast_paths", o.forecast_paths);
    NutsOptions nuts_defaults = o.nuts;
    o.nuts = nuts_from_config(cfg, 1);
    if (!cfg.has("sampler.chains")) o.nuts.chains = nuts_defaults.chains;
    if (!cfg.has("sampler.warmup")) o.nuts.warmup = nuts_defaults.warmup;
    if (!cfg.has("sampler.samples")) o.nuts.samples = nuts_defaults.samples;
    o.mle = mle_from_config(cfg);
    o.threads = threads;
    return o;
}

inline BenchmarkOptions benchmark_options_from_config(const Config& cfg, int threads) {
    BenchmarkOptions o;
    o.replicates = cfg.get_int("study.replicates", o.replicates);
    o.train = cfg.get_int("study.train", o.train);
    o.horizon = cfg.get_int("study.horizon", o.horizon);
    o.burn = cfg.get_int("study.burn", o.burn);
    o.forecast_paths = cfg.get_int("study.forecast_paths", o.forecast_paths);
    NutsOptions nuts_defaults = o.nuts;
    o.nuts = nuts_from_config(cfg, 1);
    if (!cfg.has("sampler.chains")) o.nuts.chains = nuts_defaults.chains;
    if (!cfg.has("sampler.warmup")) o.nuts.warmup = nuts_defaults.warmup;
    if (!cfg.has("sampler.samples")) o.nuts.samples = nuts_defaults.samples;
    o.mle = mle_from_config(cfg);
    o.threads = threads;
    return o;
}

} // namespace bdarma

#endif
