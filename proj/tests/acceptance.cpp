// Acceptance gate: one numbered criterion per check, each printing a single
// [PASS]/[FAIL] line. Run with no arguments for the full gate or with a list
// of criterion ids (e.g. `bdarma_acceptance 5 6 7`) for a subset. The exit
// code is the number of failed criteria.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <bdarma/bdarma.hpp>

using namespace bdarma;

namespace {

constexpr std::uint64_t kSeed = 1;

struct CriterionResult {
    int id = 0;
    bool pass = false;
    std::string detail;
};

double now_s() {
    using clock = std::chrono::steady_clock;
    return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}

void progress(const std::string& msg) {
    std::fprintf(stderr, "[acceptance] %s\n", msg.c_str());
}

// ---------------------------------------------------------------- study runs

struct TimedStudy {
    SimulationStudyResult result;
    double seconds = 0.0;
};

const TimedStudy& study1() {
    static const TimedStudy run = [] {
        SimulationStudyOptions opts;
        opts.dgm = StudyDgm::Dirichlet;
        progress("study 1: " + std::to_string(opts.replicates) + " replicates, " +
                 std::to_string(opts.nuts.chains) + " chains x " +
                 std::to_string(opts.nuts.warmup + opts.nuts.samples) + " iterations");
        TimedStudy t;
        const double t0 = now_s();
        t.result = run_simulation_study(Rng(kSeed).child("study1"), opts);
        t.seconds = now_s() - t0;
        progress("study 1 done in " + num(t.seconds) + "s");
        return t;
    }();
    return run;
}

const SimulationStudyResult& study2() {
    static const SimulationStudyResult res = [] {
        SimulationStudyOptions opts;
        opts.dgm = StudyDgm::Gaussian;
        progress("study 2: " + std::to_string(opts.replicates) + " replicates");
        const double t0 = now_s();
        auto r = run_simulation_study(Rng(kSeed).child("study2"), opts);
        progress("study 2 done in " + num(now_s() - t0) + "s");
        return r;
    }();
    return res;
}

// --------------------------------------------------------------- criterion 1

CriterionResult criterion1() {
    CriterionResult r{1, true, ""};
    const SimulationStudyResult& res = study1().result;

    double max_bias = 0.0, cov_lo = 1.0, cov_hi = 0.0;
    for (const auto& name : study_coefficients()) {
        const CoefficientRecovery& c = res.bayes.coefficient(name);
        max_bias = std::max(max_bias, std::abs(c.bias));
        cov_lo = std::min(cov_lo, c.coverage);
        cov_hi = std::max(cov_hi, c.coverage);
        if (std::abs(c.bias) > 0.02) r.pass = false;
        if (c.coverage < 0.88 || c.coverage > 0.99) r.pass = false;
    }

    double min_gap = 1e9;
    for (const std::string b : {"b1_1_1", "b1_1_2", "b1_2_1", "b1_2_2"}) {
        const double gap = res.tvarma_ml.coefficient(b).rmse - res.bayes.coefficient(b).rmse;
        min_gap = std::min(min_gap, gap);
        if (!(res.bayes.coefficient(b).rmse < res.tvarma_ml.coefficient(b).rmse)) r.pass = false;
    }

    const double secs = study1().seconds;
    if (secs > 7200.0) r.pass = false;
    if (res.bayes.failures > 0) r.pass = false;

    r.detail = "max|bias|=" + num(max_bias) + ", coverage in [" + num(cov_lo) + "," +
               num(cov_hi) + "], min b-rmse margin over tvarma=" + num(min_gap) +
               ", failures=" + std::to_string(res.bayes.failures) + ", " + num(secs) + "s";
    return r;
}

// --------------------------------------------------------------- criterion 2

CriterionResult criterion2() {
    CriterionResult r{2, true, ""};
    const SimulationStudyResult& res = study1().result;

    const double table[3][3] = {{0.1054, 0.1342, 0.1015},
                                {0.1091, 0.1367, 0.1082},
                                {0.1063, 0.1356, 0.1470}};
    const ModelStudyMetrics* models[3] = {&res.bayes, &res.darma_ml, &res.tvarma_ml};

    double worst_dev = 0.0;
    for (int m = 0; m < 3; ++m)
        for (int j = 0; j < 3; ++j) {
            const double dev = std::abs(models[m]->frmse[j] / table[m][j] - 1.0);
            worst_dev = std::max(worst_dev, dev);
            if (dev > 0.25) r.pass = false;
        }

    const double b3 = res.bayes.frmse[2], t3 = res.tvarma_ml.frmse[2];
    const double rel = 1.0 - b3 / t3;
    if (!(rel >= 0.20)) r.pass = false;

    r.detail = "y3 frmse bayes=" + num(b3) + " vs tvarma=" + num(t3) + " (" + num(100 * rel) +
               "% better), max table deviation=" + num(100 * worst_dev) + "%";
    return r;
}

// --------------------------------------------------------------- criterion 3

CriterionResult criterion3() {
    CriterionResult r{3, true, ""};
    const SimulationStudyResult& res = study2();

    int tvarma_wins = 0;
    double gap_sum = 0.0;
    for (const auto& name : study_coefficients()) {
        const double b = res.bayes.coefficient(name).rmse;
        const double t = res.tvarma_ml.coefficient(name).rmse;
        if (t <= b) ++tvarma_wins;
        gap_sum += (b - t) / t;
    }
    const double avg_gap = gap_sum / 10.0;
    if (tvarma_wins < 7) r.pass = false;
    if (!(avg_gap <= 0.10)) r.pass = false;

    const double b3 = res.bayes.frmse[2], t3 = res.tvarma_ml.frmse[2];
    if (!(b3 < t3)) r.pass = false;
    if (res.bayes.failures > 0 || res.tvarma_ml.failures > 0) r.pass = false;

    r.detail = "tvarma rmse wins " + std::to_string(tvarma_wins) + "/10, avg relative gap=" +
               num(100 * avg_gap) + "%, y3 frmse bayes=" + num(b3) + " vs tvarma=" + num(t3);
    return r;
}

// --------------------------------------------------------------- criterion 4

CriterionResult criterion4() {
    CriterionResult r{4, true, ""};
    progress("benchmark: 5 replicates x 6 models at J=12");
    const double t0 = now_s();
    const BenchmarkResult res = run_benchmark(Rng(kSeed).child("benchmark"), BenchmarkOptions{});
    progress("benchmark done in " + num(now_s() - t0) + "s");

    const int nf = res.column("normal_full");
    const int hf = res.column("horseshoe_full");
    const int nn = res.column("nearest_neighbor");
    const int dg = res.column("diagonal");
    const int tv = res.column("tvar");

    int ordered = 0;
    const int R = static_cast<int>(res.total_frmse.rows());
    for (int rep = 0; rep < R; ++rep) {
        const double a = res.total_frmse(rep, nf), b = res.total_frmse(rep, hf);
        const double c = res.total_frmse(rep, nn), d = res.total_frmse(rep, dg);
        if (std::isfinite(a) && std::isfinite(b) && std::isfinite(c) && std::isfinite(d) &&
            a <= b && b <= c && c <= d)
            ++ordered;
    }
    if (ordered < 4) r.pass = false;

    VectorXd means(res.total_frmse.cols());
    bool all_finite = true;
    for (int v = 0; v < res.total_frmse.cols(); ++v) {
        means[v] = res.total_frmse.col(v).mean();
        if (!std::isfinite(means[v])) all_finite = false;
    }
    if (!all_finite) r.pass = false;
    for (int v = 0; v < means.size() && r.pass; ++v)
        if (v != tv && !(means[tv] > means[v])) r.pass = false;

    std::ostringstream os;
    os << "ordering holds in " << ordered << "/" << R << " replicates; mean total frmse";
    for (size_t v = 0; v < res.models.size(); ++v)
        os << " " << res.models[v] << "=" << num(means[static_cast<int>(v)]);
    r.detail = os.str();
    return r;
}

// --------------------------------------------------------------- criterion 5

double reference_dirichlet_logpdf(const VectorXd& y, const VectorXd& mu, double phi) {
    // direct transcription of the density in its alpha parameterization
    double s = std::lgamma(phi);
    for (int j = 0; j < y.size(); ++j) {
        const double a = phi * mu[j];
        s -= std::lgamma(a);
        s += (a - 1.0) * std::log(y[j]);
    }
    return s;
}

VectorXd random_composition(Rng& rng, int J) {
    VectorXd g(J);
    for (int j = 0; j < J; ++j) g[j] = rng.gamma(2.0) + 1e-3;
    return g / g.sum();
}

bool check_logpdf_oracle(std::string& detail) {
    Rng rng = Rng(kSeed).child("oracle", 1);
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
        const int J = 2 + static_cast<int>(rng.uniform_index(11));
        const VectorXd y = random_composition(rng, J);
        const VectorXd mu = random_composition(rng, J);
        const double phi = std::exp(rng.uniform(0.0, 6.0));
        const double got = dirichlet_logpdf(y, mu, phi);
        const double want = reference_dirichlet_logpdf(y, mu, phi);
        worst = std::max(worst, std::abs(got - want));
    }
    detail += " logpdf dev=" + num(worst) + ";";
    return worst <= 1e-10;
}

bool check_gradient_oracle(std::string& detail) {
    Rng rng = Rng(kSeed).child("oracle", 2);
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
        ModelSpec spec = study_model_spec();
        Params truth = study_truth();
        switch (i % 4) {
            case 0: break; // gamma-intercept reparameterization active
            case 1:
                spec.prior.gamma_intercept_gamma = false;
                break;
            case 2:
                spec.prior.gamma_intercept_gamma = false;
                spec.prior.horseshoe = true;
                break;
            case 3:
                spec.prior.gamma_intercept_gamma = false;
                spec.link = Link::Ilr;
                spec.centered = true;
                spec.mean_design = DesignSpec::parse("intercept,fourier:7:1");
                truth.beta = MatrixXd::Zero(2, 3);
                truth.beta(0, 0) = -0.07;
                truth.beta(1, 0) = 0.10;
                break;
        }
        Rng sim = rng.child("sim", i);
        const CompositionalSeries data = simulate_darma(spec, truth, 60, sim, 100).series;
        const DarmaPosterior post(spec, data, true);

        VectorXd theta(post.dim());
        for (int k = 0; k < post.dim(); ++k) theta[k] = 0.3 * rng.normal();
        VectorXd grad(post.dim());
        post(theta, &grad);
        VectorXd fd(post.dim()), x = theta;
        for (int k = 0; k < post.dim(); ++k) {
            const double h = 2e-4 * std::max(1.0, std::abs(theta[k]));
            x[k] = theta[k] + h;
            const double up = post(x);
            x[k] = theta[k] - h;
            const double dn = post(x);
            x[k] = theta[k];
            fd[k] = (up - dn) / (2.0 * h);
        }
        const double rel = (grad - fd).cwiseAbs().maxCoeff() /
                           std::max(1.0, grad.cwiseAbs().maxCoeff());
        worst = std::max(worst, rel);
    }
    detail += " grad rel dev=" + num(worst) + ";";
    return worst <= 1e-5;
}

bool check_ols_oracle(std::string& detail) {
    ModelSpec spec;
    spec.J = 3;
    spec.P = 1;
    spec.Q = 0;
    spec.centered = false;

    Params par;
    MatrixXd A(2, 2);
    A << 0.5, -0.15, 0.2, 0.55;
    par.A = {A};
    par.beta = MatrixXd(2, 1);
    par.beta << -0.3, 0.25;
    Rng sim = Rng(kSeed).child("oracle", 3);
    const CompositionalSeries data =
        simulate_tvarma(spec, par, study_tvarma_chol(0.08, 0.2), 200, sim, 100).series;

    MleOptions opts;
    opts.optim.grad_tol = 1e-6;
    opts.optim.max_iterations = 5000;
    const MleFit fit = fit_mle_tvarma(spec, data, Rng(kSeed).child("oracle", 4), opts);

    const TvarmaLikelihood lik(spec, data);
    const MatrixXd& e = lik.data().e;
    const int n = lik.T() - 1;
    MatrixXd D(n, 3);
    D.leftCols(2) = e.topRows(n);
    D.col(2).setOnes();
    const MatrixXd Y = e.bottomRows(n);
    const MatrixXd coef = (D.transpose() * D).ldlt().solve(D.transpose() * Y);
    const MatrixXd resid = Y - D * coef;
    const MatrixXd Sigma = resid.transpose() * resid / n;
    Params ols;
    ols.A = {coef.topRows(2).transpose()};
    ols.beta = coef.row(2).transpose();
    const VectorXd want = lik.pack(ols, MatrixXd(Sigma.llt().matrixL()));

    const double dev = (fit.theta - want).cwiseAbs().maxCoeff();
    detail += " ols dev=" + num(dev) + (fit.converged ? "" : " (not converged)") + ";";
    return fit.converged && dev <= 1e-6;
}

bool check_gpd_oracle(std::string& detail) {
    Rng rng = Rng(kSeed).child("oracle", 5);
    std::vector<double> heavy(2000), light(2000);
    for (auto& v : heavy) {
        const double u = rng.uniform();
        v = std::expm1(-0.5 * std::log1p(-u)) / 0.5;
    }
    for (auto& v : light) v = rng.exponential();
    const double kh = gpd_fit(heavy).k;
    const double kl = gpd_fit(light).k;
    detail += " gpd khat=" + num(kh) + "/" + num(kl) + ";";
    return std::abs(kh - 0.5) <= 0.1 && std::abs(kl) <= 0.08;
}

bool check_lfo_oracle(std::string& detail) {
    ModelSpec spec;
    spec.J = 3;
    spec.P = 1;
    spec.Q = 0;
    spec.centered = false;

    Params par;
    MatrixXd A(2, 2);
    A << 0.5, -0.1, 0.15, 0.45;
    par.A = {A};
    par.beta = MatrixXd(2, 1);
    par.beta << -0.2, 0.3;
    par.gamma = VectorXd::Constant(1, std::log(300.0));
    Rng sim = Rng(kSeed).child("oracle", 6);
    const CompositionalSeries data = simulate_darma(spec, par, 200, sim, 100).series;

    LfoOptions opts;
    opts.L = 100;
    opts.nuts.chains = 2;
    opts.nuts.warmup = 150;
    opts.nuts.samples = 150;

    progress("lfo oracle: psis pass");
    const LfoResult fast = lfo_elpd(spec, data, Rng(kSeed).child("oracle", 7), opts);
    progress("lfo oracle: exact pass (" + std::to_string(100) + " refits)");
    opts.exact = true;
    const LfoResult slow = lfo_elpd(spec, data, Rng(kSeed).child("oracle", 7), opts);

    const VectorXd d = fast.per_step - slow.per_step;
    const int n = static_cast<int>(d.size());
    const double mean = d.mean();
    const double se = std::sqrt((d.array() - mean).square().sum() / (n - 1) * n);
    const double diff = std::abs(fast.elpd - slow.elpd);
    detail += " lfo diff=" + num(diff) + " (2se=" + num(2 * se) + ", n=" + std::to_string(n) +
              ", refits " + std::to_string(fast.refits) + "/" + std::to_string(slow.refits) + ");";
    return n == 100 && diff <= 2.0 * se;
}

CriterionResult criterion5() {
    CriterionResult r{5, true, ""};
    std::string detail;
    if (!check_logpdf_oracle(detail)) r.pass = false;
    if (!check_gradient_oracle(detail)) r.pass = false;
    if (!check_ols_oracle(detail)) r.pass = false;
    if (!check_gpd_oracle(detail)) r.pass = false;
    if (!check_lfo_oracle(detail)) r.pass = false;
    r.detail = detail;
    return r;
}

// --------------------------------------------------------------- criterion 6

bool check_round_trips(std::string& detail) {
    double worst = 0.0;
    for (const int J : {2, 3, 12}) {
        for (const Link link : {Link::Alr, Link::Clr, Link::Ilr}) {
            Rng rng = Rng(kSeed).child("invariant", static_cast<uint64_t>(J))
                          .child(static_cast<uint64_t>(link));
            for (int i = 0; i < 1000; ++i) {
                const VectorXd y = random_composition(rng, J);
                const VectorXd eta = link_forward(link, y, J);
                const VectorXd back = link_inverse_values(link, eta, J);
                worst = std::max(worst, (y - back).cwiseAbs().maxCoeff());
            }
        }
    }
    detail += " round trip dev=" + num(worst) + ";";
    return worst <= 1e-10;
}

bool check_forecast_validity(std::string& detail) {
    const ModelSpec spec = study_model_spec();
    const Params par = study_truth();
    Rng sim = Rng(kSeed).child("invariant", 10);
    const CompositionalSeries train = simulate_darma(spec, par, 80, sim, 100).series;
    const FitData fd = FitData::build(spec, train);

    double worst_sum = 0.0;
    bool positive = true;
    MatrixXd mu, y;
    for (int s = 0; s < 300; ++s) {
        Rng path = Rng(kSeed).child("invariant", 11).child(s);
        if (!darma_path(spec, fd, par, 12, path, mu, y)) return false;
        for (int h = 0; h < 12; ++h) {
            positive = positive && y.row(h).minCoeff() > 0.0 && mu.row(h).minCoeff() > 0.0;
            worst_sum = std::max(worst_sum, std::abs(y.row(h).sum() - 1.0));
            worst_sum = std::max(worst_sum, std::abs(mu.row(h).sum() - 1.0));
        }
    }

    ModelSpec ml = spec;
    ml.prior.gamma_intercept_gamma = false;
    const VectorXd theta = Layout::build(ml).pack(par);
    const Forecast fc = forecast_mle_darma(spec, train, theta, 8, 300, Rng(kSeed).child("invariant", 12));
    for (int h = 0; h < 8; ++h) {
        worst_sum = std::max(worst_sum, std::abs(fc.mean.row(h).sum() - 1.0));
        worst_sum = std::max(worst_sum, std::abs(fc.sample_mean.row(h).sum() - 1.0));
        positive = positive && fc.lo.row(h).minCoeff() > 0.0 && fc.hi.row(h).maxCoeff() < 1.0;
    }
    detail += " forecast sum dev=" + num(worst_sum) + ";";
    return positive && worst_sum <= 1e-9;
}

bool check_parameterization_equivalence(std::string& detail) {
    ModelSpec unc;
    unc.J = 3;
    unc.P = 1;
    unc.Q = 1;
    unc.centered = false;
    unc.prior.gamma_intercept_gamma = false;
    ModelSpec cen = unc;
    cen.centered = true;

    Rng rng = Rng(kSeed).child("invariant", 20);
    Params par = study_truth();
    Rng sim = rng.child("sim");
    const CompositionalSeries data = simulate_darma(unc, par, 100, sim, 100).series;

    const DarmaPosterior post_unc(unc, data, false);
    const DarmaPosterior post_cen(cen, data, false);

    double worst = 0.0;
    for (int i = 0; i < 5; ++i) {
        Params p;
        MatrixXd A(2, 2), B(2, 2);
        for (int k = 0; k < 4; ++k) {
            A(k / 2, k % 2) = 0.3 * rng.normal();
            B(k / 2, k % 2) = 0.3 * rng.normal();
        }
        A += 0.4 * MatrixXd::Identity(2, 2);
        p.A = {A};
        p.B = {B};
        p.beta = MatrixXd(2, 1);
        p.beta << 0.2 * rng.normal(), 0.2 * rng.normal();
        p.gamma = VectorXd::Constant(1, 5.0 + rng.normal());

        Params pc = p;
        pc.beta = (MatrixXd::Identity(2, 2) - A).lu().solve(p.beta);

        VectorXd lt_u(data.T()), lt_c(data.T());
        const double lu = post_unc(post_unc.layout().pack(p), nullptr, &lt_u);
        const double lc = post_cen(post_cen.layout().pack(pc), nullptr, &lt_c);
        worst = std::max(worst, std::abs(lu - lc));
        worst = std::max(worst, (lt_u - lt_c).cwiseAbs().maxCoeff());
    }
    detail += " centered/uncentered dev=" + num(worst) + ";";
    return worst <= 1e-9;
}

bool check_mask_zeros(std::string& detail) {
    ModelSpec spec = benchmark_variant_spec(BenchmarkVariant::NearestNeighbor);
    const Layout layout = Layout::build(spec);
    Rng rng = Rng(kSeed).child("invariant", 30);
    VectorXd theta(layout.dim());
    for (int i = 0; i < layout.dim(); ++i) theta[i] = rng.normal();
    const Params par = layout.unpack(theta);
    const Mask mask = Mask::nearest_neighbor(spec.K());
    bool exact = true;
    for (int r = 0; r < spec.K(); ++r)
        for (int c = 0; c < spec.K(); ++c)
            if (!mask.allows(r, c) && par.A[0](r, c) != 0.0) exact = false;
    exact = exact && layout.pack(par) == theta;
    detail += std::string(" mask zeros ") + (exact ? "exact;" : "violated;");
    return exact;
}

bool check_thread_invariance(std::string& detail) {
    ModelSpec spec;
    spec.J = 2;
    spec.P = 1;
    spec.Q = 0;
    spec.centered = false;

    Params par;
    par.A = {0.6 * MatrixXd::Identity(1, 1)};
    par.beta = MatrixXd::Constant(1, 1, 0.2);
    par.gamma = VectorXd::Constant(1, std::log(300.0));
    Rng sim = Rng(kSeed).child("invariant", 40);
    const CompositionalSeries data = simulate_darma(spec, par, 60, sim, 100).series;
    const DarmaPosterior post(spec, data, true);

    NutsOptions nuts;
    nuts.chains = 4;
    nuts.warmup = 100;
    nuts.samples = 100;
    MatrixXd base;
    bool same = true;
    for (const int threads : {1, 2, 4}) {
        nuts.threads = threads;
        const BayesFit fit = fit_bayes_darma(post, Rng(kSeed).child("invariant", 41), nuts);
        if (base.size() == 0) base = fit.draws();
        else same = same && fit.draws() == base;
    }

    ModelSpec ml = spec;
    ml.prior.gamma_intercept_gamma = false;
    const VectorXd theta = Layout::build(ml).pack(par);
    const Forecast f1 = forecast_mle_darma(spec, data, theta, 6, 200, Rng(kSeed).child("invariant", 42));
    const Forecast f2 = forecast_mle_darma(spec, data, theta, 6, 200, Rng(kSeed).child("invariant", 42));
    same = same && f1.mean == f2.mean && f1.lo == f2.lo && f1.hi == f2.hi;

    detail += std::string(" reruns ") + (same ? "byte-identical;" : "diverged;");
    return same;
}

CriterionResult criterion6() {
    CriterionResult r{6, true, ""};
    std::string detail;
    if (!check_round_trips(detail)) r.pass = false;
    if (!check_forecast_validity(detail)) r.pass = false;
    if (!check_parameterization_equivalence(detail)) r.pass = false;
    if (!check_mask_zeros(detail)) r.pass = false;
    if (!check_thread_invariance(detail)) r.pass = false;
    r.detail = detail;
    return r;
}

// --------------------------------------------------------------- criterion 7

CriterionResult criterion7() {
    CriterionResult r{7, true, ""};
    const int K = 11; // J = 12 components
    const int full = Mask::full(K).free_count();
    const int nn = Mask::nearest_neighbor(K).free_count();
    const int diag = Mask::diagonal(K).free_count();
    if (full != 121 || nn != 31 || diag != 11) r.pass = false;
    r.detail = "free A-entries full=" + std::to_string(full) + ", nearest-neighbor=" +
               std::to_string(nn) + ", diagonal=" + std::to_string(diag) + "; reduction " +
               std::to_string(full - nn) +
               " (source text says 91; the 11+10+10 band gives 90 — see notes)";
    return r;
}

} // namespace

int main(int argc, char** argv) {
    std::set<int> wanted;
    for (int i = 1; i < argc; ++i) {
        try {
            wanted.insert(std::stoi(argv[i]));
        } catch (const std::exception&) {
            std::fprintf(stderr, "usage: %s [criterion ids]\n", argv[0]);
            return 64;
        }
    }
    if (wanted.empty()) wanted = {1, 2, 3, 4, 5, 6, 7};

    std::vector<CriterionResult> results;
    auto run = [&](int id, CriterionResult (*fn)()) {
        if (!wanted.count(id)) return;
        progress("criterion " + std::to_string(id));
        const double t0 = now_s();
        try {
            results.push_back(fn());
        } catch (const std::exception& e) {
            results.push_back({id, false, std::string("threw: ") + e.what()});
        }
        progress("criterion " + std::to_string(id) + " finished in " + num(now_s() - t0) + "s");
    };

    // cheap structural checks first, then the replicated studies
    run(5, criterion5);
    run(6, criterion6);
    run(7, criterion7);
    run(3, criterion3);
    run(1, criterion1);
    run(2, criterion2);
    run(4, criterion4);

    std::sort(results.begin(), results.end(),
              [](const CriterionResult& a, const CriterionResult& b) { return a.id < b.id; });
    int failures = 0;
    for (const auto& r : results) {
        if (!r.pass) ++failures;
        std::printf("[%s] criterion %d:%s%s\n", r.pass ? "PASS" : "FAIL", r.id,
                    r.detail.empty() || r.detail[0] == ' ' ? "" : " ", r.detail.c_str());
    }
    return failures;
}
