#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include <bdarma/forecast.hpp>
#include <bdarma/study.hpp>

using namespace bdarma;
using Catch::Approx;

namespace {

CompositionalSeries study_train(int T, std::uint64_t seed) {
    Rng rng(seed);
    return simulate_darma(study_model_spec(), study_truth(), T, rng, 100).series;
}

VectorXd truth_theta() {
    ModelSpec ml = study_model_spec();
    ml.prior.gamma_intercept_gamma = false;
    return Layout::build(ml).pack(study_truth());
}

void check_simplex_rows(const MatrixXd& m) {
    for (int r = 0; r < m.rows(); ++r) {
        CHECK(m.row(r).minCoeff() > 0.0);
        CHECK(m.row(r).sum() == Approx(1.0).margin(1e-9));
    }
}

} // namespace

TEST_CASE("path accumulator reduces to hand-computed quantiles") {
    forecast_detail::PathAccumulator acc(1, 2);
    acc.add(0, Eigen::Vector2d(0.30, 0.70), Eigen::Vector2d(0.20, 0.80));
    acc.add(0, Eigen::Vector2d(0.40, 0.60), Eigen::Vector2d(0.40, 0.60));
    const Forecast f = acc.finalize(2);
    CHECK(f.mean(0, 0) == Approx(0.35).margin(1e-15));
    CHECK(f.sample_mean(0, 0) == Approx(0.30).margin(1e-15));
    CHECK(f.median(0, 0) == Approx(0.30).margin(1e-15));
    CHECK(f.lo(0, 0) == Approx(0.205).margin(1e-15));
    CHECK(f.hi(0, 0) == Approx(0.395).margin(1e-15));
    CHECK(f.median(0, 1) == Approx(0.70).margin(1e-15));
}

TEST_CASE("plug-in dirichlet forecast returns valid compositions") {
    const ModelSpec spec = study_model_spec();
    const CompositionalSeries train = study_train(80, 11);
    const VectorXd theta = truth_theta();

    const int H = 5;
    const Forecast f = forecast_mle_darma(spec, train, theta, H, 400, Rng(7));
    CHECK(f.mean.rows() == H);
    CHECK(f.mean.cols() == 3);
    check_simplex_rows(f.mean);
    check_simplex_rows(f.sample_mean);
    for (int h = 0; h < H; ++h)
        for (int j = 0; j < 3; ++j) {
            CHECK(f.lo(h, j) <= f.median(h, j));
            CHECK(f.median(h, j) <= f.hi(h, j));
            CHECK(f.lo(h, j) > 0.0);
            CHECK(f.hi(h, j) < 1.0);
            CHECK(f.hi(h, j) - f.lo(h, j) > 0.0);
            CHECK(std::abs(f.mean(h, j) - f.sample_mean(h, j)) < 0.02);
        }

    const Forecast again = forecast_mle_darma(spec, train, theta, H, 400, Rng(7));
    CHECK(f.mean == again.mean);
    CHECK(f.median == again.median);
    CHECK(f.lo == again.lo);
    CHECK(f.hi == again.hi);
}

TEST_CASE("posterior predictive forecast averages one path per draw") {
    ModelSpec spec = study_model_spec();
    spec.prior.gamma_intercept_gamma = false;
    const Layout layout = Layout::build(spec);
    const CompositionalSeries train = study_train(60, 12);
    const VectorXd theta = truth_theta();

    Rng jitter(40);
    MatrixXd draws(30, layout.dim());
    for (int s = 0; s < draws.rows(); ++s)
        for (int i = 0; i < layout.dim(); ++i) draws(s, i) = theta[i] + 0.01 * jitter.normal();

    const int H = 4;
    const Forecast f = forecast_bayes_darma(spec, train, layout, draws, H, Rng(3));
    CHECK(f.mean.rows() == H);
    check_simplex_rows(f.mean);
    check_simplex_rows(f.sample_mean);
    for (int h = 0; h < H; ++h)
        for (int j = 0; j < 3; ++j) {
            CHECK(f.median(h, j) > 0.0);
            CHECK(f.median(h, j) < 1.0);
            CHECK(f.lo(h, j) <= f.median(h, j));
            CHECK(f.median(h, j) <= f.hi(h, j));
        }

    const Forecast again = forecast_bayes_darma(spec, train, layout, draws, H, Rng(3));
    CHECK(f.mean == again.mean);
    CHECK(f.hi == again.hi);

    Params wild = study_truth();
    wild.A = {40.0 * MatrixXd::Identity(2, 2)};
    MatrixXd bad = layout.pack(wild).transpose().replicate(3, 1);
    CHECK_THROWS_AS(forecast_bayes_darma(spec, train, layout, bad, H, Rng(3)), numeric_error);
}

TEST_CASE("gaussian baseline forecast uses sampled paths for the mean") {
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
    Rng sim(14);
    const CompositionalSeries train =
        simulate_tvarma(spec, par, study_tvarma_chol(), 70, sim, 100).series;

    const TvarmaLikelihood lik(spec, train);
    const VectorXd theta = lik.pack(par, study_tvarma_chol());

    const Forecast f = forecast_mle_tvarma(spec, train, theta, 6, 300, Rng(8));
    CHECK(f.mean.rows() == 6);
    check_simplex_rows(f.mean);
    CHECK(f.mean == f.sample_mean);
    for (int h = 0; h < 6; ++h)
        for (int j = 0; j < 3; ++j) CHECK(f.lo(h, j) < f.hi(h, j));

    const Forecast again = forecast_mle_tvarma(spec, train, theta, 6, 300, Rng(8));
    CHECK(f.median == again.median);
}
