#include <catch2/catch_amalgamated.hpp>

#include <bdarma/model.hpp>
#include <bdarma/rng.hpp>
#include <bdarma/study.hpp>

using namespace bdarma;
using Catch::Approx;

TEST_CASE("mask shapes and free counts") {
    CHECK(Mask::full(11).free_count() == 121);
    CHECK(Mask::nearest_neighbor(11).free_count() == 31);
    CHECK(Mask::diagonal(11).free_count() == 11);
    CHECK(Mask::named("full", 4).free_count() == 16);
    CHECK_THROWS_AS(Mask::named("banded", 4), config_error);

    const Mask nn = Mask::nearest_neighbor(4);
    CHECK(nn.allows(0, 0));
    CHECK(nn.allows(0, 1));
    CHECK_FALSE(nn.allows(0, 2));
    CHECK_FALSE(nn.allows(3, 0));
}

TEST_CASE("model spec validation") {
    ModelSpec spec;
    spec.J = 1;
    CHECK_THROWS_AS(spec.validate(), config_error);
    spec.J = 3;
    spec.P = -1;
    CHECK_THROWS_AS(spec.validate(), config_error);
    spec.P = 1;
    spec.reference = 4;
    CHECK_THROWS_AS(spec.validate(), config_error);
    spec.reference = 0;
    CHECK(spec.ref() == 3);
    spec.reference = 2;
    CHECK(spec.ref() == 2);
    spec.Q = 2;
    CHECK(spec.lag_depth() == 2);
}

TEST_CASE("layout packs the recovery study model") {
    const ModelSpec spec = study_model_spec();
    const Layout layout = Layout::build(spec);
    CHECK(layout.dim() == 11);
    const auto names = layout.names();
    REQUIRE(names.size() == 11);
    CHECK(names[0] == "a1_1_1");
    CHECK(names[1] == "a1_1_2");
    CHECK(names[2] == "a1_2_1");
    CHECK(names[3] == "a1_2_2");
    CHECK(names[4] == "b1_1_1");
    CHECK(names[7] == "b1_2_2");
    CHECK(names[8] == "beta_1_1");
    CHECK(names[9] == "beta_2_1");
    CHECK(names[10] == "log_gamma_1");

    Params truth = study_truth();
    const VectorXd theta = layout.pack(truth);
    const Params back = layout.unpack(theta);
    CHECK((back.A[0] - truth.A[0]).cwiseAbs().maxCoeff() == 0.0);
    CHECK((back.B[0] - truth.B[0]).cwiseAbs().maxCoeff() == 0.0);
    CHECK((back.beta - truth.beta).cwiseAbs().maxCoeff() == 0.0);
    CHECK(back.gamma == truth.gamma);
    CHECK(back.gamma_intercept_log);
}

TEST_CASE("masked entries stay exactly zero") {
    ModelSpec spec;
    spec.J = 5;
    spec.P = 1;
    spec.Q = 1;
    spec.mask = "nearest_neighbor";
    const Layout layout = Layout::build(spec);
    const Mask mask = Mask::nearest_neighbor(4);
    CHECK(layout.dim() == mask.free_count() * 2 + 4 + 1);

    Rng rng(3);
    VectorXd theta(layout.dim());
    for (int i = 0; i < layout.dim(); ++i) theta[i] = rng.normal();
    const Params par = layout.unpack(theta);
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c)
            if (!mask.allows(r, c)) {
                CHECK(par.A[0](r, c) == 0.0);
                CHECK(par.B[0](r, c) == 0.0);
            }
    CHECK(layout.pack(par) == theta);
}

TEST_CASE("banded prior means follow the transition structure") {
    ModelSpec spec;
    spec.J = 4;
    spec.P = 1;
    spec.prior.banded_a = true;
    spec.prior.banded_a_diag = 0.4;
    spec.prior.banded_a_offdiag = 0.1;
    const Layout layout = Layout::build(spec);
    for (int i = 0; i < 9; ++i) {
        const auto& e = layout.entries()[i];
        const double want = e.row == e.col ? 0.4 : (std::abs(e.row - e.col) == 1 ? 0.1 : 0.0);
        CHECK(layout.prior_mean()[i] == want);
    }
}

TEST_CASE("horseshoe adds one local scale per group") {
    ModelSpec spec;
    spec.J = 4;
    spec.P = 1;
    spec.prior.horseshoe = true;
    const Layout layout = Layout::build(spec);
    CHECK(layout.n_lambda() == 4);
    CHECK(layout.dim() == 9 + 3 + 1 + 4);
    const auto names = layout.names();
    CHECK(names.back() == "log_lambda_4");
    CHECK(layout.group()[0] == 0);  // a1_1_1 belongs to row group 1
    CHECK(layout.group()[layout.dim() - 5] == 3); // gamma gets the extra group
}

TEST_CASE("scale coefficients exponentiate the positive intercept") {
    Params par;
    par.gamma = VectorXd::Constant(2, 1.0);
    par.gamma[0] = std::log(5.0);
    par.gamma_intercept_log = true;
    const VectorXd g = par.scale_coefficients();
    CHECK(g[0] == Approx(5.0).epsilon(1e-15));
    CHECK(g[1] == 1.0);
    par.gamma_intercept_log = false;
    CHECK(par.scale_coefficients()[0] == Approx(std::log(5.0)));
}

TEST_CASE("series rows are validated with their position") {
    MatrixXd values(3, 3);
    values << 0.2, 0.3, 0.5, 0.2, 0.0, 0.8, 0.1, 0.1, 0.8;
    try {
        CompositionalSeries::from_matrix(values);
        FAIL("expected a data_error");
    } catch (const data_error& e) {
        CHECK(std::string(e.what()).find("row 2") != std::string::npos);
    }
    const CompositionalSeries s = CompositionalSeries::from_matrix(values, ZeroPolicy::Epsilon);
    CHECK(s.T() == 3);
    CHECK(s.J() == 3);
    CHECK(s.values().row(1).sum() == Approx(1.0).margin(1e-12));

    const CompositionalSeries head = s.head(2);
    CHECK(head.T() == 2);
    CHECK(head.values() == s.values().topRows(2));
    CHECK_THROWS_AS(s.head(0), data_error);
    CHECK_THROWS_AS(s.head(4), data_error);
}

TEST_CASE("benchmark variants share data but not structure") {
    CHECK(benchmark_variant_spec(BenchmarkVariant::NormalFull).mask == "full");
    CHECK(benchmark_variant_spec(BenchmarkVariant::NearestNeighbor).mask == "nearest_neighbor");
    CHECK(benchmark_variant_spec(BenchmarkVariant::Diagonal).mask == "diagonal");
    CHECK(benchmark_variant_spec(BenchmarkVariant::HorseshoeFull).prior.horseshoe);
    CHECK_FALSE(benchmark_variant_spec(BenchmarkVariant::NormalFull).prior.horseshoe);
    CHECK(benchmark_variant_name(BenchmarkVariant::Tvar) == "tvar");

    const ModelSpec base = benchmark_base_spec();
    CHECK(base.J == 12);
    CHECK(base.mean_design.columns() == 6);
    const Params truth = benchmark_truth();
    CHECK(truth.A[0].rows() == 11);
    CHECK(truth.gamma.size() == 3);
}
