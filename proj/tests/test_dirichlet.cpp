#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include <bdarma/dirichlet.hpp>
#include <bdarma/rng.hpp>

using namespace bdarma;
using Catch::Approx;

namespace {

// Written from the alpha form of the density, independent of the mean/scale
// code path under test.
double logpdf_alpha_form(const VectorXd& y, const VectorXd& alpha) {
    double out = std::lgamma(alpha.sum());
    for (Eigen::Index j = 0; j < y.size(); ++j)
        out += -std::lgamma(alpha[j]) + (alpha[j] - 1.0) * std::log(y[j]);
    return out;
}

VectorXd random_mean(Rng& rng, int J) {
    VectorXd parts(J);
    for (int j = 0; j < J; ++j) parts[j] = rng.gamma(2.0) + 0.05;
    return parts / parts.sum();
}

} // namespace

TEST_CASE("logpdf matches the frozen alpha-form value") {
    VectorXd y(3), mu(3);
    y << 0.2, 0.3, 0.5;
    mu << 2.0 / 9.0, 3.0 / 9.0, 4.0 / 9.0;
    CHECK(dirichlet_logpdf(y, mu, 9.0) == Approx(2.0228711901914416301).margin(1e-12));

    const Composition cy = Composition::from(y);
    const DirichletParams p = DirichletParams::from(Composition::from(mu), 9.0);
    CHECK(dirichlet_logpdf(cy, p) == Approx(2.0228711901914416301).margin(1e-12));
}

TEST_CASE("logpdf agrees with an independent transcription") {
    Rng rng(11);
    for (int i = 0; i < 20; ++i) {
        const int J = 2 + static_cast<int>(rng.uniform() * 7);
        const VectorXd mu = random_mean(rng, J);
        const VectorXd y = random_mean(rng, J);
        const double phi = std::exp(rng.uniform(0.0, 6.0));
        const double got = dirichlet_logpdf(y, mu, phi);
        const double want = logpdf_alpha_form(y, phi * mu);
        CHECK(std::abs(got - want) <= 1e-10);
    }
}

TEST_CASE("mean gradient matches finite differences") {
    Rng rng(23);
    for (int i = 0; i < 10; ++i) {
        const int J = 3 + static_cast<int>(rng.uniform() * 4);
        VectorXd mu = random_mean(rng, J);
        const VectorXd y = random_mean(rng, J);
        const double phi = std::exp(rng.uniform(1.0, 5.0));
        const VectorXd g = dirichlet_grad_mu(y, mu, phi);
        for (int j = 0; j < J; ++j) {
            const double h = 1e-6;
            VectorXd up = mu, dn = mu;
            up[j] += h;
            dn[j] -= h;
            const double fd = (dirichlet_logpdf(y, up, phi) - dirichlet_logpdf(y, dn, phi)) /
                              (2.0 * h);
            CHECK(g[j] == Approx(fd).epsilon(1e-6).margin(1e-6));
        }
    }
}

TEST_CASE("log-precision gradient matches finite differences") {
    Rng rng(29);
    for (int i = 0; i < 10; ++i) {
        const VectorXd mu = random_mean(rng, 4);
        const VectorXd y = random_mean(rng, 4);
        const double t = rng.uniform(1.0, 6.0);
        const double g = dirichlet_grad_logphi(y, mu, std::exp(t));
        const double h = 1e-6;
        const double fd = (dirichlet_logpdf(y, mu, std::exp(t + h)) -
                           dirichlet_logpdf(y, mu, std::exp(t - h))) /
                          (2.0 * h);
        CHECK(g == Approx(fd).epsilon(1e-6).margin(1e-6));
    }
}

TEST_CASE("softmax backprop matches finite differences through the chain") {
    Rng rng(31);
    const VectorXd y = random_mean(rng, 4);
    const double phi = 40.0;
    VectorXd c(4);
    for (int j = 0; j < 4; ++j) c[j] = rng.normal();

    auto mu_of = [](const VectorXd& v) {
        VectorXd m = (v.array() - v.maxCoeff()).exp();
        return VectorXd(m / m.sum());
    };
    const VectorXd mu = mu_of(c);
    const VectorXd g = softmax_backprop(mu, dirichlet_grad_mu(y, mu, phi));
    for (int j = 0; j < 4; ++j) {
        const double h = 1e-6;
        VectorXd up = c, dn = c;
        up[j] += h;
        dn[j] -= h;
        const double fd = (dirichlet_logpdf(y, mu_of(up), phi) -
                           dirichlet_logpdf(y, mu_of(dn), phi)) /
                          (2.0 * h);
        CHECK(g[j] == Approx(fd).epsilon(1e-5).margin(1e-6));
    }
}

TEST_CASE("samples have the right mean and spread") {
    Rng rng(101);
    VectorXd mu(3);
    mu << 0.5, 0.3, 0.2;
    const int n = 20000;
    VectorXd acc = VectorXd::Zero(3);
    for (int i = 0; i < n; ++i) acc += dirichlet_sample_values(rng, 50.0 * mu);
    acc /= n;
    CHECK((acc - mu).cwiseAbs().maxCoeff() < 0.01);

    // phi = 1000, mu = 1/3: component standard deviation 0.0148996718756
    VectorXd third = VectorXd::Constant(3, 1.0 / 3.0);
    double sum = 0.0, sumsq = 0.0;
    for (int i = 0; i < n; ++i) {
        const double v = dirichlet_sample_values(rng, 1000.0 * third)[0];
        sum += v;
        sumsq += v * v;
    }
    const double sd = std::sqrt((sumsq - sum * sum / n) / (n - 1));
    CHECK(sd == Approx(0.0148996718756).epsilon(0.05));
}

TEST_CASE("sampling is a pure function of the stream") {
    VectorXd alpha(3);
    alpha << 2.0, 0.4, 7.0;
    Rng a(5), b(5);
    for (int i = 0; i < 50; ++i) {
        const VectorXd u = dirichlet_sample_values(a, alpha);
        const VectorXd v = dirichlet_sample_values(b, alpha);
        REQUIRE(u == v);
        CHECK(u.minCoeff() > 0.0);
        CHECK(u.sum() == Approx(1.0).margin(1e-12));
    }

    Rng c(5);
    const DirichletParams p =
        DirichletParams::from(Composition::from_unnormalized(alpha), alpha.sum());
    const Composition draw = dirichlet_sample(c, p);
    CHECK(draw.values().sum() == Approx(1.0).margin(1e-12));
}
