#include <catch2/catch_amalgamated.hpp>

#include <bdarma/metrics.hpp>

using namespace bdarma;
using Catch::Approx;

TEST_CASE("forecast errors pool rows across blocks") {
    ForecastErrorAccumulator acc(2);
    CHECK(acc.count() == 0);
    CHECK_THROWS_AS(acc.frmse(), data_error);
    CHECK_THROWS_AS(acc.fmae(), data_error);

    MatrixXd f(1, 2), r(1, 2);
    f << 0.5, 0.5;
    r << 0.6, 0.4;
    acc.add(f, r);
    r << 0.8, 0.2;
    acc.add(f, r);
    CHECK(acc.count() == 2);

    // errors are {0.1, 0.3} in both components
    const VectorXd frmse = acc.frmse();
    const VectorXd fmae = acc.fmae();
    CHECK(frmse[0] == Approx(0.223606797749979).margin(1e-15));
    CHECK(frmse[1] == Approx(0.223606797749979).margin(1e-15));
    CHECK(fmae[0] == Approx(0.2).margin(1e-15));
    CHECK(fmae[1] == Approx(0.2).margin(1e-15));
    CHECK(acc.total_frmse() == Approx(2 * 0.223606797749979).margin(1e-14));
    CHECK(acc.total_fmae() == Approx(0.4).margin(1e-15));

    MatrixXd block(3, 2);
    block.setConstant(0.5);
    acc.add(block, block);
    CHECK(acc.count() == 5);
    CHECK(acc.frmse()[0] == Approx(std::sqrt(0.1 * 0.1 + 0.3 * 0.3) / std::sqrt(5.0)).margin(1e-15));

    MatrixXd wrong(1, 3);
    wrong.setConstant(1.0 / 3);
    CHECK_THROWS_AS(acc.add(wrong, wrong), data_error);
    MatrixXd tall(2, 2);
    tall.setConstant(0.5);
    CHECK_THROWS_AS(acc.add(f, tall), data_error);
}

TEST_CASE("coefficient recovery summarises estimates against truth") {
    RecoveryAccumulator acc;
    acc.add(0.10, 0.00, 0.30, 0.05);  // err 0.05, len 0.30, covered
    acc.add(-0.05, -0.20, 0.00, 0.05);  // err -0.10, len 0.20, missed
    acc.add(0.05, 0.05, 0.05, 0.05);  // err 0, len 0, boundary counts as covered

    CHECK(acc.count() == 3);
    CHECK(acc.bias() == Approx((0.05 - 0.10 + 0.0) / 3).margin(1e-15));
    CHECK(acc.rmse() == Approx(std::sqrt((0.0025 + 0.01) / 3)).margin(1e-15));
    CHECK(acc.interval_length() == Approx(0.5 / 3).margin(1e-15));
    CHECK(acc.coverage() == Approx(2.0 / 3).margin(1e-15));
}
