#ifndef BDARMA_METRICS_HPP
#define BDARMA_METRICS_HPP

#include <Eigen/Dense>
#include <cmath>
#include <string>
#include <vector>

#include "bdarma/errors.hpp"
#include "bdarma/math.hpp"

namespace bdarma {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Forecast error pooled across replicates and horizons, per component.
class ForecastErrorAccumulator {
  public:
    explicit ForecastErrorAccumulator(int J) : sq_(VectorXd::Zero(J)), abs_(VectorXd::Zero(J)) {}

    void add(const MatrixXd& forecast_mean, const MatrixXd& realized) {
        if (forecast_mean.rows() != realized.rows() || forecast_mean.cols() != realized.cols() ||
            forecast_mean.cols() != sq_.size())
            throw data_error("forecast and realized blocks have mismatched shapes");
        const MatrixXd d = forecast_mean - realized;
        sq_ += d.array().square().colwise().sum().matrix().transpose();
        abs_ += d.array().abs().colwise().sum().matrix().transpose();
        n_ += static_cast<int>(d.rows());
    }

    int count() const { return n_; }

    VectorXd frmse() const {
        if (n_ == 0) throw data_error("no forecasts accumulated");
        return (sq_ / n_).cwiseSqrt();
    }

    VectorXd fmae() const {
        if (n_ == 0) throw data_error("no forecasts accumulated");
        return abs_ / n_;
    }

    double total_frmse() const { return frmse().sum(); }
    double total_fmae() const { return fmae().sum(); }

  private:
    VectorXd sq_, abs_;
    int n_ = 0;
};

// Estimation quality of one coefficient across replicates: bias and RMSE of
// the point estimate, mean 95% interval length, and interval coverage.
class RecoveryAccumulator {
  public:
    void add(double estimate, double lo, double hi, double truth) {
        err_.push_back(estimate - truth);
        len_.push_back(hi - lo);
        if (lo <= truth && truth <= hi) ++covered_;
        ++n_;
    }

    int count() const { return n_; }
    double bias() const { return mean_of(err_); }

    double rmse() const {
        double acc = 0.0;
        for (double e : err_) acc += e * e;
        return std::sqrt(acc / n_);
    }

    double interval_length() const { return mean_of(len_); }
    double coverage() const { return static_cast<double>(covered_) / n_; }

  private:
    std::vector<double> err_, len_;
    int covered_ = 0;
    int n_ = 0;
};

} // namespace bdarma

#endif
