#ifndef BDARMA_MODEL_HPP
#define BDARMA_MODEL_HPP

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "bdarma/design.hpp"
#include "bdarma/errors.hpp"
#include "bdarma/simplex.hpp"

namespace bdarma {

// Sparsity pattern shared by every lag matrix of a block. Masked-out entries
// are pinned to exactly zero and carry no free parameter.
class Mask {
  public:
    Mask() = default;

    static Mask full(int K) { return Mask(Eigen::MatrixXi::Ones(K, K), "full"); }

    static Mask diagonal(int K) {
        Eigen::MatrixXi m = Eigen::MatrixXi::Identity(K, K);
        return Mask(m, "diagonal");
    }

    // Tridiagonal: each coordinate sees itself and its two neighbours.
    static Mask nearest_neighbor(int K) {
        Eigen::MatrixXi m = Eigen::MatrixXi::Zero(K, K);
        for (int r = 0; r < K; ++r)
            for (int c = 0; c < K; ++c)
                if (std::abs(r - c) <= 1) m(r, c) = 1;
        return Mask(m, "nearest_neighbor");
    }

    static Mask named(const std::string& name, int K) {
        if (name == "full") return full(K);
        if (name == "diagonal") return diagonal(K);
        if (name == "nearest_neighbor") return nearest_neighbor(K);
        throw config_error("unknown mask: " + name +
                           " (expected full, nearest_neighbor or diagonal)");
    }

    bool allows(int r, int c) const { return pattern_(r, c) != 0; }
    int free_count() const { return pattern_.sum(); }
    int size() const { return static_cast<int>(pattern_.rows()); }
    const std::string& name() const { return name_; }
    const Eigen::MatrixXi& pattern() const { return pattern_; }

  private:
    Mask(Eigen::MatrixXi pattern, std::string name)
        : pattern_(std::move(pattern)), name_(std::move(name)) {}

    Eigen::MatrixXi pattern_;
    std::string name_;
};

struct NormalPrior {
    double mean = 0.0;
    double sd = 0.5;
};

// Priors keyed by design column kind, for the regression blocks.
struct TermPriors {
    NormalPrior intercept{0.0, 0.5};
    NormalPrior fourier{0.0, 0.5};
    NormalPrior trend{0.0, 0.5};

    NormalPrior for_kind(DesignTerm::Kind kind) const {
        switch (kind) {
            case DesignTerm::Kind::Intercept: return intercept;
            case DesignTerm::Kind::Trend: return trend;
            case DesignTerm::Kind::Fourier: return fourier;
        }
        return intercept;
    }

    void set_all(NormalPrior p) { intercept = fourier = trend = p; }
};

struct PriorConfig {
    NormalPrior a{0.0, 0.5};
    // Banded alternative for the AR block: diagonal mean, first off-diagonal
    // mean, zero elsewhere, common sd taken from `a.sd`.
    bool banded_a = false;
    double banded_a_diag = 0.4;
    double banded_a_offdiag = 0.1;

    NormalPrior b{0.0, 0.5};
    TermPriors beta;
    TermPriors gamma{{0.0, 2.0}, {0.0, 2.0}, {0.0, 2.0}};

    // Positive prior on the precision intercept exp(gamma_0); the free
    // parameter becomes log(gamma_0) with the change-of-variable term added.
    bool gamma_intercept_gamma = false;
    double gamma_intercept_shape = 25.0 / 7.0;
    double gamma_intercept_rate = 5.0 / 7.0;

    // Grouped horseshoe: one local scale per linear-predictor row covering its
    // A/B/beta entries, plus one for the precision regression. The prior sd of
    // grouped coefficients becomes tau * lambda_group.
    bool horseshoe = false;
    double horseshoe_tau = 1.0;
};

struct ModelSpec {
    int J = 3;
    int P = 1;
    int Q = 0;
    Link link = Link::Alr;
    int reference = 0; // 1-based; 0 means the last component
    bool centered = true;
    std::string mask = "full";
    DesignSpec mean_design = DesignSpec::intercept_only();
    DesignSpec scale_design = DesignSpec::intercept_only();
    PriorConfig prior;

    int K() const { return J - 1; }
    int ref() const { return reference == 0 ? J : reference; }
    int lag_depth() const { return std::max(P, Q); }

    void validate() const {
        if (J < 2) throw config_error("model needs at least 2 components");
        if (P < 0 || Q < 0) throw config_error("lag orders cannot be negative");
        if (reference != 0) detail::check_reference(J, reference);
        Mask::named(mask, K());
    }
};

// Observed series: strictly positive compositions by row, with optional
// ISO-8601 date labels.
class CompositionalSeries {
  public:
    CompositionalSeries() = default;

    static CompositionalSeries from_matrix(MatrixXd values,
                                           ZeroPolicy policy = ZeroPolicy::Reject,
                                           std::vector<std::string> dates = {}) {
        if (values.rows() < 1) throw data_error("series is empty");
        if (!dates.empty() && static_cast<Eigen::Index>(dates.size()) != values.rows())
            throw data_error("date column length does not match the series");
        for (Eigen::Index t = 0; t < values.rows(); ++t) {
            VectorXd row = values.row(t).transpose();
            try {
                row = Composition::from(std::move(row), policy).values();
            } catch (const data_error& e) {
                throw data_error("row " + std::to_string(t + 1) + ": " + e.what());
            }
            values.row(t) = row.transpose();
        }
        CompositionalSeries s;
        s.values_ = std::move(values);
        s.dates_ = std::move(dates);
        return s;
    }

    const MatrixXd& values() const { return values_; }
    int T() const { return static_cast<int>(values_.rows()); }
    int J() const { return static_cast<int>(values_.cols()); }
    const std::vector<std::string>& dates() const { return dates_; }

    VectorXd row(int t) const { return values_.row(t).transpose(); } // 0-based

    CompositionalSeries head(int n) const {
        if (n < 1 || n > T()) throw data_error("invalid prefix length " + std::to_string(n));
        CompositionalSeries s;
        s.values_ = values_.topRows(n);
        if (!dates_.empty()) s.dates_.assign(dates_.begin(), dates_.begin() + n);
        return s;
    }

  private:
    MatrixXd values_;
    std::vector<std::string> dates_;
};

// Structured view of one point in parameter space. `gamma` stores the free
// values as sampled; scale_coefficients() applies the log reparameterization
// of the intercept when the positive prior is active.
struct Params {
    std::vector<MatrixXd> A; // P matrices, K x K
    std::vector<MatrixXd> B; // Q matrices, K x K
    MatrixXd beta;           // K x r_mean
    VectorXd gamma;          // r_scale
    VectorXd log_lambda;     // K + 1 when the horseshoe is active, else empty
    bool gamma_intercept_log = false;

    VectorXd scale_coefficients() const {
        VectorXd g = gamma;
        if (gamma_intercept_log && g.size() > 0) g[0] = std::exp(g[0]);
        return g;
    }
};

// Flat packing of the free parameters, with the realized per-coefficient
// normal priors and horseshoe group ids resolved once up front.
class Layout {
  public:
    enum class Block { A, B, Beta, Gamma, Lambda };

    struct Entry {
        Block block;
        int lag; // A/B only
        int row;
        int col;
    };

    static Layout build(const ModelSpec& spec) {
        spec.validate();
        Layout layout;
        layout.K_ = spec.K();
        layout.P_ = spec.P;
        layout.Q_ = spec.Q;
        layout.mask_ = Mask::named(spec.mask, spec.K());
        layout.r_mean_ = spec.mean_design.columns();
        layout.r_scale_ = spec.scale_design.columns();
        layout.horseshoe_ = spec.prior.horseshoe;
        layout.tau_ = spec.prior.horseshoe_tau;
        layout.gamma_intercept_log_ = spec.prior.gamma_intercept_gamma;
        layout.gamma_shape_ = spec.prior.gamma_intercept_shape;
        layout.gamma_rate_ = spec.prior.gamma_intercept_rate;

        const int K = layout.K_;
        const auto& pr = spec.prior;
        std::vector<Entry> entries;
        std::vector<double> mean, sd;
        std::vector<int> group;

        auto push = [&](Entry e, double m, double s, int g) {
            entries.push_back(e);
            mean.push_back(m);
            sd.push_back(s);
            group.push_back(g);
        };

        for (int p = 0; p < spec.P; ++p)
            for (int r = 0; r < K; ++r)
                for (int c = 0; c < K; ++c) {
                    if (!layout.mask_.allows(r, c)) continue;
                    double m = pr.a.mean;
                    if (pr.banded_a)
                        m = (r == c) ? pr.banded_a_diag
                                     : (std::abs(r - c) == 1 ? pr.banded_a_offdiag : 0.0);
                    push({Block::A, p, r, c}, m, pr.a.sd, pr.horseshoe ? r : -1);
                }
        for (int q = 0; q < spec.Q; ++q)
            for (int r = 0; r < K; ++r)
                for (int c = 0; c < K; ++c) {
                    if (!layout.mask_.allows(r, c)) continue;
                    push({Block::B, q, r, c}, pr.b.mean, pr.b.sd, pr.horseshoe ? r : -1);
                }
        const auto beta_kinds = spec.mean_design.column_kinds();
        for (int r = 0; r < K; ++r)
            for (int c = 0; c < layout.r_mean_; ++c) {
                const NormalPrior p = pr.beta.for_kind(beta_kinds[c]);
                push({Block::Beta, 0, r, c}, p.mean, p.sd, pr.horseshoe ? r : -1);
            }
        const auto gamma_kinds = spec.scale_design.column_kinds();
        for (int c = 0; c < layout.r_scale_; ++c) {
            if (c == 0 && layout.gamma_intercept_log_) {
                if (gamma_kinds[0] != DesignTerm::Kind::Intercept)
                    throw config_error(
                        "positive precision-intercept prior needs an intercept as the first "
                        "scale design column");
                layout.gamma_intercept_index_ = static_cast<int>(entries.size());
                push({Block::Gamma, 0, 0, c}, 0.0, 0.0, -1);
                continue;
            }
            const NormalPrior p = pr.gamma.for_kind(gamma_kinds[c]);
            push({Block::Gamma, 0, 0, c}, p.mean, p.sd, pr.horseshoe ? K : -1);
        }
        if (pr.horseshoe) {
            layout.lambda_offset_ = static_cast<int>(entries.size());
            for (int g = 0; g < K + 1; ++g) push({Block::Lambda, 0, 0, g}, 0.0, 0.0, -1);
        }

        layout.entries_ = std::move(entries);
        layout.prior_mean_ = Eigen::Map<VectorXd>(mean.data(), mean.size());
        layout.prior_sd_ = Eigen::Map<VectorXd>(sd.data(), sd.size());
        layout.group_ = std::move(group);
        return layout;
    }

    int dim() const { return static_cast<int>(entries_.size()); }
    int n_lambda() const { return horseshoe_ ? K_ + 1 : 0; }
    int lambda_offset() const { return lambda_offset_; }
    int gamma_intercept_index() const { return gamma_intercept_index_; }
    bool horseshoe() const { return horseshoe_; }
    double tau() const { return tau_; }
    const Mask& mask() const { return mask_; }
    const std::vector<Entry>& entries() const { return entries_; }
    const VectorXd& prior_mean() const { return prior_mean_; }
    const VectorXd& prior_sd() const { return prior_sd_; }
    const std::vector<int>& group() const { return group_; }

    Params unpack(const VectorXd& theta) const {
        if (theta.size() != dim())
            throw config_error("parameter vector has length " + std::to_string(theta.size()) +
                               ", layout needs " + std::to_string(dim()));
        Params p;
        p.A.assign(P_, MatrixXd::Zero(K_, K_));
        p.B.assign(Q_, MatrixXd::Zero(K_, K_));
        p.beta = MatrixXd::Zero(K_, r_mean_);
        p.gamma = VectorXd::Zero(r_scale_);
        p.log_lambda = VectorXd::Zero(n_lambda());
        p.gamma_intercept_log = gamma_intercept_log_;
        for (int i = 0; i < dim(); ++i) {
            const Entry& e = entries_[i];
            switch (e.block) {
                case Block::A: p.A[e.lag](e.row, e.col) = theta[i]; break;
                case Block::B: p.B[e.lag](e.row, e.col) = theta[i]; break;
                case Block::Beta: p.beta(e.row, e.col) = theta[i]; break;
                case Block::Gamma: p.gamma[e.col] = theta[i]; break;
                case Block::Lambda: p.log_lambda[e.col] = theta[i]; break;
            }
        }
        return p;
    }

    VectorXd pack(const Params& p) const {
        VectorXd theta(dim());
        for (int i = 0; i < dim(); ++i) {
            const Entry& e = entries_[i];
            switch (e.block) {
                case Block::A: theta[i] = p.A[e.lag](e.row, e.col); break;
                case Block::B: theta[i] = p.B[e.lag](e.row, e.col); break;
                case Block::Beta: theta[i] = p.beta(e.row, e.col); break;
                case Block::Gamma: theta[i] = p.gamma[e.col]; break;
                case Block::Lambda: theta[i] = p.log_lambda[e.col]; break;
            }
        }
        return theta;
    }

    // Gradient counterpart to unpack: collapse block gradients onto the free
    // coordinates, discarding masked entries.
    VectorXd pack_grad(const std::vector<MatrixXd>& gA, const std::vector<MatrixXd>& gB,
                       const MatrixXd& gbeta, const VectorXd& ggamma,
                       const VectorXd& glog_lambda) const {
        VectorXd grad(dim());
        for (int i = 0; i < dim(); ++i) {
            const Entry& e = entries_[i];
            switch (e.block) {
                case Block::A: grad[i] = gA[e.lag](e.row, e.col); break;
                case Block::B: grad[i] = gB[e.lag](e.row, e.col); break;
                case Block::Beta: grad[i] = gbeta(e.row, e.col); break;
                case Block::Gamma: grad[i] = ggamma[e.col]; break;
                case Block::Lambda: grad[i] = glog_lambda[e.col]; break;
            }
        }
        return grad;
    }

    std::string name(int i) const {
        const Entry& e = entries_[i];
        switch (e.block) {
            case Block::A:
                return "a" + std::to_string(e.lag + 1) + "_" + std::to_string(e.row + 1) + "_" +
                       std::to_string(e.col + 1);
            case Block::B:
                return "b" + std::to_string(e.lag + 1) + "_" + std::to_string(e.row + 1) + "_" +
                       std::to_string(e.col + 1);
            case Block::Beta:
                return "beta_" + std::to_string(e.row + 1) + "_" + std::to_string(e.col + 1);
            case Block::Gamma:
                return (i == gamma_intercept_index_ ? "log_gamma_" : "gamma_") +
                       std::to_string(e.col + 1);
            case Block::Lambda:
                return "log_lambda_" + std::to_string(e.col + 1);
        }
        return "theta_" + std::to_string(i + 1);
    }

    std::vector<std::string> names() const {
        std::vector<std::string> out;
        out.reserve(dim());
        for (int i = 0; i < dim(); ++i) out.push_back(name(i));
        return out;
    }

    double gamma_shape() const { return gamma_shape_; }
    double gamma_rate() const { return gamma_rate_; }

  private:
    int K_ = 0, P_ = 0, Q_ = 0;
    int r_mean_ = 0, r_scale_ = 0;
    Mask mask_;
    bool horseshoe_ = false;
    double tau_ = 1.0;
    bool gamma_intercept_log_ = false;
    double gamma_shape_ = 0.0, gamma_rate_ = 0.0;
    int gamma_intercept_index_ = -1;
    int lambda_offset_ = -1;
    std::vector<Entry> entries_;
    VectorXd prior_mean_, prior_sd_;
    std::vector<int> group_;
};

} // namespace bdarma

#endif
