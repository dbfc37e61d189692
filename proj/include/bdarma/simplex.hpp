#ifndef BDARMA_SIMPLEX_HPP
#define BDARMA_SIMPLEX_HPP

#include <Eigen/Dense>
#include <cmath>
#include <string>

#include "bdarma/errors.hpp"

namespace bdarma {

using Eigen::MatrixXd;
using Eigen::VectorXd;

inline constexpr double kSimplexSumTol = 1e-10;

enum class ZeroPolicy { Reject, Epsilon };
inline constexpr double kZeroEpsilon = 1e-6;

enum class Link { Alr, Clr, Ilr };

// A point on the open simplex: J strictly positive proportions summing to one.
class Composition {
  public:
    Composition() = default;

    // Validates the simplex invariants; `policy` controls handling of exact
    // zeros (reject with a data_error naming the index, or replace with
    // kZeroEpsilon and renormalize).
    static Composition from(VectorXd values, ZeroPolicy policy = ZeroPolicy::Reject) {
        if (values.size() < 2) throw data_error("composition needs at least 2 components");
        for (Eigen::Index j = 0; j < values.size(); ++j) {
            if (!std::isfinite(values[j]) || values[j] < 0.0)
                throw data_error("composition component " + std::to_string(j + 1) +
                                 " is negative or non-finite");
            if (values[j] == 0.0) {
                if (policy == ZeroPolicy::Reject)
                    throw data_error("composition component " + std::to_string(j + 1) +
                                     " is exactly zero");
                values[j] = kZeroEpsilon;
            }
        }
        if (policy == ZeroPolicy::Epsilon) values /= values.sum();
        const double sum = values.sum();
        if (std::abs(sum - 1.0) > kSimplexSumTol)
            throw data_error("composition does not sum to 1 (sum = " + std::to_string(sum) + ")");
        for (Eigen::Index j = 0; j < values.size(); ++j) {
            if (values[j] >= 1.0)
                throw data_error("composition component " + std::to_string(j + 1) +
                                 " is not strictly below 1");
        }
        Composition c;
        c.values_ = std::move(values);
        return c;
    }

    // For vectors of positive parts that are not yet normalized.
    static Composition from_unnormalized(VectorXd parts, ZeroPolicy policy = ZeroPolicy::Reject) {
        const double sum = parts.sum();
        if (!(sum > 0.0)) throw data_error("composition parts must have a positive sum");
        return from(parts / sum, policy);
    }

    const VectorXd& values() const { return values_; }
    double operator[](Eigen::Index j) const { return values_[j]; }
    Eigen::Index size() const { return values_.size(); }

  private:
    VectorXd values_;
};

// Unconstrained log-ratio coordinates with the 1-based reference component
// whose slot is omitted.
struct LogRatioVector {
    VectorXd values; // length J-1
    int reference = 0;
};

// Mean/scale parameterization of the Dirichlet: alpha = scale * mean.
struct DirichletParams {
    Composition mean;
    double scale = 1.0;

    static DirichletParams from(Composition mean, double scale) {
        if (!(scale > 0.0) || !std::isfinite(scale))
            throw data_error("Dirichlet scale must be positive and finite");
        return DirichletParams{std::move(mean), scale};
    }
};

namespace detail {

inline void check_reference(Eigen::Index J, int reference) {
    if (reference < 1 || reference > J)
        throw config_error("reference component " + std::to_string(reference) +
                           " out of range for " + std::to_string(J) + " components");
}

inline void check_positive(const VectorXd& y, const char* op) {
    for (Eigen::Index j = 0; j < y.size(); ++j)
        if (!(y[j] > 0.0))
            throw data_error(std::string(op) + ": component " + std::to_string(j + 1) +
                             " is not strictly positive");
}

} // namespace detail

// alr(y)_j = log(y_j / y_ref) for j != ref, in component order.
inline VectorXd alr(const VectorXd& y, int reference) {
    detail::check_reference(y.size(), reference);
    detail::check_positive(y, "alr");
    const Eigen::Index J = y.size();
    const double log_ref = std::log(y[reference - 1]);
    VectorXd out(J - 1);
    Eigen::Index k = 0;
    for (Eigen::Index j = 0; j < J; ++j) {
        if (j == reference - 1) continue;
        out[k++] = std::log(y[j]) - log_ref;
    }
    return out;
}

inline VectorXd alr(const Composition& y, int reference) { return alr(y.values(), reference); }

// Inverse alr via a max-subtracted softmax with an implicit zero in the
// reference slot, so arbitrarily large linear predictors stay finite.
inline VectorXd alr_inv_values(const VectorXd& eta, int reference) {
    const Eigen::Index J = eta.size() + 1;
    detail::check_reference(J, reference);
    VectorXd full(J);
    Eigen::Index k = 0;
    for (Eigen::Index j = 0; j < J; ++j) {
        if (j == reference - 1) {
            full[j] = 0.0;
        } else {
            full[j] = eta[k++];
        }
    }
    const double mx = full.maxCoeff();
    full = (full.array() - mx).exp();
    return full / full.sum();
}

inline Composition alr_inv(const VectorXd& eta, int reference) {
    return Composition::from(alr_inv_values(eta, reference));
}

inline Composition alr_inv(const LogRatioVector& eta) {
    return alr_inv(eta.values, eta.reference);
}

// clr(y)_j = log(y_j / g(y)) with g the geometric mean; sums to zero.
inline VectorXd clr(const VectorXd& y) {
    detail::check_positive(y, "clr");
    VectorXd logs = y.array().log();
    return logs.array() - logs.mean();
}

inline VectorXd clr(const Composition& y) { return clr(y.values()); }

// Orthonormal pivot basis for the default sequential binary partition
// S_j = {j}, H_j = {j+1..J}: ilr(y) = basis' * clr(y).
inline MatrixXd ilr_basis(Eigen::Index J) {
    MatrixXd V = MatrixXd::Zero(J, J - 1);
    for (Eigen::Index j = 0; j < J - 1; ++j) {
        const double r = static_cast<double>(J - 1 - j);
        const double a = std::sqrt(r / (r + 1.0));
        V(j, j) = a;
        for (Eigen::Index i = j + 1; i < J; ++i) V(i, j) = -a / r;
    }
    return V;
}

inline VectorXd ilr(const VectorXd& y) {
    detail::check_positive(y, "ilr");
    return ilr_basis(y.size()).transpose() * clr(y);
}

inline VectorXd ilr(const Composition& y) { return ilr(y.values()); }

// J x (J-1) map L such that the inverse link is softmax(L * eta). For every
// link, softmax(L * link(y)) reproduces y exactly.
inline MatrixXd link_matrix(Link link, Eigen::Index J, int reference) {
    detail::check_reference(J, reference);
    MatrixXd L = MatrixXd::Zero(J, J - 1);
    switch (link) {
        case Link::Alr: {
            Eigen::Index k = 0;
            for (Eigen::Index j = 0; j < J; ++j) {
                if (j == reference - 1) continue;
                L(j, k++) = 1.0;
            }
            break;
        }
        case Link::Clr: {
            Eigen::Index k = 0;
            for (Eigen::Index j = 0; j < J; ++j) {
                if (j == reference - 1) {
                    L.row(j).setConstant(-1.0);
                } else {
                    L(j, k++) = 1.0;
                }
            }
            break;
        }
        case Link::Ilr:
            L = ilr_basis(J);
            break;
    }
    return L;
}

// Forward link transform to the (J-1)-dimensional coordinate space. The CLR
// variant drops the reference coordinate of the centered vector so that the
// linear predictor keeps dimension J-1.
inline VectorXd link_forward(Link link, const VectorXd& y, int reference) {
    switch (link) {
        case Link::Alr:
            return alr(y, reference);
        case Link::Clr: {
            detail::check_reference(y.size(), reference);
            const VectorXd c = clr(y);
            VectorXd out(y.size() - 1);
            Eigen::Index k = 0;
            for (Eigen::Index j = 0; j < y.size(); ++j) {
                if (j == reference - 1) continue;
                out[k++] = c[j];
            }
            return out;
        }
        case Link::Ilr:
            return ilr(y);
    }
    throw config_error("unknown link");
}

inline VectorXd link_inverse_values(Link link, const VectorXd& eta, int reference) {
    if (link == Link::Alr) return alr_inv_values(eta, reference); // avoids the matrix product
    const Eigen::Index J = eta.size() + 1;
    VectorXd full = link_matrix(link, J, reference) * eta;
    const double mx = full.maxCoeff();
    full = (full.array() - mx).exp();
    return full / full.sum();
}

inline Composition link_inverse(Link link, const VectorXd& eta, int reference) {
    return Composition::from(link_inverse_values(link, eta, reference));
}

} // namespace bdarma

#endif
