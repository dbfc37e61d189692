#ifndef BDARMA_DESIGN_HPP
#define BDARMA_DESIGN_HPP

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "bdarma/errors.hpp"

namespace bdarma {

// Column generators for the linear predictors. Rows are produced from the
// 1-based time index, so the same spec extends past the end of the training
// window when forecasting.
struct DesignTerm {
    enum class Kind { Intercept, Trend, Fourier };
    Kind kind = Kind::Intercept;
    double period = 0.0; // Fourier only
    int harmonics = 0;   // Fourier only

    int columns() const {
        switch (kind) {
            case Kind::Intercept: return 1;
            case Kind::Trend: return 1;
            case Kind::Fourier: return 2 * harmonics;
        }
        return 0;
    }
};

inline constexpr double kTrendUnit = 365.25; // trend column is t / kTrendUnit

class DesignSpec {
  public:
    DesignSpec() = default;
    explicit DesignSpec(std::vector<DesignTerm> terms) : terms_(std::move(terms)) {}

    static DesignSpec intercept_only() {
        return DesignSpec({DesignTerm{DesignTerm::Kind::Intercept, 0.0, 0}});
    }

    // Grammar: comma-separated terms, each one of
    //   intercept | trend | fourier:<period>:<harmonics>
    // An empty string yields a zero-column design.
    static DesignSpec parse(const std::string& text) {
        std::vector<DesignTerm> terms;
        std::stringstream ss(text);
        std::string item;
        while (std::getline(ss, item, ',')) {
            item.erase(0, item.find_first_not_of(" \t"));
            item.erase(item.find_last_not_of(" \t") + 1);
            if (item.empty()) continue;
            if (item == "intercept") {
                terms.push_back({DesignTerm::Kind::Intercept, 0.0, 0});
            } else if (item == "trend") {
                terms.push_back({DesignTerm::Kind::Trend, 0.0, 0});
            } else if (item.rfind("fourier:", 0) == 0) {
                const auto rest = item.substr(8);
                const auto colon = rest.find(':');
                if (colon == std::string::npos)
                    throw config_error("fourier term needs period and harmonics: " + item);
                double period = 0.0;
                int harmonics = 0;
                try {
                    period = std::stod(rest.substr(0, colon));
                    harmonics = std::stoi(rest.substr(colon + 1));
                } catch (const std::exception&) {
                    throw config_error("cannot parse fourier term: " + item);
                }
                if (!(period > 0.0) || harmonics < 1)
                    throw config_error("fourier term needs period > 0 and harmonics >= 1: " + item);
                terms.push_back({DesignTerm::Kind::Fourier, period, harmonics});
            } else {
                throw config_error("unknown design term: " + item);
            }
        }
        return DesignSpec(std::move(terms));
    }

    std::string to_string() const {
        std::string out;
        for (const auto& term : terms_) {
            if (!out.empty()) out += ",";
            switch (term.kind) {
                case DesignTerm::Kind::Intercept: out += "intercept"; break;
                case DesignTerm::Kind::Trend: out += "trend"; break;
                case DesignTerm::Kind::Fourier: {
                    std::ostringstream os;
                    os << "fourier:" << term.period << ":" << term.harmonics;
                    out += os.str();
                    break;
                }
            }
        }
        return out;
    }

    const std::vector<DesignTerm>& terms() const { return terms_; }

    int columns() const {
        int n = 0;
        for (const auto& term : terms_) n += term.columns();
        return n;
    }

    Eigen::VectorXd row(double t) const {
        Eigen::VectorXd out(columns());
        int c = 0;
        for (const auto& term : terms_) {
            switch (term.kind) {
                case DesignTerm::Kind::Intercept:
                    out[c++] = 1.0;
                    break;
                case DesignTerm::Kind::Trend:
                    out[c++] = t / kTrendUnit;
                    break;
                case DesignTerm::Kind::Fourier:
                    for (int k = 1; k <= term.harmonics; ++k) {
                        const double w = 2.0 * std::numbers::pi * k * t / term.period;
                        out[c++] = std::sin(w);
                        out[c++] = std::cos(w);
                    }
                    break;
            }
        }
        return out;
    }

    // rows t = 1..T stacked.
    Eigen::MatrixXd rows(int T) const {
        Eigen::MatrixXd out(T, columns());
        for (int t = 1; t <= T; ++t) out.row(t - 1) = row(static_cast<double>(t)).transpose();
        return out;
    }

    // Term kind of each column, used to look up per-kind priors.
    std::vector<DesignTerm::Kind> column_kinds() const {
        std::vector<DesignTerm::Kind> kinds;
        kinds.reserve(columns());
        for (const auto& term : terms_)
            for (int c = 0; c < term.columns(); ++c) kinds.push_back(term.kind);
        return kinds;
    }

    std::vector<std::string> column_names() const {
        std::vector<std::string> names;
        int fi = 0;
        for (const auto& term : terms_) {
            switch (term.kind) {
                case DesignTerm::Kind::Intercept: names.push_back("intercept"); break;
                case DesignTerm::Kind::Trend: names.push_back("trend"); break;
                case DesignTerm::Kind::Fourier: {
                    ++fi;
                    for (int k = 1; k <= term.harmonics; ++k) {
                        const std::string tag = "f" + std::to_string(fi) + "_" + std::to_string(k);
                        names.push_back("sin_" + tag);
                        names.push_back("cos_" + tag);
                    }
                    break;
                }
            }
        }
        return names;
    }

  private:
    std::vector<DesignTerm> terms_;
};

} // namespace bdarma

#endif
