#ifndef BDARMA_RNG_HPP
#define BDARMA_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace bdarma {

// 64-bit finalizer used for seed fan-out and input hashing.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

// Deterministic random stream with explicit hierarchical splitting.
//
// A stream is identified by its seed; `child(tag)` derives an independent
// stream from (seed, tag) alone, never from consumption state. Work items
// (chains, replicates, forecast draws) each get a child keyed by their
// index, so results do not depend on thread scheduling or evaluation order.
// All variate algorithms are implemented here rather than taken from
// <random> distributions so that draws are identical across standard
// library implementations.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : seed_(seed), engine_(splitmix64(seed)) {}

    Rng child(std::uint64_t tag) const {
        return Rng(splitmix64(seed_ ^ splitmix64(tag + 0x517cc1b727220a95ull)));
    }
    Rng child(std::uint64_t tag_a, std::uint64_t tag_b) const {
        return child(tag_a).child(tag_b);
    }
    Rng child(std::string_view tag) const { return child(hash_tag(tag)); }
    Rng child(std::string_view tag, std::uint64_t idx) const {
        return child(hash_tag(tag)).child(idx);
    }
    Rng child(std::string_view tag_a, std::string_view tag_b) const {
        return child(hash_tag(tag_a)).child(hash_tag(tag_b));
    }

    std::uint64_t seed() const { return seed_; }

    std::uint64_t next_u64() { return engine_(); }

    // uniform on [0,1)
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // integer in [0, n)
    std::uint64_t uniform_index(std::uint64_t n) {
        return static_cast<std::uint64_t>(uniform() * static_cast<double>(n)) % n;
    }

    // standard normal, Marsaglia polar method
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform() - 1.0;
            v = 2.0 * uniform() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double f = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * f;
        have_spare_ = true;
        return u * f;
    }

    double exponential() {
        double u;
        do {
            u = uniform();
        } while (u == 0.0);
        return -std::log(u);
    }

    // Gamma(shape, scale=1) via Marsaglia-Tsang squeeze; shapes below one use
    // the boosting identity G(a) = G(a+1) * U^(1/a) to avoid rejection loops
    // at small shape.
    double gamma(double shape) {
        if (shape < 1.0) {
            double u;
            do {
                u = uniform();
            } while (u == 0.0);
            return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
        }
        const double d = shape - 1.0 / 3.0;
        const double c = 1.0 / (3.0 * std::sqrt(d));
        for (;;) {
            double x, v;
            do {
                x = normal();
                v = 1.0 + c * x;
            } while (v <= 0.0);
            v = v * v * v;
            const double u = uniform();
            const double x2 = x * x;
            if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
            if (u > 0.0 && std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
        }
    }

  private:
    static std::uint64_t hash_tag(std::string_view tag) {
        std::uint64_t h = 0xcbf29ce484222325ull;
        for (const char c : tag) {
            h ^= static_cast<unsigned char>(c);
            h *= 0x100000001b3ull;
        }
        return h;
    }

    std::uint64_t seed_;
    std::mt19937_64 engine_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

} // namespace bdarma

#endif
