// Shared parameter types, seeded randomness, target-dimension formulas and
// distortion accounting used by every embedding in the library.
#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

namespace jl {

using Vector = std::vector<double>;

// Parameters shared by all constructions. m may exceed d: callers are free to
// oversample the target dimension.
struct JlParams {
    std::size_t d = 1;         // source dimension
    std::size_t m = 1;         // target dimension
    double eps = 0.1;          // distortion in (0,1)
    double delta = 0.01;       // failure probability in (0,1)
    std::uint64_t seed = 0;

    void validate() const {
        if (d < 1) throw std::invalid_argument("JlParams: d must be >= 1");
        if (m < 1) throw std::invalid_argument("JlParams: m must be >= 1");
        if (!(eps > 0.0 && eps < 1.0))
            throw std::invalid_argument("JlParams: eps must lie in (0,1)");
        if (!(delta > 0.0 && delta < 1.0))
            throw std::invalid_argument("JlParams: delta must lie in (0,1)");
    }
};

// ---------------------------------------------------------------------------
// Seeded randomness.
//
// Everything sampled in this library is a pure function of a 64-bit seed, so
// every experiment is replayable bit-for-bit. The generator is SplitMix64:
// the state advances by the golden-ratio increment 0x9E3779B97F4A7C15 and the
// output is the murmur-style finalizer of the new state.
// ---------------------------------------------------------------------------

constexpr std::uint64_t kGoldenGamma = 0x9e3779b97f4a7c15ULL;

constexpr std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() { return mix64(state_ += kGoldenGamma); }

    // Uniform in [0,1), 53 bits of precision.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform in (0,1]; never zero, safe under log().
    double next_double_pos() {
        return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    }

    // Unbiased uniform integer in [0, n) by rejection on the top of the range.
    std::uint64_t next_below(std::uint64_t n) {
        if (n == 0) throw std::invalid_argument("Rng::next_below: n == 0");
        const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                    std::numeric_limits<std::uint64_t>::max() % n;
        std::uint64_t v;
        do {
            v = next_u64();
        } while (v >= limit);
        return v % n;
    }

    // Rademacher sign. Draws one u64 per 64 signs.
    int next_sign() {
        if (bit_count_ == 0) {
            bit_buffer_ = next_u64();
            bit_count_ = 64;
        }
        const int s = (bit_buffer_ & 1u) ? 1 : -1;
        bit_buffer_ >>= 1;
        --bit_count_;
        return s;
    }

    // Standard normal via Box-Muller. Pairs are generated from two uniforms;
    // the sine partner is cached, so consumption of the underlying u64 stream
    // is two draws per two normals.
    double next_gaussian() {
        if (have_cached_) {
            have_cached_ = false;
            return cached_;
        }
        const double u1 = next_double_pos();
        const double u2 = next_double();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        cached_ = r * std::sin(a);
        have_cached_ = true;
        return r * std::cos(a);
    }

  private:
    std::uint64_t state_;
    std::uint64_t bit_buffer_ = 0;
    int bit_count_ = 0;
    double cached_ = 0.0;
    bool have_cached_ = false;
};

// Derived seed for index i. Stable contract: the SplitMix64 finalizer applied
// to master + (i+1)*0x9E3779B97F4A7C15. The finalizer is a bijection and the
// gamma is odd, so distinct (master, i) with equal master map to distinct
// seeds, and distinct masters at equal i map to distinct seeds.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t i) {
    return mix64(master + (i + 1) * kGoldenGamma);
}

// A counter over derived seeds. next() hands out derive_seed(master, index++).
struct SeedStream {
    std::uint64_t master = 0;
    std::uint64_t index = 0;

    std::uint64_t next() { return derive_seed(master, index++); }
    std::uint64_t at(std::uint64_t i) const { return derive_seed(master, i); }
};

// ---------------------------------------------------------------------------
// Target-dimension formulas.
// ---------------------------------------------------------------------------

// m = ceil(8 (eps^2 - 2 eps^3/3)^{-1} ln n), clamped to >= 1. n is the point
// count; a real-valued n is accepted so callers can pass derived quantities.
inline std::size_t target_dim_fm(double eps, double n) {
    if (!(eps > 0.0 && eps < 1.0))
        throw std::invalid_argument("target_dim_fm: eps must lie in (0,1)");
    if (!(n >= 1.0)) throw std::invalid_argument("target_dim_fm: n must be >= 1");
    const double denom = eps * eps - 2.0 * eps * eps * eps / 3.0;
    const double raw = std::ceil(8.0 / denom * std::log(n));
    return raw < 1.0 ? 1 : static_cast<std::size_t>(raw);
}

// Distributional sizing m = ceil(c eps^-2 ln(2/delta)), clamped to >= 1.
// The leading constant defaults to 8 to match the pairwise union-bound use;
// it is exposed because only Theta(.) is dictated.
inline std::size_t target_dim_union(double eps, double delta, double lead = 8.0) {
    if (!(eps > 0.0 && eps < 1.0))
        throw std::invalid_argument("target_dim_union: eps must lie in (0,1)");
    if (!(delta > 0.0 && delta < 1.0))
        throw std::invalid_argument("target_dim_union: delta must lie in (0,1)");
    const double raw = std::ceil(lead / (eps * eps) * std::log(2.0 / delta));
    return raw < 1.0 ? 1 : static_cast<std::size_t>(raw);
}

// ---------------------------------------------------------------------------
// Vector helpers.
// ---------------------------------------------------------------------------

inline double squared_norm(const Vector& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return s;
}

inline double dot(const Vector& a, const Vector& b) {
    if (a.size() != b.size()) throw std::invalid_argument("dot: dimension mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

// ||y||^2 / ||x||^2 where y is the embedding of x. Dimensions may differ.
inline double sq_norm_ratio(const Vector& x, const Vector& y) {
    const double nx = squared_norm(x);
    if (nx == 0.0) throw std::domain_error("sq_norm_ratio: zero input vector");
    return squared_norm(y) / nx;
}

// Compensated (Kahan) accumulator; order-independent enough for the
// fixed-chunk reductions used by the harness.
struct KahanSum {
    double sum = 0.0;
    double comp = 0.0;

    void add(double v) {
        const double y = v - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
};

// Monte Carlo distortion tally for one (construction, generator) pair.
struct DistortionStats {
    std::size_t trials = 0;
    std::size_t failures = 0;   // trials with | ||f(x)||^2 - ||x||^2 | > eps ||x||^2
    double mean_sq_ratio = 0.0;
    double failure_rate = 0.0;
    double ci95_halfwidth = 0.0;  // normal-approximation binomial half-width

    void finalize(const KahanSum& ratio_sum) {
        mean_sq_ratio = trials ? ratio_sum.sum / static_cast<double>(trials) : 0.0;
        failure_rate = trials ? static_cast<double>(failures) / static_cast<double>(trials) : 0.0;
        ci95_halfwidth = trials ? 1.96 * std::sqrt(failure_rate * (1.0 - failure_rate) /
                                                   static_cast<double>(trials))
                                : 0.0;
    }
};

}  // namespace jl
