// k-wise independent polynomial hashing over the Mersenne prime 2^61 - 1.
// Backs the sketch sign rows and the sparse embedding bucket choices.
#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "jl/core.hpp"

namespace jl {

constexpr std::uint64_t kMersenne61 = (1ULL << 61) - 1;

namespace detail {

inline std::uint64_t mulmod61(std::uint64_t a, std::uint64_t b) {
    const unsigned __int128 t = static_cast<unsigned __int128>(a) * b;
    std::uint64_t s = (static_cast<std::uint64_t>(t) & kMersenne61) +
                      static_cast<std::uint64_t>(t >> 61);
    if (s >= kMersenne61) s -= kMersenne61;
    return s;
}

inline std::uint64_t addmod61(std::uint64_t a, std::uint64_t b) {
    std::uint64_t s = a + b;  // both < 2^61, no overflow
    if (s >= kMersenne61) s -= kMersenne61;
    return s;
}

}  // namespace detail

// Degree k-1 polynomial with uniform coefficients in [0, p), evaluated mod p
// then mod the range w. k in {2, 4} gives pairwise / 4-wise independence.
// A zero leading coefficient is allowed; uniformity over all k coefficients
// is what the independence argument needs.
class PolyHash {
  public:
    PolyHash(unsigned k, std::uint64_t range, std::uint64_t seed)
        : range_(range) {
        if (k != 2 && k != 4)
            throw std::invalid_argument("PolyHash: k must be 2 or 4");
        if (range < 1) throw std::invalid_argument("PolyHash: range must be >= 1");
        Rng rng(seed);
        coeffs_.resize(k);
        for (auto& c : coeffs_) c = uniform_mod_p(rng);
    }

    // Explicit coefficients, highest degree first.
    PolyHash(std::vector<std::uint64_t> coeffs, std::uint64_t range)
        : coeffs_(std::move(coeffs)), range_(range) {
        if (coeffs_.size() != 2 && coeffs_.size() != 4)
            throw std::invalid_argument("PolyHash: k must be 2 or 4");
        if (range < 1) throw std::invalid_argument("PolyHash: range must be >= 1");
        for (auto c : coeffs_)
            if (c >= kMersenne61)
                throw std::invalid_argument("PolyHash: coefficient >= p");
    }

    std::uint64_t operator()(std::uint64_t key) const {
        if (key >= kMersenne61) throw std::domain_error("PolyHash: key >= p");
        std::uint64_t acc = 0;
        for (auto c : coeffs_)
            acc = detail::addmod61(detail::mulmod61(acc, key), c);
        return acc % range_;
    }

    std::uint64_t range() const { return range_; }
    const std::vector<std::uint64_t>& coefficients() const { return coeffs_; }

  private:
    static std::uint64_t uniform_mod_p(Rng& rng) {
        std::uint64_t v;
        do {
            v = rng.next_u64() >> 3;  // 61 bits
        } while (v >= kMersenne61);
        return v;
    }

    std::vector<std::uint64_t> coeffs_;
    std::uint64_t range_;
};

// Rademacher sign from the low bit of a width-2 polynomial hash:
// sign(key) = 2 * (h(key) mod 2) - 1. 4-wise independent by construction.
class SignHash {
  public:
    explicit SignHash(std::uint64_t seed) : inner_(4, 2, seed) {}
    explicit SignHash(PolyHash inner) : inner_(std::move(inner)) {
        if (inner_.range() != 2)
            throw std::invalid_argument("SignHash: inner range must be 2");
    }

    int operator()(std::uint64_t key) const {
        return inner_(key) ? 1 : -1;
    }

    const PolyHash& inner() const { return inner_; }

  private:
    PolyHash inner_;
};

}  // namespace jl
