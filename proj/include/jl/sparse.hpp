// Sparse embeddings: feature hashing, block and graph constructions with s
// nonzeros per column, and the duplicate-then-hash construction realized as
// feature hashing over the duplicated vector. Also the l_inf/l_2 threshold
// formula for feature hashing and the derived duplicate-then-hash sparsity.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <memory>
#include <stdexcept>
#include <vector>

#include "jl/core.hpp"
#include "jl/hashing.hpp"

namespace jl {

enum class SparseKind { FeatureHashing, Block, Graph, Dks };

class SparseTransform {
  public:
    // Exactly one nonzero per column; a 4-wise polynomial picks the row and a
    // 4-wise sign hash the sign. Degree 3 matters for the row choice: the
    // degree-1 family collides along arithmetic progressions, which skews the
    // spike-shaped hard instances measured by the harness.
    static SparseTransform feature_hashing(const JlParams& p) {
        p.validate();
        SparseTransform t(SparseKind::FeatureHashing, p, 1, p.m);
        const PolyHash row_hash(4, p.m, derive_seed(p.seed, 0));
        const SignHash sign_hash(derive_seed(p.seed, 1));
        t.rows_.resize(p.d);
        t.signs_.resize(p.d);
        for (std::size_t i = 0; i < p.d; ++i) {
            t.rows_[i] = static_cast<std::uint32_t>(row_hash(i));
            t.signs_[i] = static_cast<std::int8_t>(sign_hash(i));
        }
        return t;
    }

    // One nonzero in each of s consecutive blocks of length m/s. When s does
    // not divide m the output is padded up to the next multiple of s.
    static SparseTransform block(const JlParams& p, std::size_t s) {
        p.validate();
        if (s < 1 || s > p.m)
            throw std::invalid_argument("block: s must lie in [1, m]");
        const std::size_t padded_m = (p.m + s - 1) / s * s;
        const std::size_t block_len = padded_m / s;
        SparseTransform t(SparseKind::Block, p, s, padded_m);
        Rng rng(p.seed);
        t.rows_.resize(p.d * s);
        t.signs_.resize(p.d * s);
        for (std::size_t i = 0; i < p.d; ++i) {
            for (std::size_t b = 0; b < s; ++b) {
                t.rows_[i * s + b] =
                    static_cast<std::uint32_t>(b * block_len + rng.next_below(block_len));
                t.signs_[i * s + b] = static_cast<std::int8_t>(rng.next_sign());
            }
        }
        return t;
    }

    // s distinct rows per column, sampled without replacement (Floyd).
    static SparseTransform graph(const JlParams& p, std::size_t s) {
        p.validate();
        if (s < 1 || s > p.m)
            throw std::invalid_argument("graph: s must lie in [1, m]");
        SparseTransform t(SparseKind::Graph, p, s, p.m);
        Rng rng(p.seed);
        t.rows_.resize(p.d * s);
        t.signs_.resize(p.d * s);
        for (std::size_t i = 0; i < p.d; ++i) {
            std::uint32_t* col = t.rows_.data() + i * s;
            std::size_t filled = 0;
            for (std::size_t j = p.m - s; j < p.m; ++j) {
                const auto v = static_cast<std::uint32_t>(rng.next_below(j + 1));
                const bool taken =
                    std::find(col, col + filled, v) != col + filled;
                col[filled++] = taken ? static_cast<std::uint32_t>(j) : v;
            }
            for (std::size_t b = 0; b < s; ++b)
                t.signs_[i * s + b] = static_cast<std::int8_t>(rng.next_sign());
        }
        return t;
    }

    // Duplicate each coordinate s times, scale by 1/sqrt(s), then feature-hash
    // the enlarged vector. Collisions among a coordinate's s buckets are
    // allowed; that is the defining difference from block/graph.
    static SparseTransform dks(const JlParams& p, std::size_t s) {
        p.validate();
        if (s < 1) throw std::invalid_argument("dks: s must be >= 1");
        SparseTransform t(SparseKind::Dks, p, s, p.m);
        JlParams inner = p;
        inner.d = p.d * s;
        t.inner_fh_ = std::make_shared<SparseTransform>(feature_hashing(inner));
        return t;
    }

    Vector apply(const Vector& x) const {
        if (x.size() != params_.d)
            throw std::invalid_argument("SparseTransform::apply: dimension mismatch");
        if (kind_ == SparseKind::Dks)
            return inner_fh_->apply(duplicate_scale_impl(x, s_));
        Vector y(out_dim_, 0.0);
        for (std::size_t i = 0; i < params_.d; ++i) {
            const double xi = x[i];
            if (xi == 0.0) continue;
            for (std::size_t b = 0; b < s_; ++b) {
                const std::size_t idx = i * s_ + b;
                y[rows_[idx]] += static_cast<double>(signs_[idx]) * xi;
            }
        }
        if (s_ > 1) {
            const double scale = 1.0 / std::sqrt(static_cast<double>(s_));
            for (auto& v : y) v *= scale;
        }
        return y;
    }

    SparseKind kind() const { return kind_; }
    const JlParams& params() const { return params_; }
    std::size_t sparsity() const { return s_; }
    std::size_t output_dim() const { return out_dim_; }
    const std::vector<std::uint32_t>& nonzero_rows() const { return rows_; }
    const std::vector<std::int8_t>& nonzero_signs() const { return signs_; }
    const SparseTransform& inner_feature_hashing() const {
        if (!inner_fh_) throw std::logic_error("not a DKS transform");
        return *inner_fh_;
    }

    static Vector duplicate_scale_impl(const Vector& x, std::size_t s);

  private:
    SparseTransform(SparseKind kind, const JlParams& p, std::size_t s, std::size_t out_dim)
        : kind_(kind), params_(p), s_(s), out_dim_(out_dim) {}

    SparseKind kind_;
    JlParams params_;
    std::size_t s_;
    std::size_t out_dim_;
    std::vector<std::uint32_t> rows_;   // d*s nonzero rows, column-major groups
    std::vector<std::int8_t> signs_;
    std::shared_ptr<const SparseTransform> inner_fh_;  // DKS only
};

// x'_{(i-1)s+j} = x_i / sqrt(s); norm-preserving, output dimension s*d.
inline Vector duplicate_scale(const Vector& x, std::size_t s) {
    return SparseTransform::duplicate_scale_impl(x, s);
}

inline Vector SparseTransform::duplicate_scale_impl(const Vector& x, std::size_t s) {
    if (s < 1) throw std::invalid_argument("duplicate_scale: s must be >= 1");
    if (s == 1) return x;
    Vector out(x.size() * s);
    const double scale = 1.0 / std::sqrt(static_cast<double>(s));
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double v = x[i] * scale;
        for (std::size_t j = 0; j < s; ++j) out[i * s + j] = v;
    }
    return out;
}

// Constants for the three-branch feature-hashing threshold. Only existence of
// C >= D > 0 and the Theta(.) lead is known, so these are calibration knobs.
struct NuThresholdConfig {
    double C = 3.0;
    double D = 0.5;
    double lead = 1.0;

    void validate() const {
        if (!(C >= D && D > 0.0))
            throw std::invalid_argument("NuThresholdConfig: need C >= D > 0");
        if (!(lead > 0.0)) throw std::invalid_argument("NuThresholdConfig: lead > 0");
    }
};

// Largest l_inf/l_2 ratio for which feature hashing keeps the distributional
// guarantee, in three branches over m (lg = log2 throughout):
//   m >= 2/(eps^2 delta)            -> 1
//   m <  D lg(1/delta) / eps^2      -> 0
//   otherwise  lead * sqrt(eps) * min{ lg(eps m / L) / L,
//                                      sqrt(lg(eps^2 m / L) / L) },  L = lg(1/delta)
// clamped to [0, 1].
inline double nu_feature_hashing(std::size_t m, double eps, double delta,
                                 const NuThresholdConfig& cfg = {}) {
    if (!(eps > 0.0 && eps < 1.0) || !(delta > 0.0 && delta < 1.0))
        throw std::invalid_argument("nu_feature_hashing: eps, delta must lie in (0,1)");
    cfg.validate();
    const double md = static_cast<double>(m);
    if (md >= 2.0 / (eps * eps * delta)) return 1.0;
    const double L = std::log2(1.0 / delta);
    if (md < cfg.D * L / (eps * eps)) return 0.0;
    const auto lg_clamped = [](double v) { return v <= 1.0 ? 0.0 : std::log2(v); };
    const double a = lg_clamped(eps * md / L) / L;
    const double b = std::sqrt(lg_clamped(eps * eps * md / L) / L);
    const double nu = cfg.lead * std::sqrt(eps) * std::min(a, b);
    return std::clamp(nu, 0.0, 1.0);
}

// Minimum duplicate-then-hash column sparsity for inputs with ratio nu_dks,
// given the feature-hashing threshold nu_fh: ceil(lead * nu_dks^2 / nu_fh^2),
// clamped to [1, max_s]. nu_fh == 0 means feature hashing is insufficient at
// any sparsity and is reported as a domain error.
inline std::size_t dks_sparsity(double nu_dks, double nu_fh, double lead,
                                std::size_t max_s = std::numeric_limits<std::size_t>::max()) {
    if (nu_fh == 0.0)
        throw std::domain_error("dks_sparsity: nu_fh == 0, no sparsity suffices");
    if (!(nu_fh > 0.0 && nu_fh <= nu_dks && nu_dks <= 1.0))
        throw std::invalid_argument("dks_sparsity: need 0 < nu_fh <= nu_dks <= 1");
    if (!(lead > 0.0)) throw std::invalid_argument("dks_sparsity: lead must be > 0");
    const double ratio = nu_dks / nu_fh;
    const double raw = std::ceil(lead * ratio * ratio);
    if (raw < 1.0) return 1;
    const auto s = static_cast<std::size_t>(raw);
    return std::min(s, max_s);
}

// Unit vector with the first k entries equal to 1/sqrt(k); the worst-case
// shape for feature hashing. l_inf/l_2 of the result is 1/sqrt(k).
inline Vector fh_hard_instance(std::size_t k, std::size_t d) {
    if (k < 1 || k > d)
        throw std::invalid_argument("fh_hard_instance: need 1 <= k <= d");
    Vector x(d, 0.0);
    const double v = 1.0 / std::sqrt(static_cast<double>(k));
    for (std::size_t i = 0; i < k; ++i) x[i] = v;
    return x;
}

}  // namespace jl
