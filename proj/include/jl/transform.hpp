// One handle over every embedding kind in the library, so harnesses and the
// CLI can be written against a single apply() surface.
#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>

#include "jl/core.hpp"
#include "jl/dense.hpp"
#include "jl/sparse.hpp"
#include "jl/structured.hpp"

namespace jl {

enum class TransformKind {
    Identity,
    Gaussian,
    Rademacher,
    Achlioptas,
    FeatureHashing,
    Block,
    Graph,
    Dks,
    Fjlt,
    Srht,
    Toeplitz,
    LwtJl,
    KacJl,
};

struct TransformOptions {
    double achlioptas_q = 1.0 / 3.0;
    bool gaussian_orthonormalize = false;
    // 0 means the default s = ceil(eps^-1 ln(1/delta)), clamped to [1, m].
    std::size_t sparsity = 0;
    double fjlt_cq = 1.0;
    std::optional<SeedMatrix> lwt_seed;  // default: partial Hadamard 2x4
    DenseKind lwt_inner = DenseKind::Rademacher;
    // 0 means n = max(2, ceil(2/delta)), the distributional reading of the
    // point count.
    std::size_t kacjl_points = 0;
    KacJlConfig kacjl;
};

inline std::size_t default_sparsity(const JlParams& p) {
    const auto s = static_cast<std::size_t>(
        std::ceil(1.0 / p.eps * std::log(1.0 / p.delta)));
    return std::clamp<std::size_t>(s, 1, p.m);
}

namespace detail {

struct IdentityTransform {
    JlParams params;

    Vector apply(const Vector& x) const {
        if (x.size() != params.d)
            throw std::invalid_argument("Identity::apply: dimension mismatch");
        return x;
    }
    std::size_t output_dim() const { return params.d; }
};

}  // namespace detail

class Transform {
  public:
    Transform(detail::IdentityTransform t) : impl_(std::move(t)) {}
    Transform(DenseTransform t) : impl_(std::move(t)) {}
    Transform(SparseTransform t) : impl_(std::move(t)) {}
    Transform(StructuredTransform t) : impl_(std::move(t)) {}

    Vector apply(const Vector& x) const {
        return std::visit([&](const auto& t) { return t.apply(x); }, impl_);
    }

    std::size_t output_dim() const {
        return std::visit([](const auto& t) { return t.output_dim(); }, impl_);
    }

    template <class T>
    const T& as() const {
        return std::get<T>(impl_);
    }

  private:
    std::variant<detail::IdentityTransform, DenseTransform, SparseTransform,
                 StructuredTransform>
        impl_;
};

inline Transform make_transform(TransformKind kind, const JlParams& p,
                                const TransformOptions& opt = {}) {
    switch (kind) {
        case TransformKind::Identity: {
            if (p.m != p.d)
                throw std::invalid_argument("identity transform requires m == d");
            return Transform(detail::IdentityTransform{p});
        }
        case TransformKind::Gaussian:
            return Transform(DenseTransform::gaussian(p, opt.gaussian_orthonormalize));
        case TransformKind::Rademacher:
            return Transform(DenseTransform::rademacher(p));
        case TransformKind::Achlioptas:
            return Transform(DenseTransform::achlioptas(p, opt.achlioptas_q));
        case TransformKind::FeatureHashing:
            return Transform(SparseTransform::feature_hashing(p));
        case TransformKind::Block:
            return Transform(SparseTransform::block(
                p, opt.sparsity ? opt.sparsity : default_sparsity(p)));
        case TransformKind::Graph:
            return Transform(SparseTransform::graph(
                p, opt.sparsity ? opt.sparsity : default_sparsity(p)));
        case TransformKind::Dks:
            return Transform(SparseTransform::dks(
                p, opt.sparsity ? opt.sparsity : default_sparsity(p)));
        case TransformKind::Fjlt:
            return Transform(fjlt_new(p, opt.fjlt_cq));
        case TransformKind::Srht:
            return Transform(srht_new(p));
        case TransformKind::Toeplitz:
            return Transform(toeplitz_new(p));
        case TransformKind::LwtJl:
            return Transform(lwtjl_new(
                p, opt.lwt_seed ? *opt.lwt_seed : SeedMatrix::partial_hadamard(2, 4),
                opt.lwt_inner));
        case TransformKind::KacJl: {
            std::size_t n = opt.kacjl_points;
            if (n == 0)
                n = std::max<std::size_t>(
                    2, static_cast<std::size_t>(std::ceil(2.0 / p.delta)));
            return Transform(kacjl_new(p, n, opt.kacjl));
        }
    }
    throw std::invalid_argument("make_transform: unknown kind");
}

inline const char* kind_name(TransformKind kind) {
    switch (kind) {
        case TransformKind::Identity: return "identity";
        case TransformKind::Gaussian: return "gaussian";
        case TransformKind::Rademacher: return "rademacher";
        case TransformKind::Achlioptas: return "achlioptas";
        case TransformKind::FeatureHashing: return "fh";
        case TransformKind::Block: return "block";
        case TransformKind::Graph: return "graph";
        case TransformKind::Dks: return "dks";
        case TransformKind::Fjlt: return "fjlt";
        case TransformKind::Srht: return "srht";
        case TransformKind::Toeplitz: return "toeplitz";
        case TransformKind::LwtJl: return "lwtjl";
        case TransformKind::KacJl: return "kacjl";
    }
    return "unknown";
}

inline TransformKind parse_kind(const std::string& name) {
    if (name == "identity") return TransformKind::Identity;
    if (name == "gaussian") return TransformKind::Gaussian;
    if (name == "rademacher") return TransformKind::Rademacher;
    if (name == "achlioptas") return TransformKind::Achlioptas;
    if (name == "fh" || name == "feature-hashing") return TransformKind::FeatureHashing;
    if (name == "block") return TransformKind::Block;
    if (name == "graph") return TransformKind::Graph;
    if (name == "dks") return TransformKind::Dks;
    if (name == "fjlt") return TransformKind::Fjlt;
    if (name == "srht") return TransformKind::Srht;
    if (name == "toeplitz") return TransformKind::Toeplitz;
    if (name == "lwtjl") return TransformKind::LwtJl;
    if (name == "kacjl") return TransformKind::KacJl;
    throw std::invalid_argument("unknown transform kind: " + name);
}

}  // namespace jl
