// Dense i.i.d. embeddings: Gaussian, Rademacher and the sparse-i.i.d.
// Achlioptas family. Entries have mean 0 and variance 1; the 1/sqrt(m)
// normalisation is folded into apply(), not the stored matrix.
#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "jl/core.hpp"

namespace jl {

enum class DenseKind { Gaussian, Rademacher, Achlioptas };

class DenseTransform {
  public:
    static DenseTransform gaussian(const JlParams& p, bool orthonormalize = false) {
        p.validate();
        DenseTransform t(DenseKind::Gaussian, p, 1.0);
        Rng rng(p.seed);
        for (auto& a : t.matrix_) a = rng.next_gaussian();
        if (orthonormalize) t.orthonormalize_rows();
        return t;
    }

    static DenseTransform rademacher(const JlParams& p) {
        p.validate();
        DenseTransform t(DenseKind::Rademacher, p, 1.0);
        Rng rng(p.seed);
        for (auto& a : t.matrix_) a = static_cast<double>(rng.next_sign());
        return t;
    }

    // Entries are 0 w.p. 1-q and +-1/sqrt(q) w.p. q/2 each. One uniform per
    // entry: u < q/2 -> +1/sqrt(q), u < q -> -1/sqrt(q), else 0.
    static DenseTransform achlioptas(const JlParams& p, double q) {
        p.validate();
        if (!(q > 0.0 && q <= 1.0))
            throw std::invalid_argument("achlioptas: q must lie in (0,1]");
        DenseTransform t(DenseKind::Achlioptas, p, q);
        Rng rng(p.seed);
        const double v = 1.0 / std::sqrt(q);
        for (auto& a : t.matrix_) {
            const double u = rng.next_double();
            a = u < 0.5 * q ? v : (u < q ? -v : 0.0);
        }
        return t;
    }

    // y = (1/sqrt(m)) A x.
    Vector apply(const Vector& x) const {
        if (x.size() != params_.d)
            throw std::invalid_argument("DenseTransform::apply: dimension mismatch");
        const std::size_t d = params_.d, m = params_.m;
        Vector y(m, 0.0);
        const double scale = 1.0 / std::sqrt(static_cast<double>(m));
        for (std::size_t i = 0; i < m; ++i) {
            const double* row = matrix_.data() + i * d;
            double acc = 0.0;
            for (std::size_t j = 0; j < d; ++j) acc += row[j] * x[j];
            y[i] = acc * scale;
        }
        return y;
    }

    DenseKind kind() const { return kind_; }
    const JlParams& params() const { return params_; }
    double q() const { return q_; }
    std::size_t output_dim() const { return params_.m; }
    // Row-major m x d.
    const std::vector<double>& matrix() const { return matrix_; }

  private:
    DenseTransform(DenseKind kind, const JlParams& p, double q)
        : kind_(kind), params_(p), q_(q), matrix_(p.m * p.d) {}

    // Gram-Schmidt on the rows, then scale every row by sqrt(d) so the
    // 1/sqrt(m) in apply() yields the sqrt(d/m)-scaled orthonormal map.
    void orthonormalize_rows() {
        const std::size_t d = params_.d, m = params_.m;
        if (m > d)
            throw std::invalid_argument("gaussian: orthonormalize requires m <= d");
        for (std::size_t i = 0; i < m; ++i) {
            double* ri = matrix_.data() + i * d;
            for (std::size_t k = 0; k < i; ++k) {
                const double* rk = matrix_.data() + k * d;
                double proj = 0.0;
                for (std::size_t j = 0; j < d; ++j) proj += ri[j] * rk[j];
                for (std::size_t j = 0; j < d; ++j) ri[j] -= proj * rk[j];
            }
            double norm = 0.0;
            for (std::size_t j = 0; j < d; ++j) norm += ri[j] * ri[j];
            norm = std::sqrt(norm);
            if (norm == 0.0)
                throw std::runtime_error("gaussian: degenerate row during orthonormalization");
            for (std::size_t j = 0; j < d; ++j) ri[j] /= norm;
        }
        const double s = std::sqrt(static_cast<double>(d));
        for (auto& a : matrix_) a *= s;
    }

    DenseKind kind_;
    JlParams params_;
    double q_;
    std::vector<double> matrix_;
};

}  // namespace jl
