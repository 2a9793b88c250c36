// Fast-transform embeddings: FJLT (sparse Gaussian after a randomized
// Walsh-Hadamard mix), SRHT (subsampled randomized Hadamard), Toeplitz via
// FFT circular convolution with the per-block trick, lean Walsh transforms
// built from Kronecker powers of a seed matrix, and Kac random-walk rotations.
#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <variant>
#include <vector>

#include "jl/core.hpp"
#include "jl/dense.hpp"

namespace jl {

inline bool is_pow2(std::size_t v) { return v != 0 && (v & (v - 1)) == 0; }

inline std::size_t next_pow2(std::size_t v) {
    std::size_t p = 1;
    while (p < v) p <<= 1;
    return p;
}

// ---------------------------------------------------------------------------
// Walsh-Hadamard and FFT primitives.
// ---------------------------------------------------------------------------

namespace detail {

// H_{2n} = [[H_n, H_n], [H_n, -H_n]]: transform the halves depth-first while
// they are cache-resident, then one combine pass. Sizes at or below the base
// use the plain butterfly passes.
inline void fwht_recurse(double* x, std::size_t n) {
    constexpr std::size_t kBase = 4096;  // 32 KiB of doubles
    if (n <= kBase) {
        for (std::size_t len = 1; len < n; len <<= 1) {
            for (std::size_t i = 0; i < n; i += len << 1) {
                for (std::size_t j = i; j < i + len; ++j) {
                    const double a = x[j];
                    const double b = x[j + len];
                    x[j] = a + b;
                    x[j + len] = a - b;
                }
            }
        }
        return;
    }
    const std::size_t h = n / 2;
    fwht_recurse(x, h);
    fwht_recurse(x + h, h);
    for (std::size_t j = 0; j < h; ++j) {
        const double a = x[j];
        const double b = x[j + h];
        x[j] = a + b;
        x[j + h] = a - b;
    }
}

}  // namespace detail

// Unnormalised in-place Walsh-Hadamard transform, Sylvester ordering.
// fwht(fwht(x)) == d * x.
inline void fwht(std::span<double> x) {
    const std::size_t n = x.size();
    if (!is_pow2(n)) throw std::invalid_argument("fwht: dim must be a power of 2");
    detail::fwht_recurse(x.data(), n);
}

inline Vector fwht(Vector x) {
    fwht(std::span<double>(x));
    return x;
}

namespace detail {

// Iterative radix-2 FFT. Sizes here are small powers of two (at most a few
// times the target dimension), so a vendored FFT library is not warranted.
inline void fft_pow2(std::vector<std::complex<double>>& a, bool inverse) {
    const std::size_t n = a.size();
    if (!is_pow2(n)) throw std::invalid_argument("fft: size must be a power of 2");
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = (inverse ? 2.0 : -2.0) * 3.14159265358979323846 /
                           static_cast<double>(len);
        const std::complex<double> wl(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (std::size_t j = 0; j < len / 2; ++j) {
                const auto u = a[i + j];
                const auto v = a[i + j + len / 2] * w;
                a[i + j] = u + v;
                a[i + j + len / 2] = u - v;
                w *= wl;
            }
        }
    }
    if (inverse) {
        const double inv = 1.0 / static_cast<double>(n);
        for (auto& v : a) v *= inv;
    }
}

}  // namespace detail

// Circular convolution of equal power-of-2 length vectors via FFT:
// out[i] = sum_j a[j] * b[(i-j) mod n].
inline Vector fft_circular_convolve(const Vector& a, const Vector& b) {
    if (a.size() != b.size())
        throw std::invalid_argument("fft_circular_convolve: length mismatch");
    if (!is_pow2(a.size()))
        throw std::invalid_argument("fft_circular_convolve: length must be a power of 2");
    const std::size_t n = a.size();
    std::vector<std::complex<double>> fa(n), fb(n);
    for (std::size_t i = 0; i < n; ++i) {
        fa[i] = a[i];
        fb[i] = b[i];
    }
    detail::fft_pow2(fa, false);
    detail::fft_pow2(fb, false);
    for (std::size_t i = 0; i < n; ++i) fa[i] *= fb[i];
    detail::fft_pow2(fa, true);
    Vector out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = fa[i].real();
    return out;
}

// ---------------------------------------------------------------------------
// FJLT: f(x) = (1/sqrt(m)) P Hhat D x with Hhat = H/sqrt(d). P is sparse with
// density q = min(1, c_q ln^2(2/delta)/d) and nonzero entries N(0, 1/q).
// ---------------------------------------------------------------------------

class Fjlt {
  public:
    Fjlt(const JlParams& p, double c_q = 1.0) : params_(p) {
        p.validate();
        if (!(c_q > 0.0)) throw std::invalid_argument("fjlt: c_q must be > 0");
        d_pad_ = next_pow2(p.d);
        const double lg = std::log(2.0 / p.delta);
        q_ = std::min(1.0, c_q * lg * lg / static_cast<double>(d_pad_));
        Rng rng(p.seed);
        sign_diag_.resize(d_pad_);
        for (auto& s : sign_diag_) s = static_cast<double>(rng.next_sign());
        const double val_scale = 1.0 / std::sqrt(q_);
        row_start_.assign(p.m + 1, 0);
        for (std::size_t i = 0; i < p.m; ++i) {
            for (std::size_t j = 0; j < d_pad_; ++j) {
                if (rng.next_double() < q_) {
                    cols_.push_back(static_cast<std::uint32_t>(j));
                    vals_.push_back(rng.next_gaussian() * val_scale);
                }
            }
            row_start_[i + 1] = cols_.size();
        }
    }

    Vector apply(const Vector& x) const {
        if (x.size() != params_.d)
            throw std::invalid_argument("Fjlt::apply: dimension mismatch");
        Vector z(d_pad_, 0.0);
        for (std::size_t j = 0; j < params_.d; ++j) z[j] = x[j] * sign_diag_[j];
        fwht(std::span<double>(z));
        const double hscale = 1.0 / std::sqrt(static_cast<double>(d_pad_));
        const double mscale = 1.0 / std::sqrt(static_cast<double>(params_.m));
        Vector y(params_.m, 0.0);
        for (std::size_t i = 0; i < params_.m; ++i) {
            double acc = 0.0;
            for (std::size_t k = row_start_[i]; k < row_start_[i + 1]; ++k)
                acc += vals_[k] * z[cols_[k]];
            y[i] = acc * hscale * mscale;
        }
        return y;
    }

    const JlParams& params() const { return params_; }
    std::size_t output_dim() const { return params_.m; }
    std::size_t padded_dim() const { return d_pad_; }
    double q() const { return q_; }
    const std::vector<double>& sign_diag() const { return sign_diag_; }
    std::size_t p_nonzeros() const { return vals_.size(); }

  private:
    JlParams params_;
    std::size_t d_pad_;
    double q_;
    std::vector<double> sign_diag_;
    std::vector<std::uint32_t> cols_;
    std::vector<double> vals_;
    std::vector<std::size_t> row_start_;
};

// ---------------------------------------------------------------------------
// SRHT: f(x) = sqrt(d/m) * sampled rows of Hhat D x, sampling m rows with
// replacement. Equivalently (1/sqrt(m)) times entries of the unnormalised
// Walsh-Hadamard mix.
// ---------------------------------------------------------------------------

class Srht {
  public:
    explicit Srht(const JlParams& p) : params_(p) {
        p.validate();
        d_pad_ = next_pow2(p.d);
        Rng rng(p.seed);
        sign_diag_.resize(d_pad_);
        for (auto& s : sign_diag_) s = static_cast<double>(rng.next_sign());
        samples_.resize(p.m);
        for (auto& idx : samples_)
            idx = static_cast<std::uint32_t>(rng.next_below(d_pad_));
    }

    Vector apply(const Vector& x) const {
        if (x.size() != params_.d)
            throw std::invalid_argument("Srht::apply: dimension mismatch");
        Vector z(d_pad_, 0.0);
        for (std::size_t j = 0; j < params_.d; ++j) z[j] = x[j] * sign_diag_[j];
        fwht(std::span<double>(z));
        const double scale = 1.0 / std::sqrt(static_cast<double>(params_.m));
        Vector y(params_.m);
        for (std::size_t i = 0; i < params_.m; ++i) y[i] = z[samples_[i]] * scale;
        return y;
    }

    const JlParams& params() const { return params_; }
    std::size_t output_dim() const { return params_.m; }
    std::size_t padded_dim() const { return d_pad_; }
    const std::vector<std::uint32_t>& samples() const { return samples_; }

  private:
    JlParams params_;
    std::size_t d_pad_;
    std::vector<double> sign_diag_;
    std::vector<std::uint32_t> samples_;
};

// ---------------------------------------------------------------------------
// Toeplitz: f(x) = (1/sqrt(m)) T D x where T_{ij} = t_{j-i} with i.i.d.
// Rademacher diagonal values t_{-(m-1)} .. t_{d-1}.
// ---------------------------------------------------------------------------

struct ToeplitzSpec {
    std::size_t d = 0, m = 0;
    std::vector<double> t;          // length d+m-1, index k stored at k+(m-1)
    std::vector<double> sign_diag;  // length d

    double t_at(std::ptrdiff_t k) const {
        return t[static_cast<std::size_t>(k + static_cast<std::ptrdiff_t>(m) - 1)];
    }
};

class ToeplitzTransform {
  public:
    explicit ToeplitzTransform(const JlParams& p) : params_(p) {
        p.validate();
        Rng rng(p.seed);
        spec_.d = p.d;
        spec_.m = p.m;
        spec_.t.resize(p.d + p.m - 1);
        for (auto& v : spec_.t) v = static_cast<double>(rng.next_sign());
        spec_.sign_diag.resize(p.d);
        for (auto& v : spec_.sign_diag) v = static_cast<double>(rng.next_sign());
    }

    Vector apply(const Vector& x) const { return apply_blocked(spec_, x); }

    // Column blocks of width m, each applied as a circulant of size
    // next_pow2(2m) through fft_circular_convolve. O(d log m) overall.
    static Vector apply_blocked(const ToeplitzSpec& spec, const Vector& x) {
        if (x.size() != spec.d)
            throw std::invalid_argument("Toeplitz: dimension mismatch");
        const std::size_t d = spec.d, m = spec.m;
        const std::size_t n = next_pow2(2 * m);
        Vector y(m, 0.0);
        Vector c(n), u(n);
        for (std::size_t j0 = 0; j0 < d; j0 += m) {
            const std::size_t width = std::min(m, d - j0);
            std::fill(u.begin(), u.end(), 0.0);
            for (std::size_t j = 0; j < width; ++j)
                u[j] = x[j0 + j] * spec.sign_diag[j0 + j];
            std::fill(c.begin(), c.end(), 0.0);
            const auto base = static_cast<std::ptrdiff_t>(j0);
            for (std::size_t k = 0; k < m; ++k)
                c[k] = spec.t_at(base - static_cast<std::ptrdiff_t>(k));
            for (std::size_t k = 1; k < m; ++k) {
                const std::ptrdiff_t idx = base + static_cast<std::ptrdiff_t>(k);
                c[n - k] = idx <= static_cast<std::ptrdiff_t>(d) - 1 ? spec.t_at(idx) : 0.0;
            }
            const Vector conv = fft_circular_convolve(c, u);
            for (std::size_t i = 0; i < m; ++i) y[i] += conv[i];
        }
        const double scale = 1.0 / std::sqrt(static_cast<double>(m));
        for (auto& v : y) v *= scale;
        return y;
    }

    // O(md) reference path.
    static Vector apply_naive(const ToeplitzSpec& spec, const Vector& x) {
        if (x.size() != spec.d)
            throw std::invalid_argument("Toeplitz: dimension mismatch");
        Vector y(spec.m, 0.0);
        for (std::size_t i = 0; i < spec.m; ++i) {
            double acc = 0.0;
            for (std::size_t j = 0; j < spec.d; ++j)
                acc += spec.t_at(static_cast<std::ptrdiff_t>(j) -
                                 static_cast<std::ptrdiff_t>(i)) *
                       spec.sign_diag[j] * x[j];
            y[i] = acc;
        }
        const double scale = 1.0 / std::sqrt(static_cast<double>(spec.m));
        for (auto& v : y) v *= scale;
        return y;
    }

    const JlParams& params() const { return params_; }
    std::size_t output_dim() const { return params_.m; }
    const ToeplitzSpec& spec() const { return spec_; }

  private:
    JlParams params_;
    ToeplitzSpec spec_;
};

// ---------------------------------------------------------------------------
// Lean Walsh transform: Kronecker powers of a small seed matrix.
// ---------------------------------------------------------------------------

// r x c with r < c, unit-norm columns, pairwise orthogonal rows of equal norm.
struct SeedMatrix {
    std::size_t rows = 0, cols = 0;
    std::vector<double> entries;  // row-major

    double at(std::size_t i, std::size_t j) const { return entries[i * cols + j]; }

    void validate(double tol = 1e-9) const {
        if (rows >= cols || rows == 0)
            throw std::invalid_argument("SeedMatrix: need 0 < rows < cols");
        if (entries.size() != rows * cols)
            throw std::invalid_argument("SeedMatrix: entry count mismatch");
        for (std::size_t j = 0; j < cols; ++j) {
            double n = 0.0;
            for (std::size_t i = 0; i < rows; ++i) n += at(i, j) * at(i, j);
            if (std::abs(n - 1.0) > tol)
                throw std::invalid_argument("SeedMatrix: columns must have unit norm");
        }
        double row_norm0 = -1.0;
        for (std::size_t i = 0; i < rows; ++i) {
            double n = 0.0;
            for (std::size_t j = 0; j < cols; ++j) n += at(i, j) * at(i, j);
            if (row_norm0 < 0.0)
                row_norm0 = n;
            else if (std::abs(n - row_norm0) > tol)
                throw std::invalid_argument("SeedMatrix: rows must share one norm");
            for (std::size_t k = i + 1; k < rows; ++k) {
                double ip = 0.0;
                for (std::size_t j = 0; j < cols; ++j) ip += at(i, j) * at(k, j);
                if (std::abs(ip) > tol)
                    throw std::invalid_argument("SeedMatrix: rows must be orthogonal");
            }
        }
    }

    // First r rows of the c x c Walsh-Hadamard matrix scaled by 1/sqrt(r).
    static SeedMatrix partial_hadamard(std::size_t r, std::size_t c) {
        if (!is_pow2(c)) throw std::invalid_argument("partial_hadamard: c must be a power of 2");
        if (r >= c || r == 0) throw std::invalid_argument("partial_hadamard: need 0 < r < c");
        SeedMatrix s;
        s.rows = r;
        s.cols = c;
        s.entries.resize(r * c);
        const double scale = 1.0 / std::sqrt(static_cast<double>(r));
        for (std::size_t i = 0; i < r; ++i)
            for (std::size_t j = 0; j < c; ++j)
                s.entries[i * c + j] =
                    (std::popcount(i & j) & 1u) ? -scale : scale;
        return s;
    }
};

namespace detail {

inline void lwt_recurse(const SeedMatrix& a, unsigned level, const double* x, double* y) {
    const std::size_t r = a.rows, c = a.cols;
    if (level == 1) {
        for (std::size_t i = 0; i < r; ++i) {
            double acc = 0.0;
            for (std::size_t j = 0; j < c; ++j) acc += a.at(i, j) * x[j];
            y[i] = acc;
        }
        return;
    }
    std::size_t in_stripe = 1, out_stripe = 1;
    for (unsigned t = 1; t < level; ++t) {
        in_stripe *= c;
        out_stripe *= r;
    }
    // A^{(l)} = A tensor A^{(l-1)}: transform each of the c input stripes,
    // then combine stripes through A.
    std::vector<double> z(c * out_stripe);
    for (std::size_t j = 0; j < c; ++j)
        lwt_recurse(a, level - 1, x + j * in_stripe, z.data() + j * out_stripe);
    for (std::size_t i = 0; i < r; ++i) {
        double* yb = y + i * out_stripe;
        std::fill(yb, yb + out_stripe, 0.0);
        for (std::size_t j = 0; j < c; ++j) {
            const double w = a.at(i, j);
            if (w == 0.0) continue;
            const double* zb = z.data() + j * out_stripe;
            for (std::size_t q = 0; q < out_stripe; ++q) yb[q] += w * zb[q];
        }
    }
}

}  // namespace detail

// Applies the level-fold Kronecker power of the seed matrix to x (dim c^l)
// without materialising it; output dim r^l.
inline Vector lwt_apply(const SeedMatrix& seed, unsigned level, const Vector& x) {
    if (level == 0) throw std::invalid_argument("lwt_apply: level must be >= 1");
    std::size_t in_dim = 1, out_dim = 1;
    for (unsigned t = 0; t < level; ++t) {
        in_dim *= seed.cols;
        out_dim *= seed.rows;
    }
    if (x.size() != in_dim)
        throw std::invalid_argument("lwt_apply: dimension mismatch");
    Vector y(out_dim);
    detail::lwt_recurse(seed, level, x.data(), y.data());
    return y;
}

// One nontrivial vector in the nullspace of the seed rows, scaled to
// l_inf norm 1. Gaussian elimination; r < c guarantees a free column.
inline Vector lwt_null_vector(const SeedMatrix& seed) {
    const std::size_t r = seed.rows, c = seed.cols;
    std::vector<double> a(seed.entries);
    std::vector<std::ptrdiff_t> pivot_row_of_col(c, -1);
    std::size_t row = 0;
    for (std::size_t col = 0; col < c && row < r; ++col) {
        std::size_t best = row;
        for (std::size_t i = row + 1; i < r; ++i)
            if (std::abs(a[i * c + col]) > std::abs(a[best * c + col])) best = i;
        if (std::abs(a[best * c + col]) < 1e-12) continue;
        for (std::size_t j = 0; j < c; ++j)
            std::swap(a[row * c + j], a[best * c + j]);
        const double piv = a[row * c + col];
        for (std::size_t j = 0; j < c; ++j) a[row * c + j] /= piv;
        for (std::size_t i = 0; i < r; ++i) {
            if (i == row) continue;
            const double f = a[i * c + col];
            if (f == 0.0) continue;
            for (std::size_t j = 0; j < c; ++j) a[i * c + j] -= f * a[row * c + j];
        }
        pivot_row_of_col[col] = static_cast<std::ptrdiff_t>(row);
        ++row;
    }
    std::size_t free_col = c;
    for (std::size_t col = 0; col < c; ++col)
        if (pivot_row_of_col[col] < 0) {
            free_col = col;
            break;
        }
    if (free_col == c) throw std::logic_error("lwt_null_vector: no free column");
    Vector z(c, 0.0);
    z[free_col] = 1.0;
    for (std::size_t col = 0; col < c; ++col)
        if (pivot_row_of_col[col] >= 0)
            z[col] = -a[static_cast<std::size_t>(pivot_row_of_col[col]) * c + free_col];
    double linf = 0.0;
    for (double v : z) linf = std::max(linf, std::abs(v));
    for (auto& v : z) v /= linf;
    return z;
}

// Hard input for the lean Walsh embedding: k = floor(lg(1/delta)/c - 1)
// copies of a seed-nullspace vector. ||x||_0 <= c k < lg(1/delta), so the
// event {Dx = x} alone already has probability 2^{-||x||_0} > delta, and on
// that event the Kronecker structure maps x to zero.
inline Vector lwt_hard_instance(const SeedMatrix& seed, double delta) {
    if (!(delta > 0.0 && delta < 1.0))
        throw std::invalid_argument("lwt_hard_instance: delta must lie in (0,1)");
    const double lg = std::log2(1.0 / delta);
    const double kf = std::floor(lg / static_cast<double>(seed.cols) - 1.0);
    if (kf < 1.0)
        throw std::invalid_argument("lwt_hard_instance: delta too large, k < 1");
    const auto k = static_cast<std::size_t>(kf);
    const Vector z = lwt_null_vector(seed);
    Vector x(k * seed.cols, 0.0);
    for (std::size_t copy = 0; copy < k; ++copy)
        for (std::size_t j = 0; j < seed.cols; ++j) x[copy * seed.cols + j] = z[j];
    return x;
}

// LWTJL: f(x) = G A_l D x. x is zero-padded to c^l for the minimal l with
// c^l >= d; G is a dense inner embedding from r^l to m (Rademacher unless
// configured Gaussian), so the total cost is O(d + m r^l).
class LwtJl {
  public:
    LwtJl(const JlParams& p, SeedMatrix seed, DenseKind inner = DenseKind::Rademacher)
        : params_(p), seed_(std::move(seed)) {
        p.validate();
        seed_.validate();
        level_ = 1;
        std::size_t in_dim = seed_.cols, out_dim = seed_.rows;
        while (in_dim < p.d) {
            in_dim *= seed_.cols;
            out_dim *= seed_.rows;
            ++level_;
        }
        in_dim_ = in_dim;
        mid_dim_ = out_dim;
        if (p.m > mid_dim_)
            throw std::invalid_argument("lwtjl: m exceeds r^l");
        Rng rng(derive_seed(p.seed, 0));
        sign_diag_.resize(in_dim_);
        for (auto& s : sign_diag_) s = static_cast<double>(rng.next_sign());
        JlParams gp = p;
        gp.d = mid_dim_;
        gp.seed = derive_seed(p.seed, 1);
        switch (inner) {
            case DenseKind::Gaussian:
                g_ = std::make_shared<DenseTransform>(DenseTransform::gaussian(gp));
                break;
            case DenseKind::Rademacher:
                g_ = std::make_shared<DenseTransform>(DenseTransform::rademacher(gp));
                break;
            default:
                throw std::invalid_argument("lwtjl: inner must be Gaussian or Rademacher");
        }
    }

    Vector apply(const Vector& x) const {
        if (x.size() != params_.d)
            throw std::invalid_argument("LwtJl::apply: dimension mismatch");
        Vector z(in_dim_, 0.0);
        for (std::size_t j = 0; j < params_.d; ++j) z[j] = x[j] * sign_diag_[j];
        const Vector mid = lwt_apply(seed_, level_, z);
        return g_->apply(mid);
    }

    const JlParams& params() const { return params_; }
    std::size_t output_dim() const { return params_.m; }
    unsigned level() const { return level_; }
    std::size_t padded_dim() const { return in_dim_; }
    std::size_t mid_dim() const { return mid_dim_; }
    const SeedMatrix& seed_matrix() const { return seed_; }
    const std::vector<double>& sign_diag() const { return sign_diag_; }
    const DenseTransform& inner() const { return *g_; }

  private:
    JlParams params_;
    SeedMatrix seed_;
    unsigned level_ = 1;
    std::size_t in_dim_ = 0;   // c^l
    std::size_t mid_dim_ = 0;  // r^l
    std::vector<double> sign_diag_;
    std::shared_ptr<const DenseTransform> g_;
};

// ---------------------------------------------------------------------------
// Kac random walks and the two-stage KacJL pipeline.
// ---------------------------------------------------------------------------

enum class KacAngleMode { Continuous, FourAngle, SingleAngle };

struct KacStep {
    std::uint32_t i, j;  // i < j
    double theta;
    double c, s;
};

class KacWalk {
  public:
    KacWalk(std::size_t n, std::size_t steps, std::uint64_t seed,
            KacAngleMode mode = KacAngleMode::Continuous)
        : dim_(n), mode_(mode) {
        if (n < 2) throw std::invalid_argument("KacWalk: dimension must be >= 2");
        Rng rng(seed);
        steps_.reserve(steps);
        for (std::size_t t = 0; t < steps; ++t) {
            auto i = static_cast<std::uint32_t>(rng.next_below(n));
            auto j = static_cast<std::uint32_t>(rng.next_below(n - 1));
            if (j >= i) ++j;
            if (i > j) std::swap(i, j);
            double theta;
            switch (mode) {
                case KacAngleMode::Continuous:
                    theta = 6.283185307179586476925286766559 * rng.next_double();
                    break;
                case KacAngleMode::FourAngle:
                    theta = (2.0 * static_cast<double>(rng.next_below(4)) + 1.0) *
                            0.78539816339744830961566084581988;
                    break;
                case KacAngleMode::SingleAngle:
                    theta = 0.78539816339744830961566084581988;
                    break;
                default:
                    throw std::logic_error("KacWalk: bad mode");
            }
            steps_.push_back({i, j, theta, std::cos(theta), std::sin(theta)});
        }
    }

    void apply_inplace(Vector& x) const {
        if (x.size() != dim_) throw std::invalid_argument("KacWalk: dimension mismatch");
        for (const auto& st : steps_) {
            const double a = x[st.i];
            const double b = x[st.j];
            x[st.i] = a * st.c - b * st.s;
            x[st.j] = a * st.s + b * st.c;
        }
    }

    Vector apply(Vector x) const {
        apply_inplace(x);
        return x;
    }

    std::size_t dim() const { return dim_; }
    std::size_t length() const { return steps_.size(); }
    KacAngleMode mode() const { return mode_; }
    const std::vector<KacStep>& steps() const { return steps_; }

  private:
    std::size_t dim_;
    KacAngleMode mode_;
    std::vector<KacStep> steps_;
};

struct KacJlConfig {
    double c1 = 1.0;
    double c2 = 1.0;
    double c3 = 1.0;
    KacAngleMode angle_mode = KacAngleMode::Continuous;
    bool first_phase_only = false;
};

// Two Kac walks with deterministic prefix projections between them:
//   f(x) = S^(m,d') K^(T2) S^(d',d) K^(T1) x,
//   T1 = ceil(c1 d ln d), T2 = ceil(c2 d' ln n),
//   d' = min(d, ceil(c3 eps^-2 ln n (ln ln max(n,3))^2 (ln d)^3)).
// Prefix truncations are compensated by sqrt(d/d') and sqrt(d'/m) so the
// squared-norm estimator stays unbiased; a projection that drops nothing
// (d' = d, or m >= d' where the output is zero-padded) needs no factor.
// Single-angle mode inserts a Rademacher sign diagonal before each walk.
class KacJl {
  public:
    KacJl(const JlParams& p, std::size_t n_points, const KacJlConfig& cfg = {})
        : params_(p), n_points_(std::max<std::size_t>(n_points, 1)), cfg_(cfg) {
        p.validate();
        if (p.d < 2) throw std::invalid_argument("kacjl: d must be >= 2");
        const double d = static_cast<double>(p.d);
        const double n = static_cast<double>(n_points_);
        const auto t1 =
            static_cast<std::size_t>(std::ceil(cfg.c1 * d * std::log(d)));
        walk1_ = std::make_shared<KacWalk>(p.d, t1, derive_seed(p.seed, 0), cfg.angle_mode);
        const double lnln = std::log(std::log(std::max(n, 3.0)));
        const double raw =
            cfg.c3 / (p.eps * p.eps) * std::log(n) * lnln * lnln *
            std::pow(std::log(d), 3.0);
        d_mid_ = std::min(p.d, static_cast<std::size_t>(std::max(2.0, std::ceil(raw))));
        if (!cfg.first_phase_only) {
            const auto t2 = static_cast<std::size_t>(
                std::ceil(cfg.c2 * static_cast<double>(d_mid_) * std::log(n)));
            walk2_ = std::make_shared<KacWalk>(d_mid_, t2, derive_seed(p.seed, 1),
                                               cfg.angle_mode);
        }
        if (cfg.angle_mode == KacAngleMode::SingleAngle) {
            Rng rng(derive_seed(p.seed, 2));
            sign1_.resize(p.d);
            for (auto& s : sign1_) s = static_cast<double>(rng.next_sign());
            sign2_.resize(d_mid_);
            for (auto& s : sign2_) s = static_cast<double>(rng.next_sign());
        }
    }

    Vector apply(const Vector& x) const {
        if (x.size() != params_.d)
            throw std::invalid_argument("KacJl::apply: dimension mismatch");
        Vector z = x;
        if (!sign1_.empty())
            for (std::size_t i = 0; i < z.size(); ++i) z[i] *= sign1_[i];
        walk1_->apply_inplace(z);
        if (cfg_.first_phase_only) return project(std::move(z), params_.m);
        z = project(std::move(z), d_mid_);
        if (!sign2_.empty())
            for (std::size_t i = 0; i < z.size(); ++i) z[i] *= sign2_[i];
        walk2_->apply_inplace(z);
        return project(std::move(z), params_.m);
    }

    const JlParams& params() const { return params_; }
    std::size_t output_dim() const { return params_.m; }
    std::size_t intermediate_dim() const { return d_mid_; }
    std::size_t walk1_length() const { return walk1_->length(); }
    std::size_t walk2_length() const { return walk2_ ? walk2_->length() : 0; }

  private:
    static Vector project(Vector z, std::size_t target) {
        if (target >= z.size()) {
            z.resize(target, 0.0);  // nothing dropped, no compensation
            return z;
        }
        const double scale =
            std::sqrt(static_cast<double>(z.size()) / static_cast<double>(target));
        Vector out(z.begin(), z.begin() + static_cast<std::ptrdiff_t>(target));
        for (auto& v : out) v *= scale;
        return out;
    }

    JlParams params_;
    std::size_t n_points_;
    KacJlConfig cfg_;
    std::size_t d_mid_ = 0;
    std::shared_ptr<const KacWalk> walk1_;
    std::shared_ptr<const KacWalk> walk2_;
    std::vector<double> sign1_, sign2_;
};

// ---------------------------------------------------------------------------
// Kind dispatch.
// ---------------------------------------------------------------------------

enum class StructuredKind { Fjlt, Srht, Toeplitz, LwtJl, KacJl };

class StructuredTransform {
  public:
    StructuredTransform(Fjlt t) : impl_(std::move(t)) {}
    StructuredTransform(Srht t) : impl_(std::move(t)) {}
    StructuredTransform(ToeplitzTransform t) : impl_(std::move(t)) {}
    StructuredTransform(LwtJl t) : impl_(std::move(t)) {}
    StructuredTransform(KacJl t) : impl_(std::move(t)) {}

    Vector apply(const Vector& x) const {
        return std::visit([&](const auto& t) { return t.apply(x); }, impl_);
    }

    StructuredKind kind() const {
        return static_cast<StructuredKind>(impl_.index());
    }

    const JlParams& params() const {
        return std::visit([](const auto& t) -> const JlParams& { return t.params(); },
                          impl_);
    }

    std::size_t output_dim() const {
        return std::visit([](const auto& t) { return t.output_dim(); }, impl_);
    }

    template <class T>
    const T& as() const {
        return std::get<T>(impl_);
    }

  private:
    std::variant<Fjlt, Srht, ToeplitzTransform, LwtJl, KacJl> impl_;
};

inline StructuredTransform fjlt_new(const JlParams& p, double c_q = 1.0) {
    return StructuredTransform(Fjlt(p, c_q));
}

inline StructuredTransform srht_new(const JlParams& p) {
    return StructuredTransform(Srht(p));
}

inline StructuredTransform toeplitz_new(const JlParams& p) {
    return StructuredTransform(ToeplitzTransform(p));
}

inline StructuredTransform lwtjl_new(const JlParams& p, SeedMatrix seed,
                                     DenseKind inner = DenseKind::Rademacher) {
    return StructuredTransform(LwtJl(p, std::move(seed), inner));
}

inline StructuredTransform kacjl_new(const JlParams& p, std::size_t n_points,
                                     const KacJlConfig& cfg = {}) {
    return StructuredTransform(KacJl(p, n_points, cfg));
}

}  // namespace jl
