// Empirical verification: failure-probability estimation across seeded
// trials, whole-point-set checks, the conditional dot-product property,
// hard-instance experiments and wall-clock embedding benchmarks.
#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "jl/core.hpp"
#include "jl/sparse.hpp"
#include "jl/structured.hpp"
#include "jl/transform.hpp"

namespace jl {

// ---------------------------------------------------------------------------
// Trial input generators. at(trial) is a pure function of (seed, trial).
// ---------------------------------------------------------------------------

enum class GenKind { UnitSphere, BinaryK, FhHard, LwtHard, Fixed };

class VectorGen {
  public:
    static VectorGen unit_sphere(std::size_t dim, std::uint64_t seed) {
        VectorGen g;
        g.kind_ = GenKind::UnitSphere;
        g.dim_ = dim;
        g.seed_ = seed;
        return g;
    }

    // k ones, remaining entries zero (unnormalised).
    static VectorGen binary_k(std::size_t dim, std::size_t k) {
        VectorGen g;
        g.kind_ = GenKind::BinaryK;
        g.dim_ = dim;
        g.k_ = k;
        return g;
    }

    static VectorGen fh_hard(std::size_t dim, std::size_t k) {
        VectorGen g;
        g.kind_ = GenKind::FhHard;
        g.dim_ = dim;
        g.k_ = k;
        return g;
    }

    static VectorGen lwt_hard(const SeedMatrix& seed_matrix, double delta) {
        VectorGen g;
        g.kind_ = GenKind::LwtHard;
        g.fixed_ = {lwt_hard_instance(seed_matrix, delta)};
        g.dim_ = g.fixed_.front().size();
        return g;
    }

    static VectorGen fixed(std::vector<Vector> vectors) {
        if (vectors.empty()) throw std::invalid_argument("VectorGen: empty fixed set");
        VectorGen g;
        g.kind_ = GenKind::Fixed;
        g.dim_ = vectors.front().size();
        g.fixed_ = std::move(vectors);
        return g;
    }

    Vector at(std::size_t trial) const {
        switch (kind_) {
            case GenKind::UnitSphere: {
                Rng rng(derive_seed(seed_, trial));
                Vector x(dim_);
                double norm = 0.0;
                do {
                    norm = 0.0;
                    for (auto& v : x) {
                        v = rng.next_gaussian();
                        norm += v * v;
                    }
                } while (norm == 0.0);
                norm = std::sqrt(norm);
                for (auto& v : x) v /= norm;
                return x;
            }
            case GenKind::BinaryK: {
                Vector x(dim_, 0.0);
                for (std::size_t i = 0; i < k_ && i < dim_; ++i) x[i] = 1.0;
                return x;
            }
            case GenKind::FhHard:
                return fh_hard_instance(k_, dim_);
            case GenKind::LwtHard:
                return fixed_.front();
            case GenKind::Fixed:
                return fixed_[trial % fixed_.size()];
        }
        throw std::logic_error("VectorGen: bad kind");
    }

    std::size_t dim() const { return dim_; }
    GenKind kind() const { return kind_; }

  private:
    GenKind kind_ = GenKind::UnitSphere;
    std::size_t dim_ = 0;
    std::uint64_t seed_ = 0;
    std::size_t k_ = 1;
    std::vector<Vector> fixed_;
};

// ---------------------------------------------------------------------------
// Failure-probability estimation.
// ---------------------------------------------------------------------------

struct TrialRecord {
    std::uint64_t seed;
    double sq_ratio;
};

// Monte Carlo estimate of Pr[ | ||f(x)||^2 - ||x||^2 | > eps ||x||^2 ] with a
// fresh transform per trial (seed = derive_seed(params.seed, trial)).
// Trials are processed in fixed chunks of 64 so the mean reduction is
// bit-identical for any worker count; failure counts are integers either way.
inline DistortionStats estimate_failure(TransformKind kind, const JlParams& params,
                                        const VectorGen& gen, std::size_t trials,
                                        const TransformOptions& opt = {},
                                        unsigned threads = 0,
                                        std::vector<TrialRecord>* log = nullptr) {
    if (trials < 100) throw std::invalid_argument("estimate_failure: trials must be >= 100");
    if (gen.dim() != params.d)
        throw std::invalid_argument("estimate_failure: generator dimension mismatch");
    constexpr std::size_t kChunk = 64;
    const std::size_t n_chunks = (trials + kChunk - 1) / kChunk;
    std::vector<KahanSum> chunk_sums(n_chunks);
    std::vector<std::size_t> chunk_failures(n_chunks, 0);
    if (log) log->assign(trials, TrialRecord{});

    const auto run_chunk = [&](std::size_t c) {
        const std::size_t begin = c * kChunk;
        const std::size_t end = std::min(begin + kChunk, trials);
        for (std::size_t t = begin; t < end; ++t) {
            JlParams p = params;
            p.seed = derive_seed(params.seed, t);
            const Transform f = make_transform(kind, p, opt);
            const Vector x = gen.at(t);
            const double ratio = sq_norm_ratio(x, f.apply(x));
            chunk_sums[c].add(ratio);
            if (std::abs(ratio - 1.0) > params.eps) ++chunk_failures[c];
            if (log) (*log)[t] = TrialRecord{p.seed, ratio};
        }
    };

    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    if (threads <= 1 || n_chunks <= 1) {
        for (std::size_t c = 0; c < n_chunks; ++c) run_chunk(c);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        const unsigned n_workers = std::min<std::size_t>(threads, n_chunks);
        pool.reserve(n_workers);
        for (unsigned w = 0; w < n_workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t c = next.fetch_add(1); c < n_chunks;
                     c = next.fetch_add(1))
                    run_chunk(c);
            });
        }
        for (auto& th : pool) th.join();
    }

    DistortionStats stats;
    stats.trials = trials;
    KahanSum total;
    for (std::size_t c = 0; c < n_chunks; ++c) {
        total.add(chunk_sums[c].sum);
        stats.failures += chunk_failures[c];
    }
    stats.finalize(total);
    return stats;
}

// ---------------------------------------------------------------------------
// Whole point-set verification.
// ---------------------------------------------------------------------------

struct PointsetReport {
    bool pass = false;
    double worst_pair_distortion = 0.0;
    std::size_t resamples = 0;  // transforms drawn beyond the first
    std::size_t pairs = 0;
};

// Samples one transform and checks every pairwise squared distance within
// 1 +- eps. Duplicate points embed identically (the maps are deterministic
// functions of their input), so zero distances pass without division.
// With resample_limit > 0 the transform is redrawn until the set passes.
inline PointsetReport verify_pointset(TransformKind kind, const JlParams& params,
                                      const std::vector<Vector>& points,
                                      const TransformOptions& opt = {},
                                      std::size_t resample_limit = 0) {
    if (points.size() < 2)
        throw std::invalid_argument("verify_pointset: need at least 2 points");
    PointsetReport report;
    for (std::size_t attempt = 0;; ++attempt) {
        JlParams p = params;
        p.seed = derive_seed(params.seed, attempt);
        const Transform f = make_transform(kind, p, opt);
        std::vector<Vector> embedded;
        embedded.reserve(points.size());
        for (const auto& x : points) embedded.push_back(f.apply(x));

        bool pass = true;
        double worst = 0.0;
        std::size_t pairs = 0;
        for (std::size_t i = 0; i < points.size(); ++i) {
            for (std::size_t j = i + 1; j < points.size(); ++j) {
                ++pairs;
                double orig = 0.0;
                for (std::size_t q = 0; q < points[i].size(); ++q) {
                    const double diff = points[i][q] - points[j][q];
                    orig += diff * diff;
                }
                double emb = 0.0;
                for (std::size_t q = 0; q < embedded[i].size(); ++q) {
                    const double diff = embedded[i][q] - embedded[j][q];
                    emb += diff * diff;
                }
                if (orig == 0.0) continue;
                const double distortion = std::abs(emb / orig - 1.0);
                worst = std::max(worst, distortion);
                if (distortion > params.eps) pass = false;
            }
        }
        report.pass = pass;
        report.worst_pair_distortion = worst;
        report.resamples = attempt;
        report.pairs = pairs;
        if (pass || attempt >= resample_limit) return report;
    }
}

// ---------------------------------------------------------------------------
// Conditional dot-product property.
// ---------------------------------------------------------------------------

struct DotCheckReport {
    std::size_t total = 0;          // (pair, seed) trials
    std::size_t conditioned = 0;    // trials where the norm conditions held
    std::size_t violations = 0;     // conditioned trials breaking the bound
    std::size_t unconditional_violations = 0;
};

// For each seeded transform and pair (x, y): when the transform
// eps-preserves ||x||^2, ||y||^2, ||x+y||^2, ||x-y||^2 and the norms of the
// unit-normalised sum and difference, the polarisation identity forces
// |<f(x), f(y)> - <x, y>| <= eps ||x|| ||y||. Violations under the condition
// are implementation bugs; the unconditional rate is reported separately.
inline DotCheckReport dot_product_check(TransformKind kind, const JlParams& params,
                                        std::size_t n_pairs, std::size_t n_seeds,
                                        const TransformOptions& opt = {}) {
    DotCheckReport report;
    Rng pair_rng(derive_seed(params.seed, 1u << 20));
    std::vector<std::pair<Vector, Vector>> pairs;
    pairs.reserve(n_pairs);
    for (std::size_t i = 0; i < n_pairs; ++i) {
        Vector x(params.d), y(params.d);
        for (auto& v : x) v = pair_rng.next_gaussian();
        for (auto& v : y) v = pair_rng.next_gaussian();
        const double sx = 0.5 + 1.5 * pair_rng.next_double();
        const double sy = 0.5 + 1.5 * pair_rng.next_double();
        const double nx = std::sqrt(squared_norm(x));
        const double ny = std::sqrt(squared_norm(y));
        for (auto& v : x) v *= sx / nx;
        for (auto& v : y) v *= sy / ny;
        pairs.emplace_back(std::move(x), std::move(y));
    }

    const auto preserved = [&](const Vector& u, const Vector& fu) {
        const double nu = squared_norm(u);
        if (nu == 0.0) return true;
        return std::abs(squared_norm(fu) / nu - 1.0) <= params.eps;
    };

    for (std::size_t s = 0; s < n_seeds; ++s) {
        JlParams p = params;
        p.seed = derive_seed(params.seed, s);
        const Transform f = make_transform(kind, p, opt);
        for (const auto& [x, y] : pairs) {
            ++report.total;
            const Vector fx = f.apply(x);
            const Vector fy = f.apply(y);
            const double nx = std::sqrt(squared_norm(x));
            const double ny = std::sqrt(squared_norm(y));
            // linearity: f of sums and normalised combinations follows from fx, fy
            Vector sum(x.size()), diff(x.size()), usum(x.size()), udiff(x.size());
            Vector fsum(fx.size()), fdiff(fx.size()), fusum(fx.size()), fudiff(fx.size());
            for (std::size_t q = 0; q < x.size(); ++q) {
                sum[q] = x[q] + y[q];
                diff[q] = x[q] - y[q];
                usum[q] = x[q] / nx + y[q] / ny;
                udiff[q] = x[q] / nx - y[q] / ny;
            }
            for (std::size_t q = 0; q < fx.size(); ++q) {
                fsum[q] = fx[q] + fy[q];
                fdiff[q] = fx[q] - fy[q];
                fusum[q] = fx[q] / nx + fy[q] / ny;
                fudiff[q] = fx[q] / nx - fy[q] / ny;
            }
            const bool conditioned = preserved(x, fx) && preserved(y, fy) &&
                                     preserved(sum, fsum) && preserved(diff, fdiff) &&
                                     preserved(usum, fusum) && preserved(udiff, fudiff);
            const double err = std::abs(dot(fx, fy) - dot(x, y));
            const bool violated = err > params.eps * nx * ny;
            if (violated) ++report.unconditional_violations;
            if (conditioned) {
                ++report.conditioned;
                if (violated) ++report.violations;
            }
        }
    }
    return report;
}

// ---------------------------------------------------------------------------
// Benchmarks.
// ---------------------------------------------------------------------------

struct BenchRecord {
    TransformKind kind;
    std::size_t d = 0;
    std::size_t m = 0;
    double median_ns = 0.0;
    std::size_t reps = 0;
};

// Median wall time of apply() on a fixed dense vector; construction is
// excluded. Fast applies are batched within each timed rep so the reading is
// well above clock and allocator jitter; the record still reports per-apply
// time.
inline std::vector<BenchRecord> bench_embed(const std::vector<TransformKind>& kinds,
                                            const std::vector<std::size_t>& d_list,
                                            std::size_t m, std::size_t reps,
                                            std::uint64_t seed = 1,
                                            const TransformOptions& opt = {}) {
    if (reps < 5) throw std::invalid_argument("bench_embed: reps must be >= 5");
    using clock = std::chrono::steady_clock;
    const auto elapsed_ns = [](clock::time_point a, clock::time_point b) {
        return static_cast<double>(
            std::chrono::duration_cast<std::chrono::nanoseconds>(b - a).count());
    };
    std::vector<BenchRecord> records;
    records.reserve(kinds.size() * d_list.size());
    for (const auto kind : kinds) {
        for (const auto d : d_list) {
            JlParams p;
            p.d = d;
            p.m = m;
            p.eps = 0.25;
            p.delta = 0.05;
            p.seed = derive_seed(seed, d);
            const Transform f = make_transform(kind, p, opt);
            Rng rng(derive_seed(seed, d + 1));
            Vector x(d);
            for (auto& v : x) v = rng.next_gaussian();
            double sink = f.apply(x)[0];  // warm-up, also sizes the batch
            const auto w0 = clock::now();
            sink += f.apply(x)[0];
            const auto w1 = clock::now();
            const double single_ns = std::max(1.0, elapsed_ns(w0, w1));
            const auto batch = std::clamp<std::size_t>(
                static_cast<std::size_t>(2e6 / single_ns), 1, 64);
            std::vector<double> times(reps);
            for (std::size_t r = 0; r < reps; ++r) {
                const auto t0 = clock::now();
                for (std::size_t b = 0; b < batch; ++b) sink += f.apply(x)[0];
                const auto t1 = clock::now();
                times[r] = elapsed_ns(t0, t1) / static_cast<double>(batch);
            }
            if (!std::isfinite(sink)) throw std::runtime_error("bench: non-finite output");
            std::sort(times.begin(), times.end());
            records.push_back({kind, d, m, times[reps / 2], reps});
        }
    }
    return records;
}

// ---------------------------------------------------------------------------
// Hard-instance experiments.
// ---------------------------------------------------------------------------

enum class HardInstanceTarget { FeatureHashing, Lwt, ToeplitzFhShape };

struct HardInstanceReport {
    HardInstanceTarget target;
    std::size_t trials = 0;
    double measured_rate = 0.0;   // failure rate, or zero-output rate for lwt
    double reference_rate = 0.0;  // 2^-||x||_0 for lwt, 0 otherwise
    double delta = 0.0;
    std::size_t nnz = 0;          // lwt instance support size
    DistortionStats stats;        // fh / toeplitz targets
};

inline HardInstanceReport hard_instance_experiment(HardInstanceTarget target,
                                                   const JlParams& params,
                                                   std::size_t k, std::size_t trials,
                                                   const TransformOptions& opt = {}) {
    HardInstanceReport report;
    report.target = target;
    report.trials = trials;
    report.delta = params.delta;
    switch (target) {
        case HardInstanceTarget::FeatureHashing: {
            const auto gen = VectorGen::fh_hard(params.d, k);
            report.stats = estimate_failure(TransformKind::FeatureHashing, params, gen,
                                            trials, opt);
            report.measured_rate = report.stats.failure_rate;
            return report;
        }
        case HardInstanceTarget::ToeplitzFhShape: {
            // exploratory only: no bound is asserted for this shape
            const auto gen = VectorGen::fh_hard(params.d, k);
            report.stats =
                estimate_failure(TransformKind::Toeplitz, params, gen, trials, opt);
            report.measured_rate = report.stats.failure_rate;
            return report;
        }
        case HardInstanceTarget::Lwt: {
            const SeedMatrix seed_mat =
                opt.lwt_seed ? *opt.lwt_seed : SeedMatrix::partial_hadamard(2, 4);
            const Vector x = lwt_hard_instance(seed_mat, params.delta);
            std::size_t nnz = 0;
            for (double v : x) nnz += v != 0.0;
            report.nnz = nnz;
            report.reference_rate = std::pow(2.0, -static_cast<double>(nnz));
            JlParams p = params;
            p.d = x.size();
            std::size_t zero_outputs = 0;
            for (std::size_t t = 0; t < trials; ++t) {
                p.seed = derive_seed(params.seed, t);
                const LwtJl f(p, seed_mat, opt.lwt_inner);
                const Vector y = f.apply(x);
                bool all_zero = true;
                for (double v : y) all_zero = all_zero && v == 0.0;
                zero_outputs += all_zero;
            }
            report.measured_rate =
                static_cast<double>(zero_outputs) / static_cast<double>(trials);
            return report;
        }
    }
    throw std::invalid_argument("hard_instance_experiment: unknown target");
}

}  // namespace jl
