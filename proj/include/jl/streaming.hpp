// Turnstile-model linear sketches: the AMS second-moment sketch, Count
// Sketch point/F2 queries, mergeable state for sharded streams, and a
// heavy-hitter heap over Count Sketch for insertion-only streams.
//
// Sizing: width w = ceil(4/eps^2) per repetition and K = smallest odd
// >= ceil(8 ln(1/delta)) repetitions; K is forced odd so the median is a
// realized repetition value.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <stdexcept>
#include <vector>

#include "jl/core.hpp"
#include "jl/hashing.hpp"

namespace jl {

struct TurnstileUpdate {
    std::size_t index;
    long long value;  // in [-M, M]
};

namespace detail {

inline std::size_t sketch_width(double eps) {
    if (!(eps > 0.0 && eps < 1.0))
        throw std::invalid_argument("sketch: eps must lie in (0,1)");
    return static_cast<std::size_t>(std::ceil(4.0 / (eps * eps)));
}

inline std::size_t sketch_repetitions(double delta) {
    if (!(delta > 0.0 && delta < 1.0))
        throw std::invalid_argument("sketch: delta must lie in (0,1)");
    auto k = static_cast<std::size_t>(std::ceil(8.0 * std::log(1.0 / delta)));
    if (k < 1) k = 1;
    if (k % 2 == 0) ++k;
    return k;
}

inline double median_of(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return v[v.size() / 2];  // size is odd
}

}  // namespace detail

// Every repetition is a dense sign-hashed row set: accumulator[r][b] holds
// sum_i sigma_{r,b}(i) x_i / sqrt(w). Updates touch all K*w cells.
class AmsSketch {
  public:
    AmsSketch(std::size_t d, double eps, double delta, std::uint64_t seed)
        : d_(d), eps_(eps), delta_(delta), seed_(seed),
          w_(detail::sketch_width(eps)), reps_(detail::sketch_repetitions(delta)),
          acc_(w_ * reps_, 0.0) {
        if (d < 1) throw std::invalid_argument("AmsSketch: d must be >= 1");
        signs_.reserve(w_ * reps_);
        SeedStream stream{seed, 0};
        for (std::size_t i = 0; i < w_ * reps_; ++i)
            signs_.emplace_back(stream.next());
    }

    void update(const TurnstileUpdate& u) {
        if (u.index >= d_) throw std::out_of_range("AmsSketch: index out of range");
        const double v = static_cast<double>(u.value) / std::sqrt(static_cast<double>(w_));
        for (std::size_t r = 0; r < reps_; ++r) {
            double* row = acc_.data() + r * w_;
            const SignHash* sh = signs_.data() + r * w_;
            for (std::size_t b = 0; b < w_; ++b)
                row[b] += static_cast<double>(sh[b](u.index)) * v;
        }
    }

    // median over repetitions of the squared accumulator norm
    double f2_query() const {
        std::vector<double> est(reps_);
        for (std::size_t r = 0; r < reps_; ++r) {
            double s = 0.0;
            const double* row = acc_.data() + r * w_;
            for (std::size_t b = 0; b < w_; ++b) s += row[b] * row[b];
            est[r] = s;
        }
        return detail::median_of(std::move(est));
    }

    double repetition_f2(std::size_t r) const {
        double s = 0.0;
        const double* row = acc_.data() + r * w_;
        for (std::size_t b = 0; b < w_; ++b) s += row[b] * row[b];
        return s;
    }

    void merge(const AmsSketch& other) {
        if (d_ != other.d_ || w_ != other.w_ || reps_ != other.reps_ ||
            seed_ != other.seed_)
            throw std::invalid_argument("AmsSketch::merge: incompatible sketches");
        for (std::size_t i = 0; i < acc_.size(); ++i) acc_[i] += other.acc_[i];
    }

    std::size_t dimension() const { return d_; }
    std::size_t width() const { return w_; }
    std::size_t repetitions() const { return reps_; }
    std::uint64_t seed() const { return seed_; }
    const std::vector<double>& accumulators() const { return acc_; }

  private:
    std::size_t d_;
    double eps_, delta_;
    std::uint64_t seed_;
    std::size_t w_, reps_;
    std::vector<SignHash> signs_;  // reps x width
    std::vector<double> acc_;
};

// One bucket per key per repetition: a pairwise bucket hash and a 4-wise
// sign hash. Updates cost exactly K bucket touches.
class CountSketch {
  public:
    CountSketch(std::size_t d, double eps, double delta, std::uint64_t seed)
        : d_(d), eps_(eps), delta_(delta), seed_(seed),
          w_(detail::sketch_width(eps)), reps_(detail::sketch_repetitions(delta)),
          tables_(w_ * reps_, 0.0) {
        if (d < 1) throw std::invalid_argument("CountSketch: d must be >= 1");
        buckets_.reserve(reps_);
        signs_.reserve(reps_);
        SeedStream stream{seed, 0};
        for (std::size_t r = 0; r < reps_; ++r) {
            buckets_.emplace_back(2, w_, stream.next());
            signs_.emplace_back(stream.next());
        }
    }

    void update(const TurnstileUpdate& u) {
        if (u.index >= d_) throw std::out_of_range("CountSketch: index out of range");
        for (std::size_t r = 0; r < reps_; ++r) {
            tables_[r * w_ + buckets_[r](u.index)] +=
                static_cast<double>(signs_[r](u.index)) * static_cast<double>(u.value);
        }
    }

    // median over repetitions of sigma_r(i) * table[r][h_r(i)]
    double point_query(std::size_t i) const {
        if (i >= d_) throw std::out_of_range("CountSketch: index out of range");
        std::vector<double> est(reps_);
        for (std::size_t r = 0; r < reps_; ++r)
            est[r] = static_cast<double>(signs_[r](i)) * tables_[r * w_ + buckets_[r](i)];
        return detail::median_of(std::move(est));
    }

    double f2_query() const {
        std::vector<double> est(reps_);
        for (std::size_t r = 0; r < reps_; ++r) {
            double s = 0.0;
            const double* row = tables_.data() + r * w_;
            for (std::size_t b = 0; b < w_; ++b) s += row[b] * row[b];
            est[r] = s;
        }
        return detail::median_of(std::move(est));
    }

    void merge(const CountSketch& other) {
        if (d_ != other.d_ || w_ != other.w_ || reps_ != other.reps_ ||
            seed_ != other.seed_)
            throw std::invalid_argument("CountSketch::merge: incompatible sketches");
        for (std::size_t i = 0; i < tables_.size(); ++i) tables_[i] += other.tables_[i];
    }

    std::size_t dimension() const { return d_; }
    std::size_t width() const { return w_; }
    std::size_t repetitions() const { return reps_; }
    std::uint64_t seed() const { return seed_; }
    const std::vector<double>& tables() const { return tables_; }

  private:
    std::size_t d_;
    double eps_, delta_;
    std::uint64_t seed_;
    std::size_t w_, reps_;
    std::vector<PolyHash> buckets_;
    std::vector<SignHash> signs_;
    std::vector<double> tables_;
};

// At most k (index, estimate) entries backed by a Count Sketch. Insertion-only
// streams. On ties the larger index is evicted first.
class HeavyHitterHeap {
  public:
    HeavyHitterHeap(std::size_t k, std::size_t d, double eps, double delta,
                    std::uint64_t seed)
        : capacity_(k), cs_(d, eps, delta, seed) {
        if (k < 1) throw std::invalid_argument("HeavyHitterHeap: k must be >= 1");
    }

    void process(const TurnstileUpdate& u) {
        if (u.value <= 0)
            throw std::invalid_argument("HeavyHitterHeap: insertion-only stream");
        cs_.update(u);
        const double est = cs_.point_query(u.index);
        auto it = estimates_.find(u.index);
        if (it != estimates_.end()) {
            order_.erase({it->second, u.index});
            it->second = est;
            order_.insert({est, u.index});
            return;
        }
        estimates_.emplace(u.index, est);
        order_.insert({est, u.index});
        if (estimates_.size() > capacity_) {
            const auto victim = *order_.begin();  // min estimate, larger index first
            order_.erase(order_.begin());
            estimates_.erase(victim.second);
        }
    }

    std::vector<std::pair<std::size_t, double>> items_descending() const {
        std::vector<std::pair<std::size_t, double>> out;
        out.reserve(estimates_.size());
        for (auto it = order_.rbegin(); it != order_.rend(); ++it)
            out.emplace_back(it->second, it->first);
        return out;
    }

    std::size_t size() const { return estimates_.size(); }
    std::size_t capacity() const { return capacity_; }
    bool contains(std::size_t index) const { return estimates_.count(index) > 0; }
    const CountSketch& sketch() const { return cs_; }

  private:
    struct MinOrder {
        // ascending estimate; among equal estimates the larger index sorts
        // first so it is evicted first
        bool operator()(const std::pair<double, std::size_t>& a,
                        const std::pair<double, std::size_t>& b) const {
            if (a.first != b.first) return a.first < b.first;
            return a.second > b.second;
        }
    };

    std::size_t capacity_;
    CountSketch cs_;
    std::map<std::size_t, double> estimates_;
    std::set<std::pair<double, std::size_t>, MinOrder> order_;
};

inline HeavyHitterHeap topk_process(std::span<const TurnstileUpdate> stream,
                                    std::size_t k, double eps, double delta,
                                    std::size_t d, std::uint64_t seed) {
    HeavyHitterHeap heap(k, d, eps, delta, seed);
    for (const auto& u : stream) heap.process(u);
    return heap;
}

}  // namespace jl
