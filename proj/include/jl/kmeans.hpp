// Lloyd's algorithm, the centroid and pairwise cost formulations, and the
// embed-then-cluster pipeline with its cost-transfer check.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "jl/core.hpp"
#include "jl/transform.hpp"

namespace jl {

struct Partition {
    std::vector<std::size_t> assignment;  // point index -> cluster id in [0, k)
    std::size_t k = 0;
    std::vector<std::size_t> sizes;

    static Partition from_assignment(std::vector<std::size_t> assignment, std::size_t k) {
        Partition p;
        p.assignment = std::move(assignment);
        p.k = k;
        p.sizes.assign(k, 0);
        for (auto c : p.assignment) {
            if (c >= k) throw std::invalid_argument("Partition: cluster id out of range");
            ++p.sizes[c];
        }
        return p;
    }
};

struct ClusteringResult {
    std::vector<Vector> centers;
    Partition partition;
    double cost = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
    std::vector<double> cost_history;  // cost after each assignment/mean step
};

struct LloydConfig {
    std::size_t max_iter = 100;
    double rel_tol = 1e-9;
};

namespace detail {

inline double sq_dist(const Vector& a, const Vector& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double diff = a[i] - b[i];
        s += diff * diff;
    }
    return s;
}

inline std::vector<Vector> cluster_means(const std::vector<Vector>& points,
                                         const Partition& part) {
    const std::size_t dim = points.front().size();
    std::vector<Vector> mu(part.k, Vector(dim, 0.0));
    for (std::size_t i = 0; i < points.size(); ++i) {
        Vector& m = mu[part.assignment[i]];
        for (std::size_t j = 0; j < dim; ++j) m[j] += points[i][j];
    }
    for (std::size_t c = 0; c < part.k; ++c) {
        if (part.sizes[c] == 0) throw std::domain_error("empty cluster");
        const double inv = 1.0 / static_cast<double>(part.sizes[c]);
        for (auto& v : mu[c]) v *= inv;
    }
    return mu;
}

}  // namespace detail

// sum_i sum_{x in X_i} ||x - mean(X_i)||^2
inline double cost_centroid(const std::vector<Vector>& points, const Partition& part) {
    if (points.empty()) throw std::invalid_argument("cost_centroid: empty point set");
    const auto mu = detail::cluster_means(points, part);
    double cost = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i)
        cost += detail::sq_dist(points[i], mu[part.assignment[i]]);
    return cost;
}

// (1/2) sum_i (1/|X_i|) sum_{x,y in X_i} ||x - y||^2 over ordered pairs.
inline double cost_pairwise(const std::vector<Vector>& points, const Partition& part) {
    if (points.empty()) throw std::invalid_argument("cost_pairwise: empty point set");
    std::vector<std::vector<std::size_t>> members(part.k);
    for (std::size_t i = 0; i < points.size(); ++i)
        members[part.assignment[i]].push_back(i);
    double cost = 0.0;
    for (std::size_t c = 0; c < part.k; ++c) {
        if (members[c].empty()) throw std::domain_error("empty cluster");
        double s = 0.0;
        for (std::size_t a = 0; a < members[c].size(); ++a)
            for (std::size_t b = a + 1; b < members[c].size(); ++b)
                s += detail::sq_dist(points[members[c][a]], points[members[c][b]]);
        // ordered pairs double the unordered sum
        cost += s / static_cast<double>(members[c].size());
    }
    return cost;
}

// Lloyd iterations: assign to the nearest center (ties resolved toward the
// lowest cluster id), recompute means, stop when the relative cost change
// drops below rel_tol or max_iter is hit. Centers start at k distinct points
// chosen uniformly. An emptied cluster is repaired by promoting the point
// farthest from its current center.
inline ClusteringResult lloyd(const std::vector<Vector>& points, std::size_t k,
                              std::uint64_t seed, const LloydConfig& cfg = {}) {
    const std::size_t n = points.size();
    if (k < 1 || k > n) throw std::invalid_argument("lloyd: need 1 <= k <= |X|");
    Rng rng(seed);
    // k distinct indices, Floyd sampling
    std::vector<std::size_t> init;
    init.reserve(k);
    for (std::size_t j = n - k; j < n; ++j) {
        const std::size_t v = rng.next_below(j + 1);
        if (std::find(init.begin(), init.end(), v) != init.end())
            init.push_back(j);
        else
            init.push_back(v);
    }
    std::vector<Vector> centers;
    centers.reserve(k);
    for (auto idx : init) centers.push_back(points[idx]);

    std::vector<std::size_t> assignment(n, 0);
    std::vector<double> history;
    double prev_cost = std::numeric_limits<double>::infinity();
    std::size_t iter = 0;
    bool converged = false;
    for (; iter < cfg.max_iter; ++iter) {
        std::vector<std::size_t> sizes(k, 0);
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t best = 0;
            double best_d = detail::sq_dist(points[i], centers[0]);
            for (std::size_t c = 1; c < k; ++c) {
                const double dist = detail::sq_dist(points[i], centers[c]);
                if (dist < best_d) {
                    best_d = dist;
                    best = c;
                }
            }
            assignment[i] = best;
            ++sizes[best];
        }
        for (std::size_t c = 0; c < k; ++c) {
            while (sizes[c] == 0) {
                std::size_t far = n;
                double far_d = -1.0;
                for (std::size_t i = 0; i < n; ++i) {
                    if (sizes[assignment[i]] <= 1) continue;
                    const double dist = detail::sq_dist(points[i], centers[assignment[i]]);
                    if (dist > far_d) {
                        far_d = dist;
                        far = i;
                    }
                }
                if (far == n) throw std::logic_error("lloyd: cannot repair empty cluster");
                --sizes[assignment[far]];
                assignment[far] = c;
                ++sizes[c];
                centers[c] = points[far];
            }
        }
        Partition part = Partition::from_assignment(assignment, k);
        centers = detail::cluster_means(points, part);
        const double cost = cost_centroid(points, part);
        history.push_back(cost);
        if (std::isfinite(prev_cost) &&
            prev_cost - cost <= cfg.rel_tol * std::max(prev_cost, 1e-300)) {
            prev_cost = std::min(prev_cost, cost);
            converged = true;
            ++iter;
            break;
        }
        prev_cost = cost;
    }

    ClusteringResult result;
    result.partition = Partition::from_assignment(assignment, k);
    result.centers = detail::cluster_means(points, result.partition);
    result.cost = cost_centroid(points, result.partition);
    result.iterations = iter;
    result.converged = converged;
    result.cost_history = std::move(history);
    return result;
}

struct JlKmeansReport {
    std::size_t m = 0;                 // embedded dimension
    double cost_low = 0.0;             // kappa_m: low-dim cost of the low-dim partition
    double cost_lifted = 0.0;          // kappa_d: the same partition costed in R^d
    double cost_high_direct = 0.0;     // Lloyd run directly in R^d, same init seed
    double ratio_checkpoint = 0.0;     // (1 - eps) * kappa_d / kappa_m
    bool distances_preserved = false;  // all pairwise distances within 1 +- eps
    double worst_pair_distortion = 0.0;
    std::size_t iterations_low = 0;
    std::size_t iterations_high = 0;
};

// Embed with one sampled transform (m defaults to target_dim_fm(eps, n)),
// run Lloyd in both spaces from the same init seed, lift the low-dim
// partition back to R^d, and check whether that transform eps-preserved all
// pairwise squared distances (the hypothesis of the cost-transfer bound).
inline JlKmeansReport jl_kmeans(const std::vector<Vector>& points, std::size_t k,
                                double eps, TransformKind kind,
                                std::uint64_t seed, std::size_t m = 0,
                                const TransformOptions& opt = {},
                                const LloydConfig& lloyd_cfg = {}) {
    if (points.size() < 2) throw std::invalid_argument("jl_kmeans: need |X| >= 2");
    const std::size_t d = points.front().size();
    JlParams params;
    params.d = d;
    params.m = m ? m : target_dim_fm(eps, static_cast<double>(points.size()));
    if (kind == TransformKind::Identity) params.m = d;
    params.eps = eps;
    params.seed = derive_seed(seed, 0);
    const Transform f = make_transform(kind, params, opt);

    std::vector<Vector> embedded;
    embedded.reserve(points.size());
    for (const auto& x : points) embedded.push_back(f.apply(x));

    JlKmeansReport report;
    report.m = f.output_dim();
    report.distances_preserved = true;
    for (std::size_t i = 0; i < points.size(); ++i) {
        for (std::size_t j = i + 1; j < points.size(); ++j) {
            const double orig = detail::sq_dist(points[i], points[j]);
            const double emb = detail::sq_dist(embedded[i], embedded[j]);
            if (orig == 0.0) continue;  // duplicates embed identically
            const double distortion = std::abs(emb / orig - 1.0);
            report.worst_pair_distortion = std::max(report.worst_pair_distortion, distortion);
            if (distortion > eps) report.distances_preserved = false;
        }
    }

    const std::uint64_t init_seed = derive_seed(seed, 1);
    const ClusteringResult low = lloyd(embedded, k, init_seed, lloyd_cfg);
    const ClusteringResult high = lloyd(points, k, init_seed, lloyd_cfg);

    report.cost_low = low.cost;
    report.cost_lifted = cost_centroid(points, low.partition);
    report.cost_high_direct = high.cost;
    report.ratio_checkpoint =
        low.cost > 0.0 ? (1.0 - eps) * report.cost_lifted / low.cost : 0.0;
    report.iterations_low = low.iterations;
    report.iterations_high = high.iterations;
    return report;
}

}  // namespace jl
