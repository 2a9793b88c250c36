#include <gtest/gtest.h>

#include <cmath>

#include "jl/core.hpp"
#include "jl/dense.hpp"

namespace {

jl::JlParams params(std::size_t d, std::size_t m, std::uint64_t seed) {
    jl::JlParams p;
    p.d = d;
    p.m = m;
    p.eps = 0.25;
    p.delta = 0.05;
    p.seed = seed;
    return p;
}

TEST(Gaussian, EntryMoments) {
    const auto t = jl::DenseTransform::gaussian(params(1000, 1000, 5));
    double mean = 0.0, var = 0.0;
    for (double v : t.matrix()) mean += v;
    mean /= static_cast<double>(t.matrix().size());
    for (double v : t.matrix()) var += (v - mean) * (v - mean);
    var /= static_cast<double>(t.matrix().size());
    EXPECT_NEAR(mean, 0.0, 0.01);
    EXPECT_NEAR(var, 1.0, 0.02);
}

TEST(Gaussian, SeedDeterminism) {
    const auto a = jl::DenseTransform::gaussian(params(64, 32, 17));
    const auto b = jl::DenseTransform::gaussian(params(64, 32, 17));
    EXPECT_EQ(a.matrix(), b.matrix());
    const auto c = jl::DenseTransform::gaussian(params(64, 32, 18));
    EXPECT_NE(a.matrix(), c.matrix());
}

TEST(Gaussian, OrthonormalizedRows) {
    const auto t = jl::DenseTransform::gaussian(params(64, 16, 3), true);
    const auto& a = t.matrix();
    const std::size_t d = 64;
    for (std::size_t i = 0; i < 16; ++i) {
        for (std::size_t k = i; k < 16; ++k) {
            double ip = 0.0;
            for (std::size_t j = 0; j < d; ++j) ip += a[i * d + j] * a[k * d + j];
            if (i == k)
                EXPECT_NEAR(ip, static_cast<double>(d), 1e-9 * d);  // rows scaled sqrt(d)
            else
                EXPECT_NEAR(ip, 0.0, 1e-9 * d);
        }
    }
    EXPECT_THROW(jl::DenseTransform::gaussian(params(8, 16, 3), true),
                 std::invalid_argument);
}

TEST(Rademacher, EntriesAreSigns) {
    const auto t = jl::DenseTransform::rademacher(params(1000, 1000, 11));
    double mean = 0.0;
    for (double v : t.matrix()) {
        EXPECT_DOUBLE_EQ(std::abs(v), 1.0);
        mean += v;
    }
    mean /= static_cast<double>(t.matrix().size());
    EXPECT_NEAR(mean, 0.0, 0.01);
    const auto b = jl::DenseTransform::rademacher(params(1000, 1000, 11));
    EXPECT_EQ(t.matrix(), b.matrix());
}

TEST(Achlioptas, ThirdSparsity) {
    const auto t = jl::DenseTransform::achlioptas(params(1000, 1000, 23), 1.0 / 3.0);
    const double v = std::sqrt(3.0);
    std::size_t zeros = 0;
    double var = 0.0;
    for (double a : t.matrix()) {
        if (a == 0.0) {
            ++zeros;
        } else {
            EXPECT_DOUBLE_EQ(std::abs(a), v);
        }
        var += a * a;  // mean is 0 by symmetry of +-v
    }
    const auto n = static_cast<double>(t.matrix().size());
    EXPECT_NEAR(static_cast<double>(zeros) / n, 2.0 / 3.0, 0.01);
    EXPECT_NEAR(var / n, 1.0, 0.02);
}

TEST(Achlioptas, FullDensityIsRademacher) {
    const auto t = jl::DenseTransform::achlioptas(params(100, 50, 9), 1.0);
    for (double a : t.matrix()) EXPECT_DOUBLE_EQ(std::abs(a), 1.0);
    EXPECT_THROW(jl::DenseTransform::achlioptas(params(4, 4, 1), 0.0),
                 std::invalid_argument);
    EXPECT_THROW(jl::DenseTransform::achlioptas(params(4, 4, 1), 1.5),
                 std::invalid_argument);
}

TEST(DenseApply, ZeroMapsToZero) {
    const auto t = jl::DenseTransform::gaussian(params(32, 8, 2));
    const jl::Vector y = t.apply(jl::Vector(32, 0.0));
    for (double v : y) EXPECT_EQ(v, 0.0);
}

TEST(DenseApply, SingleCoordinateRademacherIsExact) {
    // d = 1: every output entry is +-c/sqrt(m), so the squared norm is c^2
    // exactly when m is a power of two.
    const auto t = jl::DenseTransform::rademacher(params(1, 16, 31));
    const jl::Vector y = t.apply({3.0});
    for (double v : y) EXPECT_DOUBLE_EQ(std::abs(v), 0.75);
    EXPECT_DOUBLE_EQ(jl::squared_norm(y), 9.0);
}

TEST(DenseApply, Linearity) {
    const auto t = jl::DenseTransform::achlioptas(params(48, 24, 77), 0.25);
    jl::Rng rng(4);
    jl::Vector x(48), y(48);
    for (auto& v : x) v = rng.next_gaussian();
    for (auto& v : y) v = rng.next_gaussian();
    const double a = 1.7, b = -0.3;
    jl::Vector combo(48);
    for (std::size_t i = 0; i < 48; ++i) combo[i] = a * x[i] + b * y[i];
    const jl::Vector lhs = t.apply(combo);
    const jl::Vector fx = t.apply(x), fy = t.apply(y);
    for (std::size_t i = 0; i < lhs.size(); ++i)
        EXPECT_NEAR(lhs[i], a * fx[i] + b * fy[i], 1e-12);
}

TEST(DenseApply, DimensionMismatch) {
    const auto t = jl::DenseTransform::rademacher(params(8, 4, 1));
    EXPECT_THROW(t.apply(jl::Vector(9, 0.0)), std::invalid_argument);
}

// mean of ||f(x)||^2/||x||^2 over freshly seeded transforms, all three kinds
TEST(DenseUnbiasedness, MeanRatioNearOne) {
    const std::size_t d = 64, m = 32, trials = 10000;
    jl::Vector x(d);
    jl::Rng rng(12);
    for (auto& v : x) v = rng.next_gaussian();
    const double nx = jl::squared_norm(x);
    for (int kind = 0; kind < 3; ++kind) {
        jl::KahanSum sum;
        for (std::size_t t = 0; t < trials; ++t) {
            auto p = params(d, m, jl::derive_seed(900 + kind, t));
            const auto f = kind == 0   ? jl::DenseTransform::gaussian(p)
                           : kind == 1 ? jl::DenseTransform::rademacher(p)
                                       : jl::DenseTransform::achlioptas(p, 1.0 / 3.0);
            sum.add(jl::squared_norm(f.apply(x)) / nx);
        }
        const double mean = sum.sum / static_cast<double>(trials);
        EXPECT_GE(mean, 0.98) << "kind " << kind;
        EXPECT_LE(mean, 1.02) << "kind " << kind;
    }
}

}  // namespace
