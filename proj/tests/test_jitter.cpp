#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "vandermonde/jitter.hpp"

using namespace vandermonde;

namespace {

const std::vector<JitterDistribution>& builtins() {
    static const std::vector<JitterDistribution> all{JitterDistribution::uniform(), JitterDistribution::point_mass(),
                                                     JitterDistribution::triangular()};
    return all;
}

} // namespace

TEST(Cf, Origin) {
    for (const auto& dist : builtins()) {
        EXPECT_NEAR(std::abs(dist.cf(0.0) - complex(1.0, 0.0)), 0.0, 1e-15) << dist.name();
    }
}

TEST(Cf, PointMassUnitModulus) {
    const auto dist = JitterDistribution::point_mass();
    for (double t : {-3.7, -1.0, 0.2, 0.5, 4.4, 100.25}) EXPECT_NEAR(std::abs(dist.cf(t)), 1.0, 1e-14);
}

TEST(Cf, UniformAtOneByQuadrature) {
    using boost::math::quadrature::gauss_kronrod;
    auto re = [](double z) { return std::cos(2.0 * std::numbers::pi * z); };
    auto im = [](double z) { return -std::sin(2.0 * std::numbers::pi * z); };
    const double qr = gauss_kronrod<double, 61>::integrate(re, 0.0, 1.0);
    const double qi = gauss_kronrod<double, 61>::integrate(im, 0.0, 1.0);
    const complex cf = JitterDistribution::uniform().cf(1.0);
    EXPECT_NEAR(cf.real(), qr, 1e-12);
    EXPECT_NEAR(cf.imag(), qi, 1e-12);
    EXPECT_NEAR(std::abs(cf), 0.0, 1e-15);
}

TEST(Cf, TriangularByQuadrature) {
    // density of U1 + U2 with U_i ~ U(0, 1/2): 4z on [0, 1/2], 4(1 - z) on [1/2, 1]
    using boost::math::quadrature::gauss_kronrod;
    for (double t : {0.3, 1.1, 2.7}) {
        auto f = [](double z) { return z < 0.5 ? 4.0 * z : 4.0 * (1.0 - z); };
        auto re = [&](double z) { return f(z) * std::cos(2.0 * std::numbers::pi * t * z); };
        auto im = [&](double z) { return -f(z) * std::sin(2.0 * std::numbers::pi * t * z); };
        const double qr = gauss_kronrod<double, 61>::integrate(re, 0.0, 0.5) + gauss_kronrod<double, 61>::integrate(re, 0.5, 1.0);
        const double qi = gauss_kronrod<double, 61>::integrate(im, 0.0, 0.5) + gauss_kronrod<double, 61>::integrate(im, 0.5, 1.0);
        const complex cf = JitterDistribution::triangular().cf(t);
        EXPECT_NEAR(cf.real(), qr, 1e-12);
        EXPECT_NEAR(cf.imag(), qi, 1e-12);
    }
}

TEST(Cf, BoundedAndContinuousNearZero) {
    for (const auto& dist : builtins()) {
        for (double t = -20.0; t <= 20.0; t += 0.0137) EXPECT_LE(std::abs(dist.cf(t)), 1.0 + 1e-15);
        EXPECT_NEAR(std::abs(dist.cf(1e-9) - dist.cf(0.0)), 0.0, 1e-8);
        EXPECT_NEAR(std::abs(dist.cf(-1e-5) - dist.cf(1e-5)), 0.0, 1e-4);
    }
}

TEST(Cf, SymmetryAboutHalf) {
    for (const auto& dist : {JitterDistribution::uniform(), JitterDistribution::triangular()}) {
        EXPECT_TRUE(dist.symmetric_about_half());
        for (double t = -9.0; t <= 9.0; t += 0.173) {
            const complex shifted = std::polar(1.0, std::numbers::pi * t) * dist.cf(t);
            EXPECT_NEAR(shifted.imag(), 0.0, 1e-15);
        }
    }
}

TEST(Sample, PointMass) {
    const auto xs = JitterDistribution::point_mass().sample(5, 123);
    EXPECT_EQ(xs, (std::vector<double>{0.5, 0.5, 0.5, 0.5, 0.5}));
}

TEST(Sample, UniformMean) {
    const auto xs = JitterDistribution::uniform().sample(1000000, 42);
    double mean = 0.0;
    for (double x : xs) {
        ASSERT_GE(x, 0.0);
        ASSERT_LT(x, 1.0);
        mean += x;
    }
    mean /= static_cast<double>(xs.size());
    EXPECT_NEAR(mean, 0.5, 0.002);
}

TEST(Sample, TriangularVariance) {
    const auto xs = JitterDistribution::triangular().sample(1000000, 42);
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= static_cast<double>(xs.size());
    double var = 0.0;
    for (double x : xs) var += (x - mean) * (x - mean);
    var /= static_cast<double>(xs.size());
    EXPECT_NEAR(var, 1.0 / 24.0, 0.05 / 24.0);
}

TEST(Sample, DeterministicPerSeed) {
    const auto dist = JitterDistribution::uniform();
    EXPECT_EQ(dist.sample(100, 9), dist.sample(100, 9));
    EXPECT_NE(dist.sample(100, 9), dist.sample(100, 10));
    EXPECT_THROW(dist.sample(0, 1), InvalidArgument);
}

TEST(Sample, ConsistentWithCf) {
    for (const auto& dist : builtins()) {
        const auto xs = dist.sample(1000000, 7);
        for (double t : {0.3, 1.1, 2.7}) {
            complex acc{0.0, 0.0};
            for (double x : xs) acc += std::polar(1.0, -2.0 * std::numbers::pi * t * x);
            acc /= static_cast<double>(xs.size());
            EXPECT_LT(std::abs(acc - dist.cf(t)), 5e-3) << dist.name() << " t=" << t;
        }
    }
}

TEST(Parse, Names) {
    EXPECT_EQ(JitterDistribution::parse("uniform").kind(), JitterKind::uniform01);
    EXPECT_EQ(JitterDistribution::parse("point").kind(), JitterKind::point_mass_half);
    EXPECT_EQ(JitterDistribution::parse("triangular").kind(), JitterKind::triangular01);
    EXPECT_THROW(JitterDistribution::parse("gaussian"), InvalidArgument);
}

TEST(Custom, RejectsWrongMean) {
    auto cf = [](double t) { return std::polar(1.0, -2.0 * std::numbers::pi * t * 0.25); };
    auto sampler = [](Rng&) { return 0.25; };
    EXPECT_THROW(JitterDistribution::custom("quarter", cf, sampler, true), InvalidArgument);
}

TEST(Custom, AcceptsMeanHalf) {
    auto cf = [](double t) { return std::polar(1.0, -std::numbers::pi * t); };
    auto sampler = [](Rng&) { return 0.5; };
    const auto dist = JitterDistribution::custom("half", cf, sampler, true);
    EXPECT_EQ(dist.name(), "half");
    EXPECT_NEAR(std::abs(dist.cf(0.7) - JitterDistribution::point_mass().cf(0.7)), 0.0, 1e-15);
}
