#pragma once

// Within-cell jitter distributions on [0,1): sampler plus characteristic
// function cf(t) = E[exp(-j 2 pi t x)].

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "vandermonde/errors.hpp"

namespace vandermonde {

using complex = std::complex<double>;

/// Seedable generator shared by every sampler in the library.
using Rng = std::mt19937_64;

/// Independent stream for (seed, stream) pairs.
inline Rng make_rng(std::uint64_t seed, std::uint64_t stream = 0) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                      0x9e3779b9u};
    return Rng(seq);
}

/// Uniform double in [0,1) from the top 53 bits; never returns 1.
inline double uniform01(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// sin(x)/x with the removable singularity filled in.
inline double sinc_unnormalized(double x) {
    if (std::abs(x) < 1e-4) {
        const double x2 = x * x;
        return 1.0 - x2 / 6.0 + x2 * x2 / 120.0;
    }
    return std::sin(x) / x;
}

enum class JitterKind { uniform01, point_mass_half, triangular01, custom };

class JitterDistribution {
public:
    using CfFn = std::function<complex(double)>;
    using SamplerFn = std::function<double(Rng&)>;

    static JitterDistribution uniform() { return JitterDistribution(JitterKind::uniform01, "uniform", true); }
    static JitterDistribution point_mass() { return JitterDistribution(JitterKind::point_mass_half, "point", true); }
    static JitterDistribution triangular() { return JitterDistribution(JitterKind::triangular01, "triangular", true); }

    /// User-supplied distribution. The mean is checked through the slope of
    /// the characteristic function at the origin and must be 1/2.
    static JitterDistribution custom(std::string name, CfFn cf, SamplerFn sampler, bool symmetric_about_half) {
        if (!cf || !sampler) throw InvalidArgument("jitter: custom distribution needs cf and sampler");
        JitterDistribution dist(JitterKind::custom, std::move(name), symmetric_about_half);
        dist.cf_ = std::move(cf);
        dist.sampler_ = std::move(sampler);
        const complex at0 = dist.cf(0.0);
        if (std::abs(at0 - complex(1.0, 0.0)) > 1e-9) throw InvalidArgument("jitter: cf(0) must be 1");
        // cf(t) ~ 1 - j 2 pi t E[x] for small t.
        const double h = 1e-6;
        const double mean = -(dist.cf(h).imag() - dist.cf(-h).imag()) / (4.0 * std::numbers::pi * h);
        if (std::abs(mean - 0.5) > 1e-6) throw InvalidArgument("jitter: distribution mean must be 1/2");
        return dist;
    }

    /// Parses the CLI names "uniform", "point", "triangular".
    static JitterDistribution parse(std::string_view name) {
        if (name == "uniform") return uniform();
        if (name == "point") return point_mass();
        if (name == "triangular") return triangular();
        throw InvalidArgument("jitter: unknown distribution '" + std::string(name) + "'");
    }

    JitterKind kind() const { return kind_; }
    const std::string& name() const { return name_; }
    double mean() const { return 0.5; }
    bool symmetric_about_half() const { return symmetric_; }

    complex cf(double t) const {
        constexpr double pi = std::numbers::pi;
        switch (kind_) {
        case JitterKind::uniform01:
            return std::polar(1.0, -pi * t) * sinc_unnormalized(pi * t);
        case JitterKind::point_mass_half:
            return std::polar(1.0, -pi * t);
        case JitterKind::triangular01: {
            // Sum of two independent U[0,1/2).
            const double s = sinc_unnormalized(pi * t / 2.0);
            return std::polar(1.0, -pi * t) * (s * s);
        }
        case JitterKind::custom:
            return cf_(t);
        }
        return {};
    }

    double draw(Rng& rng) const {
        switch (kind_) {
        case JitterKind::uniform01:
            return uniform01(rng);
        case JitterKind::point_mass_half:
            return 0.5;
        case JitterKind::triangular01: {
            const double a = uniform01(rng);
            const double b = uniform01(rng);
            return 0.5 * (a + b);
        }
        case JitterKind::custom:
            return sampler_(rng);
        }
        return 0.5;
    }

    /// n i.i.d. draws, reproducible for a given seed.
    std::vector<double> sample(std::size_t n, std::uint64_t seed) const {
        if (n == 0) throw InvalidArgument("jitter: sample size must be >= 1");
        Rng rng = make_rng(seed);
        std::vector<double> out(n);
        for (auto& x : out) x = draw(rng);
        return out;
    }

private:
    JitterDistribution(JitterKind kind, std::string name, bool symmetric)
        : kind_(kind), name_(std::move(name)), symmetric_(symmetric) {}

    JitterKind kind_;
    std::string name_;
    bool symmetric_;
    CfFn cf_;
    SamplerFn sampler_;
};

} // namespace vandermonde
