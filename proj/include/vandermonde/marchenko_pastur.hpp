#pragma once

// Marchenko-Pastur law with ratio beta in (0, 1]: density, exact moments
// (Narayana polynomials) and expectations by quadrature.

#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "vandermonde/errors.hpp"
#include "vandermonde/partitions.hpp"

namespace vandermonde {

inline void check_mp_beta(double beta) {
    if (!(beta > 0.0 && beta <= 1.0)) throw InvalidArgument("Marchenko-Pastur: beta must lie in (0, 1]");
}

/// Support [lower, upper] = [(1 - sqrt(beta))^2, (1 + sqrt(beta))^2].
struct MpSupport {
    double lower;
    double upper;
};

inline MpSupport mp_support(double beta) {
    check_mp_beta(beta);
    const double s = std::sqrt(beta);
    return {(1.0 - s) * (1.0 - s), (1.0 + s) * (1.0 + s)};
}

inline double mp_density(double beta, double z) {
    const auto [lo, hi] = mp_support(beta);
    if (z <= lo || z >= hi || z <= 0.0) return 0.0;
    return std::sqrt((hi - z) * (z - lo)) / (2.0 * std::numbers::pi * z * beta);
}

/// Narayana number N(p,k) = C(p,k) C(p,k-1) / p.
inline std::uint64_t narayana(int p, int k) {
    if (p < 1 || k < 1 || k > p) throw InvalidArgument("narayana: need 1 <= k <= p");
    const unsigned __int128 prod = static_cast<unsigned __int128>(detail::binomial(p, k)) * detail::binomial(p, k - 1);
    const unsigned __int128 q = prod / static_cast<unsigned>(p);
    if (q > UINT64_MAX) throw std::overflow_error("narayana overflow");
    return static_cast<std::uint64_t>(q);
}

/// sum_k beta^(p-k) N(p,k).
inline double mp_moment(int p, double beta) {
    check_mp_beta(beta);
    if (p < 1) throw InvalidArgument("mp_moment: need p >= 1");
    double total = 0.0;
    for (int k = 1; k <= p; ++k) total += std::pow(beta, p - k) * static_cast<double>(narayana(p, k));
    return total;
}

/// E[g(lambda)] under the law. Uses z = (1 + beta) + 2 sqrt(beta) cos(theta),
/// which turns the square-root edges into a smooth integrand on [0, pi].
inline double mp_expectation(double beta, const std::function<double(double)>& g, double tolerance = 1e-11) {
    check_mp_beta(beta);
    const double centre = 1.0 + beta;
    const double radius = 2.0 * std::sqrt(beta);
    auto integrand = [&](double theta) {
        const double z = centre + radius * std::cos(theta);
        const double s = std::sin(theta);
        if (z <= 0.0) {
            // Only reachable at theta = pi with beta = 1; limit of the integrand there.
            return g(0.0) * 2.0 / std::numbers::pi;
        }
        return g(z) * radius * radius * s * s / (2.0 * std::numbers::pi * beta * z);
    };
    double error = 0.0;
    const double value = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
        integrand, 0.0, std::numbers::pi, 20, tolerance, &error);
    if (!(error <= 1e-8 * std::max(1.0, std::abs(value)))) {
        std::ostringstream msg;
        msg << "Marchenko-Pastur quadrature did not converge (error estimate " << error << ")";
        throw NumericalError(msg.str());
    }
    return value;
}

} // namespace vandermonde
