#pragma once

// Evaluation of the coefficients v(omega, omega') in the three regimes
// (h = 1, 1 < h < k, h = k) plus the exact finite-M lattice sum they are the
// M -> infinity limit of.

#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "vandermonde/constraints.hpp"
#include "vandermonde/errors.hpp"
#include "vandermonde/jitter.hpp"
#include "vandermonde/partitions.hpp"
#include "vandermonde/qmc.hpp"

namespace vandermonde {

enum class VMethod { exact_unity, lattice_extrapolation, qmc_constrained, plain_qmc, discrete_finite_M };

inline const char* to_string(VMethod m) {
    switch (m) {
    case VMethod::exact_unity: return "exact_unity";
    case VMethod::lattice_extrapolation: return "lattice_extrapolation";
    case VMethod::qmc_constrained: return "qmc_constrained";
    case VMethod::plain_qmc: return "plain_qmc";
    case VMethod::discrete_finite_M: return "discrete_finite_M";
    }
    return "unknown";
}

struct VValue {
    double value = 0.0;
    double std_error = 0.0;
    VMethod method = VMethod::exact_unity;
    double imag_residual = 0.0;
};

struct IntegrationOptions {
    int qmc_replicates = 16;
    int qmc_log2_points = 14;
    std::uint64_t seed = 0;
    // Pseudo-random points instead of shifted Sobol points (cross-checks).
    bool plain_monte_carlo = false;
    double realness_factor = 10.0;
    double realness_floor = 1e-9;
    // M values for the lattice counts; empty selects 1..(free + 2).
    std::vector<int> lattice_M;
    double degeneracy_tolerance = 1e-9;
    std::uint64_t node_budget = 100'000'000;
};

namespace detail {

using BigRational = boost::multiprecision::cpp_rational;

/// Integer form of a solution map: pivot_i = (sum_f num[i][f] * free_f) / den[i].
struct IntegerSolutionMap {
    std::vector<std::vector<long long>> numerators;
    std::vector<long long> denominators;

    explicit IntegerSolutionMap(const ConstraintSystem& sys) {
        for (const auto& row : sys.solution_map) {
            long long den = 1;
            for (const auto& v : row) den = std::lcm(den, v.denominator());
            std::vector<long long> num;
            num.reserve(row.size());
            for (const auto& v : row) num.push_back(v.numerator() * (den / v.denominator()));
            numerators.push_back(std::move(num));
            denominators.push_back(den);
        }
    }
};

inline std::uint64_t lattice_cost(int free_count, int M) {
    std::uint64_t cost = 1;
    const auto side = static_cast<std::uint64_t>(2 * M + 1);
    for (int i = 0; i < free_count; ++i) {
        if (cost > UINT64_MAX / side) return UINT64_MAX;
        cost *= side;
    }
    return cost;
}

} // namespace detail

/// Calls fn(ell) for every ell in {-M..M}^p satisfying the system exactly.
template <typename Fn>
void for_each_lattice_solution(const ConstraintSystem& sys, int M, std::uint64_t node_budget, Fn&& fn) {
    if (M < 0) throw InvalidArgument("lattice: M must be >= 0");
    const int nfree = sys.free_count();
    if (detail::lattice_cost(nfree, M) > node_budget) {
        std::ostringstream msg;
        msg << "lattice enumeration of (2M+1)^" << nfree << " nodes at M=" << M << " exceeds budget " << node_budget;
        throw ResourceError(msg.str());
    }
    const detail::IntegerSolutionMap map(sys);
    std::vector<long long> free_values(static_cast<std::size_t>(nfree), -M);
    std::vector<long long> ell(static_cast<std::size_t>(sys.p), 0);
    for (;;) {
        bool inside = true;
        for (std::size_t f = 0; f < free_values.size(); ++f) ell[static_cast<std::size_t>(sys.free_columns[f])] = free_values[f];
        for (std::size_t i = 0; i < map.numerators.size() && inside; ++i) {
            long long acc = 0;
            const auto& row = map.numerators[i];
            for (std::size_t f = 0; f < row.size(); ++f) acc += row[f] * free_values[f];
            const long long den = map.denominators[i];
            if (acc % den != 0) {
                inside = false;
                break;
            }
            acc /= den;
            if (acc < -M || acc > M) inside = false;
            ell[static_cast<std::size_t>(sys.pivot_columns[i])] = acc;
        }
        if (inside) fn(std::span<const long long>(ell));

        std::size_t pos = 0;
        while (pos < free_values.size()) {
            if (++free_values[pos] <= M) break;
            free_values[pos] = -M;
            ++pos;
        }
        if (pos == free_values.size()) return;
    }
}

/// #{ell in {-M..M}^p : D ell = 0}.
inline std::uint64_t count_lattice_solutions(const ConstraintSystem& sys, int M, std::uint64_t node_budget) {
    std::uint64_t count = 0;
    for_each_lattice_solution(sys, M, node_budget, [&](std::span<const long long>) { ++count; });
    return count;
}

/// Result of fitting N(M) by a polynomial in x = 2M+1.
struct LatticeFit {
    int degree = 0;
    std::vector<int> M_values;
    std::vector<std::uint64_t> counts;
    Rational leading{0};
    double leading_value = 0.0;
    // Largest |prediction - count| / count over the points not used in the fit.
    double relative_residual = 0.0;
};

/// Fits counts by the exact degree-`degree` interpolant through the first
/// degree+1 points (Newton divided differences over the rationals) and checks
/// the remaining points against it.
inline LatticeFit fit_lattice_polynomial(int degree, const std::vector<int>& M_values,
                                         const std::vector<std::uint64_t>& counts) {
    using detail::BigRational;
    if (static_cast<int>(M_values.size()) < degree + 2) {
        throw InvalidArgument("lattice fit: need at least degree + 2 sample points");
    }
    const std::size_t n = static_cast<std::size_t>(degree) + 1;
    std::vector<BigRational> xs(n);
    std::vector<BigRational> table(n);
    for (std::size_t i = 0; i < n; ++i) {
        xs[i] = BigRational(2 * M_values[i] + 1);
        table[i] = BigRational(boost::multiprecision::cpp_int(counts[i]));
    }
    std::vector<BigRational> coeffs{table[0]};
    for (std::size_t level = 1; level < n; ++level) {
        for (std::size_t i = n - 1; i >= level; --i) {
            table[i] = (table[i] - table[i - 1]) / (xs[i] - xs[i - level]);
        }
        coeffs.push_back(table[level]);
    }

    LatticeFit fit;
    fit.degree = degree;
    fit.M_values = M_values;
    fit.counts = counts;
    const BigRational& top = coeffs.back();
    fit.leading = Rational(static_cast<long long>(boost::multiprecision::numerator(top)),
                           static_cast<long long>(boost::multiprecision::denominator(top)));
    fit.leading_value = static_cast<double>(top);

    for (std::size_t extra = n; extra < M_values.size(); ++extra) {
        const BigRational x(2 * M_values[extra] + 1);
        BigRational value = coeffs.back();
        for (std::size_t i = n - 1; i-- > 0;) value = value * (x - xs[i]) + coeffs[i];
        const BigRational actual(boost::multiprecision::cpp_int(counts[extra]));
        BigRational diff = value - actual;
        if (diff < 0) diff = -diff;
        const double rel = static_cast<double>(diff / (actual == 0 ? BigRational(1) : actual));
        fit.relative_residual = std::max(fit.relative_residual, rel);
    }
    return fit;
}

/// Lattice fit behind v_delta_only, exposed for diagnostics.
inline LatticeFit delta_only_fit(const Partition& omega, const IntegrationOptions& opts = {}) {
    const ConstraintSystem sys = delta_system(omega, finest_partition(omega.blocks_count()));
    const int degree = sys.free_count();
    std::vector<int> Ms = opts.lattice_M;
    if (Ms.empty()) {
        for (int M = 1; M <= degree + 2; ++M) Ms.push_back(M);
    }
    std::vector<std::uint64_t> counts;
    counts.reserve(Ms.size());
    for (int M : Ms) counts.push_back(count_lattice_solutions(sys, M, opts.node_budget));
    return fit_lattice_polynomial(degree, Ms, counts);
}

/// v(omega, [1..k]): the M -> infinity limit of N(M) / (2M+1)^(p-k+1), taken
/// as the leading coefficient of the Ehrhart polynomial of the count.
inline VValue v_delta_only(const Partition& omega, const IntegrationOptions& opts = {}) {
    if (omega.blocks_count() == 1) return {1.0, 0.0, VMethod::exact_unity, 0.0};
    const LatticeFit fit = delta_only_fit(omega, opts);
    if (fit.relative_residual > opts.degeneracy_tolerance) {
        std::ostringstream msg;
        msg << "lattice counts for omega=" << omega << " are not a degree-" << fit.degree
            << " polynomial in 2M+1 (relative residual " << fit.relative_residual << "; counts";
        for (std::size_t i = 0; i < fit.counts.size(); ++i) msg << " N(" << fit.M_values[i] << ")=" << fit.counts[i];
        msg << ')';
        throw DegeneracyError(msg.str());
    }
    return {fit.leading_value, fit.relative_residual, VMethod::lattice_extrapolation, 0.0};
}

namespace detail {

inline void check_beta_d(double beta, int d) {
    if (!(beta > 0.0 && beta <= 1.0)) throw InvalidArgument("beta must lie in (0, 1]");
    if (d < 1) throw InvalidArgument("d must be >= 1");
}

inline void check_realness(const VValue& v, const IntegrationOptions& opts, const Partition& omega,
                           const Partition& omega_prime) {
    const double limit = opts.realness_factor * std::max(v.std_error, opts.realness_floor);
    if (v.imag_residual > limit) {
        std::ostringstream msg;
        msg << "v(" << omega << ", " << omega_prime << ") has imaginary part " << v.imag_residual
            << " above tolerance " << limit;
        throw RealnessViolation(msg.str());
    }
}

} // namespace detail

/// v(omega, omega') for 1 <= h < k by randomized QMC. For h = 1 the integral
/// runs over the whole cube H_p; otherwise pivot variables are eliminated
/// through the constraint system and the integrand carries the indicator that
/// they stay inside [-1/2, 1/2).
inline VValue v_general(const Partition& omega, const Partition& omega_prime, double beta, int d,
                        const JitterDistribution& dist, const IntegrationOptions& opts = {}) {
    detail::check_beta_d(beta, d);
    const int k = omega.blocks_count();
    const int h = omega_prime.blocks_count();
    if (omega_prime.size() != k) throw InvalidArgument("v_general: omega' must partition {1..k}");
    if (k == 1) return {1.0, 0.0, VMethod::exact_unity, 0.0};
    if (h == k) throw InvalidArgument("v_general: h = k is handled by v_delta_only");
    if (opts.qmc_replicates < 2) throw InvalidArgument("v_general: need at least 2 replicates");

    const ConstraintSystem sys = delta_system(omega, omega_prime);
    const WMatrix a = w_matrix(omega);
    const double scale = std::pow(beta, 1.0 / d);
    const double jacobian = boost::rational_cast<double>(sys.jacobian_factor);
    const int dim = sys.free_count();
    const std::uint64_t points = std::uint64_t{1} << opts.qmc_log2_points;
    std::vector<std::vector<double>> pivot_map;
    for (const auto& row : sys.solution_map) {
        std::vector<double> drow;
        for (const auto& v : row) drow.push_back(boost::rational_cast<double>(v));
        pivot_map.push_back(std::move(drow));
    }

    std::vector<double> u(static_cast<std::size_t>(dim));
    std::vector<double> y(static_cast<std::size_t>(sys.p));
    std::vector<double> free_values(static_cast<std::size_t>(dim));
    std::vector<double> re(static_cast<std::size_t>(opts.qmc_replicates));
    std::vector<double> im(static_cast<std::size_t>(opts.qmc_replicates));

    for (int rep = 0; rep < opts.qmc_replicates; ++rep) {
        Rng rng = make_rng(opts.seed, static_cast<std::uint64_t>(rep));
        SobolSequence sobol(dim);
        sobol.randomize(rng);
        complex sum{0.0, 0.0};
        for (std::uint64_t n = 0; n < points; ++n) {
            if (opts.plain_monte_carlo) {
                for (auto& x : u) x = uniform01(rng);
            } else {
                sobol.next(u);
            }
            for (int f = 0; f < dim; ++f) {
                free_values[static_cast<std::size_t>(f)] = u[static_cast<std::size_t>(f)] - 0.5;
                y[static_cast<std::size_t>(sys.free_columns[static_cast<std::size_t>(f)])] = free_values[static_cast<std::size_t>(f)];
            }
            bool inside = true;
            for (std::size_t i = 0; i < pivot_map.size() && inside; ++i) {
                double yc = 0.0;
                for (int f = 0; f < dim; ++f) yc += pivot_map[i][static_cast<std::size_t>(f)] * free_values[static_cast<std::size_t>(f)];
                if (yc < -0.5 || yc >= 0.5) inside = false;
                y[static_cast<std::size_t>(sys.pivot_columns[i])] = yc;
            }
            if (!inside) continue;
            const auto w = a.apply(std::span<const double>(y));
            complex prod{1.0, 0.0};
            for (double wj : w) prod *= dist.cf(scale * wj);
            sum += prod;
        }
        const complex mean = sum * (jacobian / static_cast<double>(points));
        re[static_cast<std::size_t>(rep)] = mean.real();
        im[static_cast<std::size_t>(rep)] = mean.imag();
    }

    const auto reps = static_cast<double>(opts.qmc_replicates);
    const double mean_re = std::accumulate(re.begin(), re.end(), 0.0) / reps;
    const double mean_im = std::accumulate(im.begin(), im.end(), 0.0) / reps;
    double var = 0.0;
    for (double x : re) var += (x - mean_re) * (x - mean_re);
    var /= (reps - 1.0);

    VValue out;
    out.value = mean_re;
    out.std_error = std::sqrt(var / reps);
    out.method = (h == 1) ? VMethod::plain_qmc : VMethod::qmc_constrained;
    out.imag_residual = std::abs(mean_im);
    detail::check_realness(out, opts, omega, omega_prime);
    return out;
}

/// Exact finite-M value psi_M / (2M+1)^(p-h+1): the lattice sum over
/// ell in {-M..M}^p with Kronecker constraints and characteristic-function
/// weights evaluated at beta^(1/d) * w_j(ell) / (2M+1).
inline double v_discrete(const Partition& omega, const Partition& omega_prime, int M, double beta, int d,
                         const JitterDistribution& dist, const IntegrationOptions& opts = {}) {
    detail::check_beta_d(beta, d);
    if (M < 1) throw InvalidArgument("v_discrete: M must be >= 1");
    const int k = omega.blocks_count();
    const int h = omega_prime.blocks_count();
    if (omega_prime.size() != k) throw InvalidArgument("v_discrete: omega' must partition {1..k}");
    if (k == 1) return 1.0;

    const ConstraintSystem sys = delta_system(omega, omega_prime);
    const WMatrix a = w_matrix(omega);
    const double scale = std::pow(beta, 1.0 / d) / static_cast<double>(2 * M + 1);

    // |w_j| <= 2M * (entries in row j), so a lookup table covers every value.
    const long long bound = 2LL * M * a.p;
    std::vector<complex> table(static_cast<std::size_t>(2 * bound + 1));
    for (long long w = -bound; w <= bound; ++w) table[static_cast<std::size_t>(w + bound)] = dist.cf(scale * static_cast<double>(w));

    complex sum{0.0, 0.0};
    for_each_lattice_solution(sys, M, opts.node_budget, [&](std::span<const long long> ell) {
        complex prod{1.0, 0.0};
        for (int j = 0; j < a.k; ++j) {
            const auto& row = a.rows[static_cast<std::size_t>(j)];
            long long w = 0;
            for (int i = 0; i < a.p; ++i) w += row[static_cast<std::size_t>(i)] * ell[static_cast<std::size_t>(i)];
            prod *= table[static_cast<std::size_t>(w + bound)];
        }
        sum += prod;
    });
    const double norm = std::pow(static_cast<double>(2 * M + 1), sys.p - h + 1);
    return sum.real() / norm;
}

} // namespace vandermonde
