#pragma once

// Finite realizations of G_d and T_d = beta G_d G_d^H for jittered grids:
// index maps, sample positions, matrix construction, spectra, histograms.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <vector>

#include <Eigen/Dense>

#include "vandermonde/errors.hpp"
#include "vandermonde/jitter.hpp"
#include "vandermonde/parallel.hpp"

namespace vandermonde {

namespace detail {

inline long long ipow(long long base, int exp) {
    long long out = 1;
    for (int i = 0; i < exp; ++i) {
        if (__builtin_mul_overflow(out, base, &out)) throw ResourceError("integer overflow in matrix dimensions");
    }
    return out;
}

} // namespace detail

struct EnsembleConfig {
    int d = 1;
    int M = 1;
    int rho = 3;
    JitterDistribution dist = JitterDistribution::uniform();
    // Cap on n_rows * n_cols (entries of G).
    long long max_entries = 16'000'000;

    long long n_rows() const { return detail::ipow(2LL * M + 1, d); }
    long long n_cols() const { return detail::ipow(rho, d); }
    double beta() const { return std::pow(static_cast<double>(2 * M + 1) / static_cast<double>(rho), d); }

    void validate() const {
        if (d < 1) throw InvalidArgument("ensemble: d must be >= 1");
        if (M < 1) throw InvalidArgument("ensemble: M must be >= 1");
        if (2 * M + 1 > rho) throw InvalidArgument("ensemble: need 2M+1 <= rho so that beta <= 1");
        const long long rows = n_rows();
        const long long cols = n_cols();
        if (rows > max_entries / cols) {
            std::ostringstream msg;
            msg << "ensemble: " << rows << " x " << cols << " matrix exceeds the budget of " << max_entries << " entries";
            throw ResourceError(msg.str());
        }
    }
};

/// nu(ell) = sum_m (2M+1)^(m-1) ell_m with ell_m in [-M, M].
inline long long nu_index(std::span<const int> ell, int M) {
    long long nu = 0;
    long long base = 1;
    for (int value : ell) {
        if (value < -M || value > M) throw InvalidArgument("nu_index: component outside [-M, M]");
        nu += base * value;
        base *= 2LL * M + 1;
    }
    return nu;
}

inline std::vector<int> nu_inverse(long long nu, int M, int d) {
    const long long base = 2LL * M + 1;
    std::vector<int> ell(static_cast<std::size_t>(d));
    for (int m = 0; m < d; ++m) {
        long long digit = ((nu + M) % base + base) % base - M;
        ell[static_cast<std::size_t>(m)] = static_cast<int>(digit);
        nu = (nu - digit) / base;
    }
    if (nu != 0) throw InvalidArgument("nu_inverse: index out of range");
    return ell;
}

/// 0-based storage row of ell: nu(ell) + ((2M+1)^d - 1) / 2.
inline long long row_index(std::span<const int> ell, int M) {
    return nu_index(ell, M) + (detail::ipow(2LL * M + 1, static_cast<int>(ell.size())) - 1) / 2;
}

/// mu(q) = sum_m rho^(m-1) q_m with q_m in [0, rho-1].
inline long long mu_index(std::span<const int> q, int rho) {
    long long mu = 0;
    long long base = 1;
    for (int value : q) {
        if (value < 0 || value >= rho) throw InvalidArgument("mu_index: component outside [0, rho-1]");
        mu += base * value;
        base *= rho;
    }
    return mu;
}

inline std::vector<int> mu_inverse(long long mu, int rho, int d) {
    if (mu < 0) throw InvalidArgument("mu_inverse: negative index");
    std::vector<int> q(static_cast<std::size_t>(d));
    for (int m = 0; m < d; ++m) {
        q[static_cast<std::size_t>(m)] = static_cast<int>(mu % rho);
        mu /= rho;
    }
    if (mu != 0) throw InvalidArgument("mu_inverse: index out of range");
    return q;
}

/// r x d matrix; row mu(q) holds x = q/rho + jitter/rho.
using Positions = Eigen::MatrixXd;

inline Positions sample_positions(const EnsembleConfig& config, std::uint64_t seed) {
    config.validate();
    const long long r = config.n_cols();
    Positions x(r, config.d);
    Rng rng = make_rng(seed);
    const double inv_rho = 1.0 / config.rho;
    for (long long mu = 0; mu < r; ++mu) {
        const auto q = mu_inverse(mu, config.rho, config.d);
        for (int m = 0; m < config.d; ++m) {
            const double value = (q[static_cast<std::size_t>(m)] + config.dist.draw(rng)) * inv_rho;
            x(mu, m) = std::min(value, std::nextafter(1.0, 0.0));
        }
    }
    return x;
}

/// Entry (row_index(ell), mu) = (2M+1)^(-d/2) exp(-j 2 pi ell^T x_mu).
inline Eigen::MatrixXcd build_G(const EnsembleConfig& config, const Positions& positions) {
    config.validate();
    const long long rows = config.n_rows();
    const long long cols = config.n_cols();
    if (positions.rows() != cols || positions.cols() != config.d) throw InvalidArgument("build_G: positions shape mismatch");
    const int side = 2 * config.M + 1;
    const double norm = std::pow(static_cast<double>(side), -0.5 * config.d);

    Eigen::MatrixXcd g(rows, cols);
    std::vector<complex> phase(static_cast<std::size_t>(side * config.d));
    for (long long q = 0; q < cols; ++q) {
        for (int m = 0; m < config.d; ++m) {
            for (int l = -config.M; l <= config.M; ++l) {
                phase[static_cast<std::size_t>(m * side + l + config.M)] = std::polar(1.0, -2.0 * std::numbers::pi * l * positions(q, m));
            }
        }
        // Row s enumerates ell with the first component varying fastest.
        for (long long s = 0; s < rows; ++s) {
            long long rest = s;
            complex entry{norm, 0.0};
            for (int m = 0; m < config.d; ++m) {
                entry *= phase[static_cast<std::size_t>(m * side + rest % side)];
                rest /= side;
            }
            g(s, q) = entry;
        }
    }
    return g;
}

namespace detail {

inline void symmetrize(Eigen::MatrixXcd& t) {
    const Eigen::MatrixXcd sym = 0.5 * (t + t.adjoint());
    t = sym;
    for (Eigen::Index i = 0; i < t.rows(); ++i) t(i, i) = complex(t(i, i).real(), 0.0);
}

} // namespace detail

/// T = beta G G^H, symmetrized to be exactly Hermitian.
inline Eigen::MatrixXcd build_T(const Eigen::MatrixXcd& g, double beta) {
    Eigen::MatrixXcd t = beta * (g * g.adjoint());
    detail::symmetrize(t);
    return t;
}

/// Same matrix as build_T(build_G(...)), assembled from the Toeplitz symbol
/// c(D) = (1/r) sum_q exp(-j 2 pi x_q^T D) for D in [-2M, 2M]^d.
inline Eigen::MatrixXcd build_T_direct(const EnsembleConfig& config, const Positions& positions) {
    config.validate();
    const int M = config.M;
    const int d = config.d;
    const int side = 2 * M + 1;
    const int wide = 4 * M + 1;
    const long long cols = config.n_cols();
    const long long symbols = detail::ipow(wide, d);

    std::vector<complex> symbol(static_cast<std::size_t>(symbols), complex{0.0, 0.0});
    std::vector<complex> phase(static_cast<std::size_t>(wide * d));
    std::vector<complex> partial(static_cast<std::size_t>(symbols));
    for (long long q = 0; q < cols; ++q) {
        for (int m = 0; m < d; ++m) {
            const complex step = std::polar(1.0, -2.0 * std::numbers::pi * positions(q, m));
            complex value = std::polar(1.0, 2.0 * std::numbers::pi * 2.0 * M * positions(q, m));
            for (int l = 0; l < wide; ++l) {
                phase[static_cast<std::size_t>(m * wide + l)] = value;
                value *= step;
            }
        }
        for (long long s = 0; s < symbols; ++s) {
            long long rest = s;
            complex entry{1.0, 0.0};
            for (int m = 0; m < d; ++m) {
                entry *= phase[static_cast<std::size_t>(m * wide + rest % wide)];
                rest /= wide;
            }
            symbol[static_cast<std::size_t>(s)] += entry;
        }
    }
    const double inv_r = 1.0 / static_cast<double>(cols);
    for (auto& c : symbol) c *= inv_r;

    const long long rows = config.n_rows();
    std::vector<std::vector<int>> ell(static_cast<std::size_t>(rows), std::vector<int>(static_cast<std::size_t>(d)));
    for (long long s = 0; s < rows; ++s) {
        long long rest = s;
        for (int m = 0; m < d; ++m) {
            ell[static_cast<std::size_t>(s)][static_cast<std::size_t>(m)] = static_cast<int>(rest % side) - M;
            rest /= side;
        }
    }
    Eigen::MatrixXcd t(rows, rows);
    for (long long a = 0; a < rows; ++a) {
        for (long long b = 0; b < rows; ++b) {
            long long index = 0;
            long long base = 1;
            for (int m = 0; m < d; ++m) {
                const int diff = ell[static_cast<std::size_t>(a)][static_cast<std::size_t>(m)] - ell[static_cast<std::size_t>(b)][static_cast<std::size_t>(m)];
                index += base * (diff + 2 * M);
                base *= wide;
            }
            t(a, b) = symbol[static_cast<std::size_t>(index)];
        }
    }
    detail::symmetrize(t);
    return t;
}

/// Lowest eigenvalue accepted before clamping to zero.
inline constexpr double eigenvalue_floor = -1e-10;

/// Ascending eigenvalues of a Hermitian matrix, negatives above the floor
/// clamped to zero.
inline std::vector<double> eigenvalues(const Eigen::MatrixXcd& t) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(t, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
        const auto path = std::filesystem::temp_directory_path() / "vandermonde_failed_eigensolve.txt";
        std::ofstream dump(path);
        dump.precision(17);
        dump << t << '\n';
        throw NumericalError("Hermitian eigensolver did not converge; matrix written to " + path.string());
    }
    std::vector<double> out(solver.eigenvalues().data(), solver.eigenvalues().data() + solver.eigenvalues().size());
    for (double& v : out) {
        if (v < eigenvalue_floor) {
            std::ostringstream msg;
            msg << "eigenvalue " << v << " below floor " << eigenvalue_floor << " for a positive semidefinite matrix";
            throw NumericalError(msg.str());
        }
        if (v < 0.0) v = 0.0;
    }
    return out;
}

struct SpectrumSample {
    std::vector<std::vector<double>> eigenvalues;
    int trials = 0;
    std::uint64_t seed = 0;
    double beta = 0.0;
    long long n_rows = 0;
};

/// Eigenvalues of `trials` independent realizations; trial t uses positions
/// drawn with seed + t.
inline SpectrumSample simulate(const EnsembleConfig& config, int trials, std::uint64_t seed) {
    config.validate();
    if (trials < 1) throw InvalidArgument("simulate: trials must be >= 1");
    SpectrumSample sample;
    sample.trials = trials;
    sample.seed = seed;
    sample.beta = config.beta();
    sample.n_rows = config.n_rows();
    sample.eigenvalues.resize(static_cast<std::size_t>(trials));
    parallel_for(static_cast<std::size_t>(trials), [&](std::size_t t) {
        const Positions x = sample_positions(config, seed + t);
        sample.eigenvalues[t] = eigenvalues(build_T_direct(config, x));
    });
    return sample;
}

/// Average over trials of (1/n) sum_i lambda_i^p.
inline double empirical_moment(const SpectrumSample& sample, int p) {
    if (sample.eigenvalues.empty()) throw InvalidArgument("empirical_moment: empty sample");
    double total = 0.0;
    for (const auto& trial : sample.eigenvalues) {
        if (trial.empty()) throw InvalidArgument("empirical_moment: empty trial");
        double acc = 0.0;
        for (double v : trial) acc += std::pow(v, p);
        total += acc / static_cast<double>(trial.size());
    }
    return total / static_cast<double>(sample.eigenvalues.size());
}

/// Per-trial moments, for standard errors across trials.
inline std::vector<double> per_trial_moments(const SpectrumSample& sample, int p) {
    std::vector<double> out;
    for (const auto& trial : sample.eigenvalues) {
        double acc = 0.0;
        for (double v : trial) acc += std::pow(v, p);
        out.push_back(acc / static_cast<double>(trial.size()));
    }
    return out;
}

struct Histogram {
    std::vector<double> edges;
    std::vector<double> densities;
};

/// Density histogram of all eigenvalues pooled over trials. The default range
/// is [0, max eigenvalue].
inline Histogram histogram(const SpectrumSample& sample, int bins, std::optional<std::pair<double, double>> range = std::nullopt) {
    if (sample.eigenvalues.empty()) throw InvalidArgument("histogram: empty sample");
    if (bins < 1) throw InvalidArgument("histogram: bins must be >= 1");
    double lo = 0.0;
    double hi = 0.0;
    if (range) {
        std::tie(lo, hi) = *range;
    } else {
        for (const auto& trial : sample.eigenvalues)
            for (double v : trial) hi = std::max(hi, v);
        hi = std::nextafter(hi, std::numeric_limits<double>::infinity());
    }
    if (!(hi > lo)) throw InvalidArgument("histogram: empty range");
    Histogram out;
    out.edges.resize(static_cast<std::size_t>(bins) + 1);
    const double width = (hi - lo) / bins;
    for (int b = 0; b <= bins; ++b) out.edges[static_cast<std::size_t>(b)] = lo + width * b;
    out.edges.back() = hi;
    std::vector<double> counts(static_cast<std::size_t>(bins), 0.0);
    double total = 0.0;
    for (const auto& trial : sample.eigenvalues) {
        for (double v : trial) {
            total += 1.0;
            if (v < lo || v >= hi) continue;
            const auto b = std::min<std::size_t>(static_cast<std::size_t>((v - lo) / width), static_cast<std::size_t>(bins) - 1);
            counts[b] += 1.0;
        }
    }
    out.densities.resize(static_cast<std::size_t>(bins));
    for (int b = 0; b < bins; ++b) out.densities[static_cast<std::size_t>(b)] = counts[static_cast<std::size_t>(b)] / (total * width);
    return out;
}

inline void write_histogram_csv(std::ostream& os, const Histogram& hist) {
    os << "bin_left,bin_right,density\n";
    os.precision(17);
    for (std::size_t b = 0; b < hist.densities.size(); ++b) {
        os << hist.edges[b] << ',' << hist.edges[b + 1] << ',' << hist.densities[b] << '\n';
    }
}

inline void write_eigenvalues_csv(std::ostream& os, const SpectrumSample& sample) {
    os << "trial,eigenvalue\n";
    os.precision(17);
    for (std::size_t t = 0; t < sample.eigenvalues.size(); ++t) {
        for (double v : sample.eigenvalues[t]) os << t << ',' << v << '\n';
    }
}

struct ShapeResolution {
    int M = 0;
    int rho = 0;
    double beta_actual = 0.0;
};

/// Picks (M, rho) with (2M+1)^d <= size_budget. The largest M whose best rho
/// reaches beta_target within relative_tolerance wins; if none does, the pair
/// with the smallest |beta - beta_target| (larger M on ties).
inline ShapeResolution resolve_shape(double beta_target, int d, long long size_budget, double relative_tolerance = 0.01) {
    if (!(beta_target > 0.0 && beta_target <= 1.0)) throw InvalidArgument("resolve_shape: beta must lie in (0, 1]");
    if (d < 1) throw InvalidArgument("resolve_shape: d must be >= 1");
    int max_M = 0;
    while (detail::ipow(2LL * (max_M + 1) + 1, d) <= size_budget) ++max_M;
    if (max_M < 1) throw InvalidArgument("resolve_shape: size budget admits no M >= 1");

    std::optional<ShapeResolution> best;
    double best_err = std::numeric_limits<double>::infinity();
    for (int M = max_M; M >= 1; --M) {
        const int side = 2 * M + 1;
        const double ideal = side / std::pow(beta_target, 1.0 / d);
        ShapeResolution local;
        double local_err = std::numeric_limits<double>::infinity();
        for (long long rho : {static_cast<long long>(std::floor(ideal)), static_cast<long long>(std::ceil(ideal))}) {
            if (rho < side) continue;
            const double beta = std::pow(static_cast<double>(side) / static_cast<double>(rho), d);
            const double err = std::abs(beta - beta_target);
            if (err < local_err) {
                local_err = err;
                local = {M, static_cast<int>(rho), beta};
            }
        }
        if (local_err <= relative_tolerance * beta_target) return local;
        if (local_err < best_err) {
            best_err = local_err;
            best = local;
        }
    }
    return *best;
}

} // namespace vandermonde
