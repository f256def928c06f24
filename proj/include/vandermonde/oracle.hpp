#pragma once

// Brute-force verifiers: the distinct-label root-of-unity sum
// against its partition expansion, and trace moments from explicit matrix
// powers.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

#include "vandermonde/constraints.hpp"
#include "vandermonde/ensemble.hpp"
#include "vandermonde/errors.hpp"
#include "vandermonde/partitions.hpp"

namespace vandermonde {

struct LemmaInstance {
    Partition omega;
    std::vector<std::vector<long long>> wh;  // k vectors of length d
    int rho = 2;
    int d = 1;

    long long r() const { return detail::ipow(rho, d); }

    void validate() const {
        if (rho < 2) throw InvalidArgument("lemma instance: rho must be >= 2");
        if (d < 1) throw InvalidArgument("lemma instance: d must be >= 1");
        if (static_cast<int>(wh.size()) != omega.blocks_count()) throw InvalidArgument("lemma instance: need one vector per block");
        for (const auto& w : wh)
            if (static_cast<int>(w.size()) != d) throw InvalidArgument("lemma instance: vectors must have length d");
    }
};

/// wh_j = sum_{i in P_j} (ell_i - ell_{i+1}) coordinatewise, indices cyclic.
/// `ell` holds p vectors of length d.
inline LemmaInstance make_lemma_instance(const Partition& omega, const std::vector<std::vector<long long>>& ell, int rho) {
    if (static_cast<int>(ell.size()) != omega.size() || ell.empty()) throw InvalidArgument("make_lemma_instance: need p vectors");
    const int d = static_cast<int>(ell.front().size());
    const WMatrix a = w_matrix(omega);
    LemmaInstance inst{omega, std::vector<std::vector<long long>>(static_cast<std::size_t>(a.k), std::vector<long long>(static_cast<std::size_t>(d))), rho, d};
    for (int m = 0; m < d; ++m) {
        std::vector<long long> column;
        for (const auto& v : ell) {
            if (static_cast<int>(v.size()) != d) throw InvalidArgument("make_lemma_instance: ragged input");
            column.push_back(v[static_cast<std::size_t>(m)]);
        }
        const auto w = a.apply(std::span<const long long>(column));
        for (int j = 0; j < a.k; ++j) inst.wh[static_cast<std::size_t>(j)][static_cast<std::size_t>(m)] = w[static_cast<std::size_t>(j)];
    }
    inst.validate();
    return inst;
}

/// Exact tally of sum over distinct (gamma_1..gamma_k) of
/// prod_j zeta^(xbar_gamma_j . wh_j), zeta = exp(-j 2 pi / rho): entry e counts
/// the tuples whose total exponent is e mod rho.
inline std::vector<long long> lemma1_lhs_counts(const LemmaInstance& inst, double enumeration_budget = 5e7) {
    inst.validate();
    const long long r = inst.r();
    const int k = inst.omega.blocks_count();
    if (r < k) throw InvalidArgument("lemma1_lhs: need r >= k");
    if (std::pow(static_cast<double>(r), k) > enumeration_budget) throw ResourceError("lemma1_lhs: enumeration exceeds budget");

    // exponent[gamma][j] = xbar_gamma . wh_j mod rho
    std::vector<std::vector<int>> exponent(static_cast<std::size_t>(r), std::vector<int>(static_cast<std::size_t>(k)));
    for (long long gamma = 0; gamma < r; ++gamma) {
        const auto x = mu_inverse(gamma, inst.rho, inst.d);
        for (int j = 0; j < k; ++j) {
            long long dot = 0;
            for (int m = 0; m < inst.d; ++m) dot += x[static_cast<std::size_t>(m)] * inst.wh[static_cast<std::size_t>(j)][static_cast<std::size_t>(m)];
            exponent[static_cast<std::size_t>(gamma)][static_cast<std::size_t>(j)] = static_cast<int>(((dot % inst.rho) + inst.rho) % inst.rho);
        }
    }
    std::vector<long long> counts(static_cast<std::size_t>(inst.rho), 0);
    std::vector<bool> used(static_cast<std::size_t>(r), false);
    auto recurse = [&](auto& self, int j, int acc) -> void {
        if (j == k) {
            ++counts[static_cast<std::size_t>(acc)];
            return;
        }
        for (long long gamma = 0; gamma < r; ++gamma) {
            if (used[static_cast<std::size_t>(gamma)]) continue;
            used[static_cast<std::size_t>(gamma)] = true;
            self(self, j + 1, (acc + exponent[static_cast<std::size_t>(gamma)][static_cast<std::size_t>(j)]) % inst.rho);
            used[static_cast<std::size_t>(gamma)] = false;
        }
    };
    recurse(recurse, 0, 0);
    return counts;
}

inline complex lemma1_lhs(const LemmaInstance& inst, double enumeration_budget = 5e7) {
    const auto counts = lemma1_lhs_counts(inst, enumeration_budget);
    complex total{0.0, 0.0};
    for (int e = 0; e < inst.rho; ++e) {
        if (counts[static_cast<std::size_t>(e)] == 0) continue;
        total += static_cast<double>(counts[static_cast<std::size_t>(e)]) * std::polar(1.0, -2.0 * std::numbers::pi * e / inst.rho);
    }
    return total;
}

struct LemmaRhs {
    long long value = 0;
    /// Largest h with a nonzero term; 0 when every delta product vanishes.
    int h_max = 0;
};

/// sum_h r^h sum_{omega' in Omega_{k,h}} u(omega') prod_{j'} delta(sum_{i in P'_j'} wh_i),
/// with deltas on the integer vector sums.
inline LemmaRhs lemma1_rhs_exact(const LemmaInstance& inst) {
    inst.validate();
    const int k = inst.omega.blocks_count();
    const long long r = inst.r();
    LemmaRhs out;
    for (int h = 1; h <= k; ++h) {
        long long coefficient = 0;
        for (const auto& prime : enumerate_partitions_k(k, h)) {
            bool survives = true;
            for (int b = 0; b < h && survives; ++b) {
                for (int m = 0; m < inst.d && survives; ++m) {
                    long long sum = 0;
                    for (int i : prime.block(b)) sum += inst.wh[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(m)];
                    survives = (sum == 0);
                }
            }
            if (survives) coefficient += u_coeff(prime);
        }
        if (coefficient != 0) out.h_max = h;
        out.value = detail::checked_add(std::int64_t{out.value}, detail::checked_mul(std::int64_t{coefficient}, std::int64_t{detail::ipow(r, h)}));
    }
    return out;
}

inline complex lemma1_rhs_asymptotic(const LemmaInstance& inst) {
    return {static_cast<double>(lemma1_rhs_exact(inst).value), 0.0};
}

struct LemmaScanRow {
    long long r = 0;
    double residual = 0.0;
    /// residual / r^(h_max - 1)
    double scaled_residual = 0.0;
    /// residual / r^h_max
    double relative_residual = 0.0;
    int h_max = 0;
};

/// Residual |lhs - rhs| for each r in r_list (each r must be a d-th power).
inline std::vector<LemmaScanRow> lemma1_residual_scan(const Partition& omega, const std::vector<std::vector<long long>>& wh,
                                                      const std::vector<long long>& r_list) {
    if (wh.empty()) throw InvalidArgument("lemma1_residual_scan: empty vectors");
    const int d = static_cast<int>(wh.front().size());
    std::vector<LemmaScanRow> rows;
    long long previous = 0;
    for (long long r : r_list) {
        if (r <= previous) throw InvalidArgument("lemma1_residual_scan: r_list must increase");
        previous = r;
        const auto rho = static_cast<int>(std::llround(std::pow(static_cast<double>(r), 1.0 / d)));
        if (detail::ipow(rho, d) != r) throw InvalidArgument("lemma1_residual_scan: r must be a d-th power");
        LemmaInstance inst{omega, wh, rho, d};
        const LemmaRhs rhs = lemma1_rhs_exact(inst);
        const double residual = std::abs(lemma1_lhs(inst) - complex(static_cast<double>(rhs.value), 0.0));
        LemmaScanRow row;
        row.r = r;
        row.residual = residual;
        row.h_max = rhs.h_max;
        row.scaled_residual = residual / std::pow(static_cast<double>(r), std::max(rhs.h_max - 1, 0));
        row.relative_residual = residual / std::pow(static_cast<double>(r), rhs.h_max);
        rows.push_back(row);
    }
    return rows;
}

struct BruteTraceResult {
    double estimate = 0.0;
    double std_error = 0.0;
    /// Largest relative gap between trace(T^p)/n and the eigenvalue moment.
    double max_path_discrepancy = 0.0;
};

/// trace(T^p)/n_rows from explicit powers of T = beta G G^H, averaged over
/// position draws seed, seed+1, ...
inline BruteTraceResult brute_trace_moment(const EnsembleConfig& config, int p, int trials, std::uint64_t seed) {
    config.validate();
    if (p < 1) throw InvalidArgument("brute_trace_moment: p must be >= 1");
    if (trials < 1) throw InvalidArgument("brute_trace_moment: trials must be >= 1");
    if (config.n_rows() > 512) throw ResourceError("brute_trace_moment: n_rows above 512");
    std::vector<double> values(static_cast<std::size_t>(trials));
    std::vector<double> gaps(static_cast<std::size_t>(trials));
    parallel_for(static_cast<std::size_t>(trials), [&](std::size_t t) {
        const Positions x = sample_positions(config, seed + t);
        const Eigen::MatrixXcd tm = build_T(build_G(config, x), config.beta());
        Eigen::MatrixXcd power = tm;
        for (int i = 1; i < p; ++i) power = (power * tm).eval();
        const double n = static_cast<double>(tm.rows());
        const double trace = power.trace().real() / n;
        double eig = 0.0;
        for (double lambda : eigenvalues(tm)) eig += std::pow(lambda, p);
        eig /= n;
        values[t] = trace;
        gaps[t] = std::abs(trace - eig) / std::max(1.0, std::abs(eig));
    });
    BruteTraceResult out;
    for (double v : values) out.estimate += v;
    out.estimate /= trials;
    if (trials > 1) {
        double var = 0.0;
        for (double v : values) var += (v - out.estimate) * (v - out.estimate);
        out.std_error = std::sqrt(var / (trials - 1) / trials);
    }
    for (double g : gaps) out.max_path_discrepancy = std::max(out.max_path_discrepancy, g);
    return out;
}

} // namespace vandermonde
