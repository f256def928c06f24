#pragma once

// Asymptotic eigenvalue moments E[lambda^p] of T_d = beta G_d G_d^H for
// quasi-equally-spaced sample positions:
//
//   E[lambda^p] = sum_{k=1}^p sum_{h=1}^k beta^(p-h)
//                 sum_{omega in Omega_{p,k}} sum_{omega' in Omega_{k,h}} u(omega') v(omega, omega')^d

#include <cmath>
#include <cstdint>
#include <map>
#include <mutex>
#include <string>
#include <vector>

#include "json.hpp"

#include "vandermonde/integrate.hpp"
#include "vandermonde/jitter.hpp"
#include "vandermonde/marchenko_pastur.hpp"
#include "vandermonde/parallel.hpp"
#include "vandermonde/partitions.hpp"

namespace vandermonde {

inline constexpr int json_schema_version = 1;

struct MomentOptions {
    IntegrationOptions integration;
    int p_cap = 5;
};

struct MomentTerm {
    int k = 0;
    int h = 0;
    Partition omega;
    Partition omega_prime;
    std::int64_t u = 0;
    VValue v;
    double contribution = 0.0;
};

struct MomentResult {
    int p = 0;
    double beta = 0.0;
    int d = 0;
    std::string jitter;
    double value = 0.0;
    double total_std_error = 0.0;
    std::vector<MomentTerm> terms;
};

namespace detail {

inline std::uint64_t fnv1a(const std::string& text) {
    std::uint64_t hash = 0xcbf29ce484222325ull;
    for (unsigned char c : text) {
        hash ^= c;
        hash *= 0x100000001b3ull;
    }
    return hash;
}

} // namespace detail

/// Evaluates moments and caches every v(omega, omega') it computes, so that a
/// sequence of orders or dimensions reuses shared terms. Thread-safe.
class MomentEngine {
public:
    explicit MomentEngine(MomentOptions opts = {}) : opts_(std::move(opts)) {}

    const MomentOptions& options() const { return opts_; }

    MomentResult moment(int p, double beta, int d, const JitterDistribution& dist) {
        if (p < 1 || p > opts_.p_cap) {
            throw InvalidArgument("moment: order p=" + std::to_string(p) + " outside [1, " + std::to_string(opts_.p_cap) + "]");
        }
        detail::check_beta_d(beta, d);

        MomentResult result;
        result.p = p;
        result.beta = beta;
        result.d = d;
        result.jitter = dist.name();

        std::vector<std::string> keys;
        for (int k = 1; k <= p; ++k) {
            const auto omegas = enumerate_partitions_k(p, k);
            for (int h = 1; h <= k; ++h) {
                const auto primes = enumerate_partitions_k(k, h);
                for (const auto& omega : omegas) {
                    for (const auto& omega_prime : primes) {
                        MomentTerm term;
                        term.k = k;
                        term.h = h;
                        term.omega = omega;
                        term.omega_prime = omega_prime;
                        term.u = u_coeff(omega_prime);
                        result.terms.push_back(std::move(term));
                        keys.push_back(cache_key(result.terms.back(), beta, d, dist));
                    }
                }
            }
        }

        // Evaluate distinct missing coefficients in parallel.
        std::vector<std::size_t> pending;
        {
            std::lock_guard lock(mutex_);
            std::map<std::string, bool> queued;
            for (std::size_t i = 0; i < keys.size(); ++i) {
                if (cache_.count(keys[i]) || queued.count(keys[i])) continue;
                queued[keys[i]] = true;
                pending.push_back(i);
            }
        }
        std::vector<VValue> computed(pending.size());
        parallel_for(pending.size(), [&](std::size_t n) {
            const MomentTerm& term = result.terms[pending[n]];
            computed[n] = evaluate(term, beta, d, dist, keys[pending[n]]);
        });
        {
            std::lock_guard lock(mutex_);
            for (std::size_t n = 0; n < pending.size(); ++n) cache_[keys[pending[n]]] = computed[n];
            for (std::size_t i = 0; i < keys.size(); ++i) result.terms[i].v = cache_.at(keys[i]);
        }

        // Terms are already in canonical (k, h, omega, omega') order, so the
        // reduction is independent of scheduling.
        std::map<std::string, double> sensitivity;
        std::map<std::string, double> std_errors;
        for (std::size_t i = 0; i < keys.size(); ++i) {
            MomentTerm& term = result.terms[i];
            const double weight = std::pow(beta, p - term.h) * static_cast<double>(term.u);
            term.contribution = weight * std::pow(term.v.value, d);
            result.value += term.contribution;
            // First-order propagation through v^d; one entry per distinct estimate.
            sensitivity[keys[i]] += weight * d * std::pow(term.v.value, d - 1);
            std_errors[keys[i]] = term.v.std_error;
        }
        double variance = 0.0;
        for (const auto& [key, slope] : sensitivity) {
            const double s = slope * std_errors[key];
            variance += s * s;
        }
        result.total_std_error = std::sqrt(variance);
        return result;
    }

    std::size_t cache_size() const {
        std::lock_guard lock(mutex_);
        return cache_.size();
    }

private:
    static std::string cache_key(const MomentTerm& term, double beta, int d, const JitterDistribution& dist) {
        if (term.k == 1) return "unity";
        if (term.h == term.k) return "delta|" + term.omega.str();
        std::ostringstream os;
        os.precision(17);
        os << term.omega.str() << '|' << term.omega_prime.str() << '|' << beta << '|' << d << '|' << dist.name();
        return os.str();
    }

    VValue evaluate(const MomentTerm& term, double beta, int d, const JitterDistribution& dist,
                    const std::string& key) const {
        if (term.k == 1) return {1.0, 0.0, VMethod::exact_unity, 0.0};
        if (term.h == term.k) return v_delta_only(term.omega, opts_.integration);
        IntegrationOptions local = opts_.integration;
        local.seed = opts_.integration.seed ^ detail::fnv1a(key);
        return v_general(term.omega, term.omega_prime, beta, d, dist, local);
    }

    MomentOptions opts_;
    mutable std::mutex mutex_;
    std::map<std::string, VValue> cache_;
};

inline MomentResult moment(int p, double beta, int d, const JitterDistribution& dist, const MomentOptions& opts = {}) {
    MomentEngine engine(opts);
    return engine.moment(p, beta, d, dist);
}

struct ConvergenceRow {
    int d = 0;
    double moment = 0.0;
    double std_error = 0.0;
    double mp_moment = 0.0;
    double gap = 0.0;
};

/// Moment of order p against its Marchenko-Pastur limit along a list of d.
inline std::vector<ConvergenceRow> convergence_report(int p, double beta, const std::vector<int>& d_list,
                                                      const JitterDistribution& dist, const MomentOptions& opts = {}) {
    MomentEngine engine(opts);
    const double limit = mp_moment(p, beta);
    std::vector<ConvergenceRow> rows;
    for (int d : d_list) {
        const MomentResult r = engine.moment(p, beta, d, dist);
        rows.push_back({d, r.value, r.total_std_error, limit, std::abs(r.value - limit)});
    }
    return rows;
}

inline nlohmann::json to_json(const MomentResult& r) {
    nlohmann::json terms = nlohmann::json::array();
    for (const auto& t : r.terms) {
        terms.push_back({{"k", t.k},
                         {"h", t.h},
                         {"omega", t.omega.omega()},
                         {"omega_prime", t.omega_prime.omega()},
                         {"u", t.u},
                         {"v", t.v.value},
                         {"v_err", t.v.std_error},
                         {"method", to_string(t.v.method)},
                         {"contribution", t.contribution}});
    }
    return {{"schema_version", json_schema_version},
            {"p", r.p},
            {"beta", r.beta},
            {"d", r.d},
            {"jitter", r.jitter},
            {"value", r.value},
            {"std_error", r.total_std_error},
            {"terms", std::move(terms)}};
}

} // namespace vandermonde
