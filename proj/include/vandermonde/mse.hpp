#pragma once

// Linear-reconstruction MSE of bandlimited signals from jittered samples:
//   MSE = E[ beta / (lambda * snr + beta) ]
// over the empirical spectrum, the Marchenko-Pastur limit, or the identity
// spectrum of perfectly equally spaced samples.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"

#include "vandermonde/ensemble.hpp"
#include "vandermonde/errors.hpp"
#include "vandermonde/marchenko_pastur.hpp"
#include "vandermonde/moments.hpp"
#include "vandermonde/parallel.hpp"

namespace vandermonde {

namespace detail {

inline void check_snr(double snr) {
    if (!(snr > 0.0) || !std::isfinite(snr)) throw InvalidArgument("snr must be positive and finite");
}

} // namespace detail

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double snr) { return 10.0 * std::log10(snr); }

/// Inclusive grid "start:stop:step" in dB.
inline std::vector<double> parse_db_grid(const std::string& text) {
    std::vector<double> parts;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ':')) {
        try {
            std::size_t used = 0;
            parts.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw InvalidArgument("dB grid: cannot parse '" + item + "'");
        }
    }
    if (parts.size() != 3) throw InvalidArgument("dB grid must have the form start:stop:step");
    const double start = parts[0], stop = parts[1], step = parts[2];
    if (!(step > 0.0)) throw InvalidArgument("dB grid: step must be positive");
    if (stop < start) throw InvalidArgument("dB grid: stop must be >= start");
    const auto count = static_cast<long long>(std::floor((stop - start) / step + 1e-9)) + 1;
    if (count > 100000) throw InvalidArgument("dB grid: too many points");
    std::vector<double> grid;
    for (long long i = 0; i < count; ++i) grid.push_back(start + step * static_cast<double>(i));
    return grid;
}

inline double mse_from_eigs(const std::vector<double>& eigenvalues, double beta, double snr) {
    if (eigenvalues.empty()) throw InvalidArgument("mse_from_eigs: empty spectrum");
    detail::check_snr(snr);
    if (!(beta > 0.0)) throw InvalidArgument("mse_from_eigs: beta must be positive");
    double total = 0.0;
    for (double lambda : eigenvalues) {
        if (lambda < 0.0) throw InvalidArgument("mse_from_eigs: negative eigenvalue");
        total += beta / (lambda * snr + beta);
    }
    return total / static_cast<double>(eigenvalues.size());
}

inline double mse_mp(double beta, double snr) {
    check_mp_beta(beta);
    detail::check_snr(snr);
    return mp_expectation(beta, [&](double z) { return beta / (z * snr + beta); }, 1e-12);
}

inline double mse_equally_spaced(double beta, double snr) {
    detail::check_snr(snr);
    return beta / (snr + beta);
}

struct LmmseDemoResult {
    double empirical_mse = 0.0;
    double empirical_std_error = 0.0;
    double trace_mse = 0.0;
    /// trace((I + snr G G^H)^-1) / n_rows computed from the matrix directly.
    double direct_trace_mse = 0.0;
    int draws = 0;
};

namespace detail {

inline Eigen::MatrixXcd complex_gaussian(Eigen::Index rows, Eigen::Index cols, double variance, Rng& rng) {
    std::normal_distribution<double> normal(0.0, std::sqrt(variance / 2.0));
    Eigen::MatrixXcd out(rows, cols);
    for (Eigen::Index c = 0; c < cols; ++c)
        for (Eigen::Index r = 0; r < rows; ++r) {
            const double re = normal(rng);
            const double im = normal(rng);
            out(r, c) = complex(re, im);
        }
    return out;
}

} // namespace detail

/// Estimates a ~ CN(0, I) from p = G^H a + n, n ~ CN(0, I/snr), at one fixed
/// set of positions, and compares the observed error with the spectral formula.
inline LmmseDemoResult lmmse_demo(const EnsembleConfig& config, double snr, std::uint64_t seed, int draws = 400) {
    config.validate();
    detail::check_snr(snr);
    if (draws < 2) throw InvalidArgument("lmmse_demo: need at least 2 draws");
    const Positions x = sample_positions(config, seed);
    const Eigen::MatrixXcd g = build_G(config, x);
    const double beta = config.beta();
    const Eigen::Index n = g.rows();

    Eigen::MatrixXcd system = Eigen::MatrixXcd::Identity(n, n) + snr * (g * g.adjoint());
    system = 0.5 * (system + system.adjoint()).eval();
    const Eigen::LLT<Eigen::MatrixXcd> llt(system);
    if (llt.info() != Eigen::Success) throw NumericalError("lmmse_demo: LMMSE system is not positive definite");

    // Draws are processed in fixed-size chunks to bound memory.
    constexpr int chunk = 1024;
    Rng rng = make_rng(seed, 1);
    std::vector<double> errors(static_cast<std::size_t>(draws));
    for (int start = 0; start < draws; start += chunk) {
        const int count = std::min(chunk, draws - start);
        const Eigen::MatrixXcd a = detail::complex_gaussian(n, count, 1.0, rng);
        const Eigen::MatrixXcd noise = detail::complex_gaussian(g.cols(), count, 1.0 / snr, rng);
        const Eigen::MatrixXcd p = g.adjoint() * a + noise;
        const Eigen::MatrixXcd estimate = llt.solve(snr * (g * p));
        if (!estimate.allFinite()) throw NumericalError("lmmse_demo: non-finite estimate");
        for (int t = 0; t < count; ++t)
            errors[static_cast<std::size_t>(start + t)] = (estimate.col(t) - a.col(t)).squaredNorm() / static_cast<double>(n);
    }
    double mean = 0.0;
    for (double e : errors) mean += e;
    mean /= draws;
    double var = 0.0;
    for (double e : errors) var += (e - mean) * (e - mean);
    var /= (draws - 1);

    LmmseDemoResult out;
    out.draws = draws;
    out.empirical_mse = mean;
    out.empirical_std_error = std::sqrt(var / draws);
    out.trace_mse = mse_from_eigs(eigenvalues(build_T(g, beta)), beta, snr);
    const Eigen::MatrixXcd inverse = llt.solve(Eigen::MatrixXcd::Identity(n, n));
    out.direct_trace_mse = inverse.trace().real() / static_cast<double>(n);
    return out;
}

struct MseRow {
    double snr_db = 0.0;
    std::string source;           // "empirical", "mp" or "equally_spaced"
    double beta = 0.0;
    std::optional<int> d;          // set for empirical rows only
    double mse = 0.0;
    double std_error = 0.0;
};

struct MseShape {
    int d = 0;
    int M = 0;
    int rho = 0;
    double beta = 0.0;
};

struct MseCurve {
    double beta_target = 0.0;
    std::vector<double> snr_db;
    std::vector<MseShape> shapes;
    std::string jitter;
    int trials = 0;
    std::uint64_t seed = 0;
    std::vector<MseRow> rows;

    /// Row for (snr index, source, d); d is ignored for analytic sources.
    const MseRow& at(std::size_t snr_index, const std::string& source, int d = 0) const {
        for (const auto& row : rows) {
            if (row.source != source || row.snr_db != snr_db.at(snr_index)) continue;
            if (source == "empirical" && row.d != d) continue;
            return row;
        }
        throw InvalidArgument("MseCurve: no row for source " + source);
    }
};

struct MseCurveOptions {
    long long size_budget = 729;
    int trials = 20;
    double shape_tolerance = 0.01;
};

/// Empirical MSE for each d (trial average, resolved shape), with the
/// Marchenko-Pastur and equally-spaced references at beta_target. Rows are
/// ordered by SNR, then empirical (by d), mp, equally_spaced.
inline MseCurve mse_curve(double beta_target, const std::vector<int>& d_list, const std::vector<double>& snr_db,
                          const JitterDistribution& dist, std::uint64_t seed, const MseCurveOptions& opts = {}) {
    check_mp_beta(beta_target);
    if (d_list.empty()) throw InvalidArgument("mse_curve: empty d list");
    if (snr_db.empty()) throw InvalidArgument("mse_curve: empty SNR grid");
    MseCurve curve;
    curve.beta_target = beta_target;
    curve.snr_db = snr_db;
    curve.jitter = dist.name();
    curve.trials = opts.trials;
    curve.seed = seed;

    std::vector<SpectrumSample> samples;
    for (std::size_t i = 0; i < d_list.size(); ++i) {
        const int d = d_list[i];
        const ShapeResolution shape = resolve_shape(beta_target, d, opts.size_budget, opts.shape_tolerance);
        EnsembleConfig config{d, shape.M, shape.rho, dist};
        curve.shapes.push_back({d, shape.M, shape.rho, shape.beta_actual});
        samples.push_back(simulate(config, opts.trials, seed + 1000003ULL * i));
    }

    for (double db : snr_db) {
        const double snr = db_to_linear(db);
        const double equal = mse_equally_spaced(beta_target, snr);
        for (std::size_t i = 0; i < d_list.size(); ++i) {
            const auto& sample = samples[i];
            const double beta = curve.shapes[i].beta;
            std::vector<double> per_trial;
            for (const auto& eigs : sample.eigenvalues) {
                const double value = mse_from_eigs(eigs, beta, snr);
                // Mean eigenvalue is one, so convexity bounds the MSE below.
                if (value < mse_equally_spaced(beta, snr) * (1.0 - 1e-9)) {
                    throw NumericalError("mse_curve: spectrum violates the equally-spaced lower bound");
                }
                per_trial.push_back(value);
            }
            double mean = 0.0;
            for (double v : per_trial) mean += v;
            mean /= static_cast<double>(per_trial.size());
            double var = 0.0;
            for (double v : per_trial) var += (v - mean) * (v - mean);
            const double se = per_trial.size() > 1 ? std::sqrt(var / static_cast<double>(per_trial.size() - 1) / static_cast<double>(per_trial.size())) : 0.0;
            curve.rows.push_back({db, "empirical", beta, d_list[i], mean, se});
        }
        curve.rows.push_back({db, "mp", beta_target, std::nullopt, mse_mp(beta_target, snr), 0.0});
        curve.rows.push_back({db, "equally_spaced", beta_target, std::nullopt, equal, 0.0});
    }
    return curve;
}

inline void write_mse_csv(std::ostream& os, const MseCurve& curve) {
    os << "snr_db,source,beta,d,mse,std_err\n";
    os.precision(17);
    for (const auto& row : curve.rows) {
        os << row.snr_db << ',' << row.source << ',' << row.beta << ',';
        if (row.d) os << *row.d;
        os << ',' << row.mse << ',' << row.std_error << '\n';
    }
}

inline nlohmann::json to_json(const MseCurve& curve) {
    nlohmann::json shapes = nlohmann::json::array();
    for (const auto& s : curve.shapes) shapes.push_back({{"d", s.d}, {"M", s.M}, {"rho", s.rho}, {"beta", s.beta}});
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : curve.rows) {
        nlohmann::json r = {{"snr_db", row.snr_db}, {"source", row.source}, {"beta", row.beta},
                            {"mse", row.mse}, {"std_err", row.std_error}};
        r["d"] = row.d ? nlohmann::json(*row.d) : nlohmann::json(nullptr);
        rows.push_back(std::move(r));
    }
    return {{"schema_version", json_schema_version},
            {"beta_target", curve.beta_target},
            {"jitter", curve.jitter},
            {"trials", curve.trials},
            {"seed", curve.seed},
            {"snr_db", curve.snr_db},
            {"shapes", std::move(shapes)},
            {"rows", std::move(rows)}};
}

} // namespace vandermonde
