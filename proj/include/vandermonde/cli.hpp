#pragma once

// Command-line front end: moments, mp, simulate, mse and verify.
// Exit codes: 0 success, 2 invalid input or budget, 3 numerical failure.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "vandermonde/ensemble.hpp"
#include "vandermonde/errors.hpp"
#include "vandermonde/marchenko_pastur.hpp"
#include "vandermonde/moments.hpp"
#include "vandermonde/mse.hpp"
#include "vandermonde/oracle.hpp"
#include "vandermonde/parallel.hpp"
#include "vandermonde/partitions.hpp"

namespace vandermonde::cli {

inline constexpr int exit_ok = 0;
inline constexpr int exit_invalid = 2;
inline constexpr int exit_numerical = 3;

inline std::vector<int> parse_int_list(const std::string& text) {
    std::vector<int> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            const int value = std::stoi(item, &used);
            if (used != item.size()) throw std::invalid_argument(item);
            out.push_back(value);
        } catch (const std::exception&) {
            throw InvalidArgument("cannot parse integer list element '" + item + "'");
        }
    }
    if (out.empty()) throw InvalidArgument("empty integer list");
    return out;
}

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

namespace detail {

inline CheckResult run_check(const std::string& name, const std::function<std::string(bool&)>& body) {
    CheckResult out{name, false, {}};
    try {
        out.detail = body(out.passed);
    } catch (const std::exception& e) {
        out.passed = false;
        out.detail = std::string("exception: ") + e.what();
    }
    return out;
}

inline std::string fmt(double v) {
    std::ostringstream os;
    os << std::setprecision(6) << v;
    return os.str();
}

} // namespace detail

/// Quick oracle checks (brute-force verifiers).
inline std::vector<CheckResult> oracle_suite(std::uint64_t seed) {
    std::vector<CheckResult> out;
    out.push_back(detail::run_check("partition counts match enumeration (p<=7)", [](bool& ok) {
        ok = true;
        for (int p = 1; p <= 7; ++p) {
            std::uint64_t total = 0;
            for (int k = 1; k <= p; ++k) {
                const auto n = enumerate_partitions_k(p, k).size();
                ok = ok && n == stirling2(p, k);
                total += n;
            }
            ok = ok && total == bell(p);
        }
        return std::string("bell(7) = ") + std::to_string(bell(7));
    }));
    out.push_back(detail::run_check("root-of-unity expansion, closed form k=2, rho=5", [](bool& ok) {
        const LemmaInstance inst{Partition({1, 2}), {{1}, {-1}}, 5, 1};
        const complex lhs = lemma1_lhs(inst);
        const complex rhs = lemma1_rhs_asymptotic(inst);
        ok = std::abs(lhs - complex(-5.0, 0.0)) < 1e-9 && std::abs(lhs - rhs) < 1e-9;
        return "lhs = " + detail::fmt(lhs.real()) + ", rhs = " + detail::fmt(rhs.real());
    }));
    out.push_back(detail::run_check("root-of-unity expansion residual scan p=4, r in {4,6,8,10}", [](bool& ok) {
        const Partition omega({1, 2, 3, 1});
        const std::vector<std::vector<long long>> ell{{1}, {0}, {-1}, {1}};
        const auto inst = make_lemma_instance(omega, ell, 4);
        const auto rows = lemma1_residual_scan(omega, inst.wh, {4, 6, 8, 10});
        double worst = 0.0;
        for (const auto& row : rows) worst = std::max(worst, row.relative_residual);
        ok = worst < 1e-9;
        return "max residual / r^h_max = " + detail::fmt(worst);
    }));
    out.push_back(detail::run_check("matrix-power trace equals eigenvalue moment", [seed](bool& ok) {
        EnsembleConfig config{1, 5, 15, JitterDistribution::uniform()};
        double worst = 0.0;
        for (int p = 1; p <= 4; ++p) worst = std::max(worst, brute_trace_moment(config, p, 3, seed).max_path_discrepancy);
        ok = worst < 1e-8;
        return "max relative gap = " + detail::fmt(worst);
    }));
    out.push_back(detail::run_check("lmmse trace formula equals direct error covariance", [seed](bool& ok) {
        EnsembleConfig config{1, 5, 21, JitterDistribution::uniform()};
        const auto r = lmmse_demo(config, 10.0, seed, 50);
        const double rel = std::abs(r.trace_mse - r.direct_trace_mse) / r.direct_trace_mse;
        ok = rel < 1e-8;
        return "relative gap = " + detail::fmt(rel);
    }));
    return out;
}

/// Invariants of the analytic and simulated pipelines.
inline std::vector<CheckResult> invariant_suite(std::uint64_t seed) {
    std::vector<CheckResult> out;
    out.push_back(detail::run_check("first moment is one", [seed](bool& ok) {
        const auto m = moment(1, 0.55, 2, JitterDistribution::uniform());
        EnsembleConfig config{2, 3, 9, JitterDistribution::uniform()};
        const auto s = simulate(config, 3, seed);
        const double gap = std::abs(empirical_moment(s, 1) - 1.0);
        ok = m.value == 1.0 && gap < 1e-10;
        return "simulated trace gap = " + detail::fmt(gap);
    }));
    out.push_back(detail::run_check("point-mass jitter gives the identity", [seed](bool& ok) {
        EnsembleConfig config{1, 10, 30, JitterDistribution::point_mass()};
        const auto s = simulate(config, 1, seed);
        double worst = 0.0;
        for (double v : s.eigenvalues.front()) worst = std::max(worst, std::abs(v - 1.0));
        const auto m = moment(3, 0.6, 1, JitterDistribution::point_mass());
        ok = worst < 1e-10 && std::abs(m.value - 1.0) < std::max(3.0 * m.total_std_error, 1e-3);
        return "max |lambda - 1| = " + detail::fmt(worst) + ", engine p=3: " + detail::fmt(m.value);
    }));
    out.push_back(detail::run_check("Marchenko-Pastur moments match quadrature", [](bool& ok) {
        double worst = 0.0;
        for (double beta : {0.2, 0.55, 0.729})
            for (int p = 1; p <= 6; ++p) {
                const double q = mp_expectation(beta, [p](double z) { return std::pow(z, p); });
                worst = std::max(worst, std::abs(q - mp_moment(p, beta)));
            }
        ok = worst < 1e-8;
        return "max gap = " + detail::fmt(worst);
    }));
    out.push_back(detail::run_check("MSE ordering equally_spaced <= empirical <= mp", [seed](bool& ok) {
        const auto curve = mse_curve(0.5, {1}, {0.0, 10.0, 20.0}, JitterDistribution::uniform(), seed, {81, 4, 0.01});
        ok = true;
        for (std::size_t i = 0; i < curve.snr_db.size(); ++i) {
            const double e = curve.at(i, "empirical", 1).mse;
            ok = ok && curve.at(i, "equally_spaced").mse <= e && e <= curve.at(i, "mp").mse;
        }
        return std::string("3 SNR points");
    }));
    out.push_back(detail::run_check("second moment below Marchenko-Pastur and rising with d", [](bool& ok) {
        const auto rows = convergence_report(2, 0.55, {1, 2, 3}, JitterDistribution::uniform());
        ok = rows[0].moment < rows[1].moment && rows[1].moment < rows[2].moment && rows[2].moment < rows[2].mp_moment;
        return "d=1..3: " + detail::fmt(rows[0].moment) + ", " + detail::fmt(rows[1].moment) + ", " + detail::fmt(rows[2].moment);
    }));
    return out;
}

namespace detail {

inline void emit(const std::string& path, const std::string& content) {
    if (path.empty() || path == "-") {
        std::cout << content;
        return;
    }
    std::ofstream file(path, std::ios::binary);
    if (!file) throw InvalidArgument("cannot open output file " + path);
    file << content;
}

inline void check_format(const std::string& format) {
    if (format != "csv" && format != "json") throw InvalidArgument("format must be csv or json");
}

inline std::string dump(const nlohmann::json& j) { return j.dump(2) + "\n"; }

} // namespace detail

/// Parses argv and dispatches. Never throws.
inline int run(int argc, const char* const* argv, std::ostream& log = std::cerr) {
    CLI::App app{"Moments and spectra of quasi-equally-spaced random Vandermonde matrices"};
    app.require_subcommand(1);
    app.fallthrough();
    int threads = 0;
    std::uint64_t seed = 0;
    std::string out_path;
    std::string format;
    app.add_option("--threads", threads, "Worker thread cap (0: VANDERMONDE_THREADS or hardware)")->check(CLI::NonNegativeNumber);

    auto common = [&](CLI::App* sub, const std::string& default_format) {
        sub->add_option("--seed", seed, "Random seed")->capture_default_str();
        sub->add_option("--out", out_path, "Output path (stdout when omitted)");
        sub->add_option("--format", format, "Output format: csv or json")->default_str(default_format);
    };

    // moments
    int p_max = 4;
    double beta = 0.55;
    int d = 1;
    std::string jitter = "uniform";
    int log2_points = 14;
    int replicates = 16;
    auto* moments_cmd = app.add_subcommand("moments", "Asymptotic moments E[lambda^p] for p = 1..p-max");
    moments_cmd->add_option("--p-max", p_max, "Highest order (1..5)")->capture_default_str();
    moments_cmd->add_option("--beta", beta, "Aspect ratio in (0, 1]")->capture_default_str();
    moments_cmd->add_option("--d", d, "Dimension")->capture_default_str();
    moments_cmd->add_option("--jitter", jitter, "uniform, point or triangular")->capture_default_str();
    moments_cmd->add_option("--qmc-log2-points", log2_points, "log2 of QMC points per replicate")->capture_default_str();
    moments_cmd->add_option("--replicates", replicates, "QMC replicates")->capture_default_str();

    // mp
    int grid_points = 200;
    auto* mp_cmd = app.add_subcommand("mp", "Marchenko-Pastur density and moments");
    mp_cmd->add_option("--beta", beta, "Aspect ratio in (0, 1]")->capture_default_str();
    mp_cmd->add_option("--p-max", p_max, "Highest moment order")->capture_default_str();
    mp_cmd->add_option("--points", grid_points, "Density grid points")->capture_default_str();

    // simulate
    long long budget = 1000;
    int trials = 50;
    int bins = 60;
    std::string dump_eigs;
    auto* sim_cmd = app.add_subcommand("simulate", "Monte-Carlo eigenvalue histogram of T_d");
    sim_cmd->add_option("--beta", beta, "Target aspect ratio in (0, 1]")->capture_default_str();
    sim_cmd->add_option("--d", d, "Dimension")->capture_default_str();
    sim_cmd->add_option("--budget", budget, "Largest allowed (2M+1)^d")->capture_default_str();
    sim_cmd->add_option("--trials", trials, "Independent realizations")->capture_default_str();
    sim_cmd->add_option("--bins", bins, "Histogram bins")->capture_default_str();
    sim_cmd->add_option("--jitter", jitter, "uniform, point or triangular")->capture_default_str();
    sim_cmd->add_option("--dump-eigs", dump_eigs, "Also write every eigenvalue to this CSV");

    // mse
    std::string d_list = "1,2,3";
    std::string snr_db = "-10:30:1";
    long long mse_budget = 729;
    int mse_trials = 20;
    auto* mse_cmd = app.add_subcommand("mse", "LMMSE reconstruction error against SNR");
    mse_cmd->add_option("--beta", beta, "Target aspect ratio in (0, 1]")->capture_default_str();
    mse_cmd->add_option("--d", d_list, "Comma-separated dimensions")->capture_default_str();
    mse_cmd->add_option("--snr-db", snr_db, "SNR grid start:stop:step in dB")->capture_default_str();
    mse_cmd->add_option("--jitter", jitter, "uniform, point or triangular")->capture_default_str();
    mse_cmd->add_option("--budget", mse_budget, "Largest allowed (2M+1)^d")->capture_default_str();
    mse_cmd->add_option("--trials", mse_trials, "Realizations per dimension")->capture_default_str();

    // verify
    std::string suite = "all";
    auto* verify_cmd = app.add_subcommand("verify", "Run oracle and invariant checks");
    verify_cmd->add_option("--suite", suite, "all, oracle or invariants")->capture_default_str();

    common(moments_cmd, "json");
    common(mp_cmd, "json");
    common(sim_cmd, "csv");
    common(mse_cmd, "csv");
    common(verify_cmd, "json");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, std::cout, log);
        return code == 0 ? exit_ok : exit_invalid;
    }

    try {
        set_max_threads(threads);
        if (format.empty()) format = (sim_cmd->parsed() || mse_cmd->parsed()) ? "csv" : "json";
        detail::check_format(format);

        if (moments_cmd->parsed()) {
            if (p_max < 1 || p_max > 5) throw InvalidArgument("--p-max must be in 1..5");
            if (log2_points < 6 || log2_points > 24) throw InvalidArgument("--qmc-log2-points must be in 6..24");
            const auto dist = JitterDistribution::parse(jitter);
            MomentOptions opts;
            opts.integration.seed = seed;
            opts.integration.qmc_log2_points = log2_points;
            opts.integration.qmc_replicates = replicates;
            MomentEngine engine(opts);
            nlohmann::json results = nlohmann::json::array();
            std::ostringstream csv;
            csv << "p,value,std_error,mp_moment\n" << std::setprecision(17);
            for (int p = 1; p <= p_max; ++p) {
                const auto r = engine.moment(p, beta, d, dist);
                results.push_back(to_json(r));
                csv << p << ',' << r.value << ',' << r.total_std_error << ',' << mp_moment(p, beta) << '\n';
                std::cout << "p=" << p << " moment=" << std::setprecision(10) << r.value << " std_error=" << r.total_std_error
                          << " mp=" << mp_moment(p, beta) << '\n';
            }
            if (format == "json") {
                detail::emit(out_path, detail::dump({{"schema_version", json_schema_version}, {"beta", beta}, {"d", d},
                                                     {"jitter", dist.name()}, {"seed", seed}, {"moments", results}}));
            } else {
                detail::emit(out_path, csv.str());
            }
            return exit_ok;
        }

        if (mp_cmd->parsed()) {
            check_mp_beta(beta);
            if (p_max < 1 || p_max > 30) throw InvalidArgument("--p-max must be in 1..30");
            if (grid_points < 2) throw InvalidArgument("--points must be >= 2");
            const auto support = mp_support(beta);
            nlohmann::json moments_json = nlohmann::json::array();
            for (int p = 1; p <= p_max; ++p) moments_json.push_back({{"p", p}, {"value", mp_moment(p, beta)}});
            nlohmann::json density = nlohmann::json::array();
            std::ostringstream csv;
            csv << "z,density\n" << std::setprecision(17);
            for (int i = 0; i < grid_points; ++i) {
                const double z = support.lower + (support.upper - support.lower) * i / (grid_points - 1);
                const double f = mp_density(beta, z);
                density.push_back({{"z", z}, {"density", f}});
                csv << z << ',' << f << '\n';
            }
            std::cout << "support=[" << support.lower << ", " << support.upper << "] mean=" << mp_moment(1, beta) << '\n';
            if (format == "json") {
                detail::emit(out_path, detail::dump({{"schema_version", json_schema_version}, {"beta", beta},
                                                     {"support", {support.lower, support.upper}},
                                                     {"moments", moments_json}, {"density", density}}));
            } else {
                detail::emit(out_path, csv.str());
            }
            return exit_ok;
        }

        if (sim_cmd->parsed()) {
            if (trials < 1) throw InvalidArgument("--trials must be >= 1");
            if (bins < 1) throw InvalidArgument("--bins must be >= 1");
            const auto dist = JitterDistribution::parse(jitter);
            const auto shape = resolve_shape(beta, d, budget);
            EnsembleConfig config{d, shape.M, shape.rho, dist};
            const auto sample = simulate(config, trials, seed);
            const auto hist = histogram(sample, bins);
            std::cout << "M=" << shape.M << " rho=" << shape.rho << " beta=" << shape.beta_actual << " n_rows=" << config.n_rows()
                      << " n_cols=" << config.n_cols();
            for (int p = 1; p <= 3; ++p) std::cout << " m" << p << '=' << empirical_moment(sample, p);
            std::cout << '\n';
            if (format == "csv") {
                std::ostringstream csv;
                write_histogram_csv(csv, hist);
                detail::emit(out_path, csv.str());
            } else {
                nlohmann::json bins_json = nlohmann::json::array();
                for (std::size_t b = 0; b < hist.densities.size(); ++b)
                    bins_json.push_back({{"bin_left", hist.edges[b]}, {"bin_right", hist.edges[b + 1]}, {"density", hist.densities[b]}});
                nlohmann::json moments_json = nlohmann::json::array();
                for (int p = 1; p <= 4; ++p) moments_json.push_back({{"p", p}, {"value", empirical_moment(sample, p)}});
                detail::emit(out_path, detail::dump({{"schema_version", json_schema_version}, {"beta", shape.beta_actual},
                                                     {"beta_target", beta}, {"d", d}, {"M", shape.M}, {"rho", shape.rho},
                                                     {"jitter", dist.name()}, {"trials", trials}, {"seed", seed},
                                                     {"moments", moments_json}, {"histogram", bins_json}}));
            }
            if (!dump_eigs.empty()) {
                std::ostringstream csv;
                write_eigenvalues_csv(csv, sample);
                detail::emit(dump_eigs, csv.str());
            }
            return exit_ok;
        }

        if (mse_cmd->parsed()) {
            const auto dims = parse_int_list(d_list);
            const auto grid = parse_db_grid(snr_db);
            const auto dist = JitterDistribution::parse(jitter);
            if (mse_trials < 1) throw InvalidArgument("--trials must be >= 1");
            const auto curve = mse_curve(beta, dims, grid, dist, seed, {mse_budget, mse_trials, 0.01});
            for (const auto& s : curve.shapes)
                std::cout << "d=" << s.d << " M=" << s.M << " rho=" << s.rho << " beta=" << s.beta << '\n';
            std::cout << "snr points=" << grid.size() << " rows=" << curve.rows.size() << '\n';
            if (format == "csv") {
                std::ostringstream csv;
                write_mse_csv(csv, curve);
                detail::emit(out_path, csv.str());
            } else {
                detail::emit(out_path, detail::dump(to_json(curve)));
            }
            return exit_ok;
        }

        if (verify_cmd->parsed()) {
            if (suite != "all" && suite != "oracle" && suite != "invariants") throw InvalidArgument("--suite must be all, oracle or invariants");
            std::vector<CheckResult> results;
            if (suite == "all" || suite == "oracle") {
                const auto r = oracle_suite(seed);
                results.insert(results.end(), r.begin(), r.end());
            }
            if (suite == "all" || suite == "invariants") {
                const auto r = invariant_suite(seed);
                results.insert(results.end(), r.begin(), r.end());
            }
            bool all_passed = true;
            nlohmann::json report = nlohmann::json::array();
            for (const auto& r : results) {
                std::cout << (r.passed ? "PASS " : "FAIL ") << r.name << " (" << r.detail << ")\n";
                report.push_back({{"name", r.name}, {"passed", r.passed}, {"detail", r.detail}});
                all_passed = all_passed && r.passed;
            }
            if (!out_path.empty()) {
                detail::emit(out_path, detail::dump({{"schema_version", json_schema_version}, {"suite", suite},
                                                     {"passed", all_passed}, {"checks", report}}));
            }
            return all_passed ? exit_ok : exit_numerical;
        }
    } catch (const InvalidArgument& e) {
        log << "error: " << e.what() << '\n';
        return exit_invalid;
    } catch (const ResourceError& e) {
        log << "error: " << e.what() << '\n';
        return exit_invalid;
    } catch (const std::exception& e) {
        log << "numerical error: " << e.what() << '\n';
        return exit_numerical;
    }
    return exit_invalid;
}

} // namespace vandermonde::cli
