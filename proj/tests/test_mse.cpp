#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "vandermonde/mse.hpp"

using namespace vandermonde;

namespace {

// Draws from the Marchenko-Pastur law by inverting a tabulated CDF.
std::vector<double> mp_inverse_cdf_draws(double beta, std::size_t n, std::uint64_t seed) {
    const auto [lo, hi] = mp_support(beta);
    const int nodes = 4000;
    std::vector<double> z(nodes + 1);
    std::vector<double> cdf(nodes + 1, 0.0);
    boost::math::quadrature::tanh_sinh<double> integrator;
    for (int i = 0; i <= nodes; ++i) {
        // Chebyshev-like spacing resolves the square-root edges.
        z[static_cast<std::size_t>(i)] = lo + (hi - lo) * 0.5 * (1.0 - std::cos(std::numbers::pi * i / nodes));
        if (i > 0) {
            cdf[static_cast<std::size_t>(i)] = cdf[static_cast<std::size_t>(i - 1)] +
                integrator.integrate([&](double t) { return mp_density(beta, t); }, z[static_cast<std::size_t>(i - 1)], z[static_cast<std::size_t>(i)]);
        }
    }
    for (double& c : cdf) c /= cdf.back();
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<double> out(n);
    for (auto& x : out) {
        const double u = unif(rng);
        const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
        const auto j = static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(it - cdf.begin(), 1, nodes));
        const double f = (u - cdf[j - 1]) / (cdf[j] - cdf[j - 1]);
        x = z[j - 1] + f * (z[j] - z[j - 1]);
    }
    return out;
}

} // namespace

TEST(Snr, Conversions) {
    EXPECT_DOUBLE_EQ(db_to_linear(10.0), 10.0);
    EXPECT_DOUBLE_EQ(db_to_linear(0.0), 1.0);
    EXPECT_NEAR(linear_to_db(100.0), 20.0, 1e-12);
}

TEST(Snr, GridParser) {
    const auto grid = parse_db_grid("-10:30:1");
    ASSERT_EQ(grid.size(), 41u);
    EXPECT_EQ(grid.front(), -10.0);
    EXPECT_EQ(grid.back(), 30.0);
    EXPECT_EQ(parse_db_grid("0:1:0.25").size(), 5u);
    EXPECT_EQ(parse_db_grid("5:5:1"), std::vector<double>{5.0});
    EXPECT_THROW(parse_db_grid("0:10"), InvalidArgument);
    EXPECT_THROW(parse_db_grid("0:10:0"), InvalidArgument);
    EXPECT_THROW(parse_db_grid("10:0:1"), InvalidArgument);
    EXPECT_THROW(parse_db_grid("a:b:c"), InvalidArgument);
}

TEST(MseFormula, Examples) {
    EXPECT_NEAR(mse_from_eigs({0.0, 2.0}, 1.0, 1.0), 2.0 / 3.0, 1e-15);
    EXPECT_DOUBLE_EQ(mse_from_eigs({1.0, 1.0, 1.0}, 0.4, 3.0), 0.4 / 3.4);
    EXPECT_NEAR(mse_from_eigs({0.1, 3.0, 0.5}, 0.5, 1e-12), 1.0, 1e-10);
    EXPECT_THROW(mse_from_eigs({}, 0.5, 1.0), InvalidArgument);
    EXPECT_THROW(mse_from_eigs({1.0}, 0.5, 0.0), InvalidArgument);
}

TEST(MseFormula, EquallySpaced) {
    EXPECT_NEAR(mse_equally_spaced(0.729, 0.001), 0.99863, 1e-5);
    EXPECT_LT(mse_equally_spaced(0.729, 1e12), 1e-11);
    for (double snr : {0.01, 1.0, 50.0}) EXPECT_EQ(mse_equally_spaced(0.6, snr), mse_from_eigs({1.0, 1.0}, 0.6, snr));
}

TEST(MseFormula, JensenBound) {
    std::mt19937_64 rng(5);
    std::gamma_distribution<double> gamma(2.0, 0.5);
    std::vector<double> eigs(500);
    for (auto& e : eigs) e = gamma(rng);
    double mean = 0.0;
    for (double e : eigs) mean += e;
    mean /= static_cast<double>(eigs.size());
    for (auto& e : eigs) e /= mean;
    for (double snr : {0.1, 1.0, 10.0, 1000.0}) EXPECT_GE(mse_from_eigs(eigs, 0.5, snr), mse_equally_spaced(0.5, snr));
}

TEST(MseMp, Limits) {
    EXPECT_NEAR(mse_mp(0.5, 1e-9), 1.0, 1e-6);
    const auto [lo, hi] = mp_support(0.729);
    const double v = mse_mp(0.729, 10.0);
    EXPECT_GT(v, 0.729 / (10.0 * hi + 0.729));
    EXPECT_LT(v, 0.729 / (10.0 * lo + 0.729));
}

TEST(MseMp, MatchesInverseCdfSampling) {
    const double beta = 0.2;
    const double snr = 10.0;
    double total = 0.0;
    const auto draws = mp_inverse_cdf_draws(beta, 1000000, 77);
    for (double z : draws) total += beta / (z * snr + beta);
    EXPECT_NEAR(mse_mp(beta, snr), total / static_cast<double>(draws.size()), 1e-3);
}

TEST(MseMp, MonotoneInSnr) {
    double previous = 1.0;
    for (double db : parse_db_grid("-10:30:2")) {
        const double v = mse_mp(0.6, db_to_linear(db));
        EXPECT_LT(v, previous);
        EXPECT_GT(v, 0.0);
        previous = v;
    }
}

TEST(Lmmse, PointMassExact) {
    const EnsembleConfig config{1, 3, 9, JitterDistribution::point_mass()};
    const auto r = lmmse_demo(config, 5.0, 1, 200);
    EXPECT_NEAR(r.trace_mse, config.beta() / (5.0 + config.beta()), 1e-12);
    EXPECT_NEAR(r.direct_trace_mse, r.trace_mse, 1e-12);
}

TEST(Lmmse, EmpiricalMatchesTrace) {
    const EnsembleConfig config{1, 25, 102};
    const auto r = lmmse_demo(config, 10.0, 3, 400);
    EXPECT_GE(r.draws, 200);
    EXPECT_LE(std::abs(r.empirical_mse - r.trace_mse), 3.0 * r.empirical_std_error);
}

TEST(Lmmse, NoInformationLimit) {
    // 10^6 draws of 21 coefficients put the sampling error near 2e-4.
    const EnsembleConfig config{1, 10, 43};
    const auto r = lmmse_demo(config, 1e-6, 4, 1000000);
    EXPECT_NEAR(r.trace_mse, 1.0, 1e-3);
    EXPECT_NEAR(r.empirical_mse, 1.0, 1e-3);
}

TEST(Lmmse, TraceIdentityOnSmallInstance) {
    for (const auto& config : {EnsembleConfig{1, 5, 23}, EnsembleConfig{2, 5, 13}}) {
        for (double snr : {0.5, 10.0, 1000.0}) {
            const auto r = lmmse_demo(config, snr, 9, 50);
            EXPECT_NEAR(r.direct_trace_mse, r.trace_mse, 1e-8 * r.trace_mse);
        }
    }
}

TEST(Curve, InvariantsAndOrdering) {
    const auto grid = parse_db_grid("-10:30:5");
    MseCurveOptions opts;
    opts.trials = 10;
    const auto curve = mse_curve(0.729, {1, 2, 3}, grid, JitterDistribution::uniform(), 3, opts);
    ASSERT_EQ(curve.rows.size(), grid.size() * 5);
    ASSERT_EQ(curve.shapes.size(), 3u);
    EXPECT_EQ(curve.shapes[2].M, 4);
    EXPECT_EQ(curve.shapes[2].rho, 10);
    for (const char* source : {"mp", "equally_spaced"}) {
        for (std::size_t i = 1; i < grid.size(); ++i) EXPECT_LT(curve.at(i, source).mse, curve.at(i - 1, source).mse);
    }
    for (int d : {1, 2, 3}) {
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const auto& row = curve.at(i, "empirical", d);
            EXPECT_GT(row.mse, 0.0);
            EXPECT_LE(row.mse, 1.0);
            if (i > 0) EXPECT_LT(row.mse, curve.at(i - 1, "empirical", d).mse);
            EXPECT_GE(row.mse, mse_equally_spaced(row.beta, db_to_linear(grid[i])));
        }
    }
    for (std::size_t i = 0; i < grid.size(); ++i) {
        EXPECT_LE(curve.at(i, "empirical", 1).mse, curve.at(i, "empirical", 2).mse + 3.0 * curve.at(i, "empirical", 2).std_error);
        EXPECT_LE(curve.at(i, "empirical", 2).mse, curve.at(i, "empirical", 3).mse + 3.0 * curve.at(i, "empirical", 3).std_error);
        EXPECT_LE(curve.at(i, "empirical", 3).mse, curve.at(i, "mp").mse + 3.0 * curve.at(i, "empirical", 3).std_error);
    }
    const double a = curve.at(0, "empirical", 3).mse;
    const double b = curve.at(0, "mp").mse;
    const double c = curve.at(0, "equally_spaced").mse;
    EXPECT_LT(std::max({a, b, c}) - std::min({a, b, c}), 1e-2);
}

TEST(Curve, CsvAndJson) {
    MseCurveOptions opts;
    opts.trials = 3;
    const auto curve = mse_curve(0.5, {1}, {0.0, 10.0}, JitterDistribution::uniform(), 1, opts);
    std::ostringstream os;
    write_mse_csv(os, curve);
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    EXPECT_EQ(line, "snr_db,source,beta,d,mse,std_err");
    int lines = 0;
    while (std::getline(is, line)) {
        ++lines;
        if (line.find(",mp,") != std::string::npos) EXPECT_NE(line.find(",,"), std::string::npos);
    }
    EXPECT_EQ(lines, 6);
    const auto j = to_json(curve);
    EXPECT_EQ(j.at("schema_version"), json_schema_version);
    EXPECT_EQ(j.at("rows").size(), 6u);
}

TEST(Curve, Deterministic) {
    MseCurveOptions opts;
    opts.trials = 4;
    const auto a = mse_curve(0.6, {1, 2}, {0.0, 20.0}, JitterDistribution::uniform(), 8, opts);
    const auto b = mse_curve(0.6, {1, 2}, {0.0, 20.0}, JitterDistribution::uniform(), 8, opts);
    ASSERT_EQ(a.rows.size(), b.rows.size());
    for (std::size_t i = 0; i < a.rows.size(); ++i) EXPECT_EQ(a.rows[i].mse, b.rows[i].mse);
}
