#include <gtest/gtest.h>

#include <random>

#include "vandermonde/constraints.hpp"

using namespace vandermonde;

TEST(WMatrix, TwoBlocks) {
    const auto a = w_matrix(Partition({1, 2}));
    EXPECT_EQ(a.rows, (std::vector<std::vector<int>>{{1, -1}, {-1, 1}}));
}

TEST(WMatrix, SingleBlockIsZero) {
    for (int p = 1; p <= 5; ++p) {
        const auto a = w_matrix(coarsest_partition(p));
        ASSERT_EQ(a.rows.size(), 1u);
        for (int v : a.rows[0]) EXPECT_EQ(v, 0);
    }
}

TEST(WMatrix, Alternating) {
    const auto a = w_matrix(Partition({1, 2, 1, 2}));
    EXPECT_EQ(a.rows, (std::vector<std::vector<int>>{{1, -1, 1, -1}, {-1, 1, -1, 1}}));
}

TEST(WMatrix, ApplyMatchesDefinition) {
    // w_j = sum_{i in P_j} y_i - y_{[i+1]}
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-0.5, 0.5);
    for (int p = 1; p <= 5; ++p) {
        for (const auto& w : enumerate_partitions(p)) {
            std::vector<double> y(static_cast<std::size_t>(p));
            for (auto& v : y) v = u(rng);
            const auto got = w_matrix(w).apply(std::span<const double>(y));
            for (int j = 0; j < w.blocks_count(); ++j) {
                double expected = 0.0;
                for (int i : w.block(j)) expected += y[static_cast<std::size_t>(i - 1)] - y[static_cast<std::size_t>(i % p)];
                EXPECT_NEAR(got[static_cast<std::size_t>(j)], expected, 1e-14);
            }
        }
    }
}

TEST(WMatrix, ColumnAndRowSums) {
    for (int p = 1; p <= 6; ++p) {
        for (const auto& w : enumerate_partitions(p)) {
            const auto a = w_matrix(w);
            for (int i = 0; i < p; ++i) {
                int col = 0;
                for (const auto& row : a.rows) {
                    EXPECT_LE(std::abs(row[static_cast<std::size_t>(i)]), 1);
                    col += row[static_cast<std::size_t>(i)];
                }
                EXPECT_EQ(col, 0);
            }
        }
    }
}

TEST(DeltaSystem, TwoBlocksFullSplit) {
    const auto sys = delta_system(Partition({1, 2}), Partition({1, 2}));
    EXPECT_EQ(sys.d, (std::vector<std::vector<int>>{{1, -1}, {-1, 1}}));
    EXPECT_EQ(sys.rank, 1);
    EXPECT_EQ(sys.jacobian_factor, Rational(1));
}

TEST(DeltaSystem, SingleGroupHasNoConstraints) {
    for (int p = 2; p <= 5; ++p) {
        for (int k = 1; k <= p; ++k) {
            for (const auto& w : enumerate_partitions_k(p, k)) {
                const auto sys = delta_system(w, coarsest_partition(k));
                EXPECT_EQ(sys.rank, 0);
                EXPECT_EQ(sys.free_count(), p);
            }
        }
    }
}

TEST(DeltaSystem, ThreeBlocksMerged) {
    const auto sys = delta_system(Partition({1, 2, 3}), Partition({1, 1, 2}));
    EXPECT_EQ(sys.d, (std::vector<std::vector<int>>{{1, 0, -1}, {-1, 0, 1}}));
    EXPECT_EQ(sys.rank, 1);
}

TEST(DeltaSystem, RankIsHMinusOne) {
    for (int p = 1; p <= 5; ++p) {
        for (int k = 1; k <= p; ++k) {
            for (const auto& w : enumerate_partitions_k(p, k)) {
                for (int h = 1; h <= k; ++h) {
                    for (const auto& wp : enumerate_partitions_k(k, h)) {
                        const auto sys = delta_system(w, wp);
                        EXPECT_EQ(sys.rank, h - 1) << w << " " << wp;
                        EXPECT_EQ(static_cast<int>(sys.pivot_columns.size()), sys.rank);
                        EXPECT_EQ(sys.free_count(), p - sys.rank);
                        EXPECT_EQ(sys.jacobian_factor, Rational(1));
                    }
                }
            }
        }
    }
}

TEST(DeltaSystem, SubstitutionSatisfiesConstraintsExactly) {
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<long long> num(-50, 50);
    std::uniform_int_distribution<long long> den(1, 9);
    const auto w = Partition({1, 2, 3, 1, 4});
    for (const auto& wp : enumerate_partitions(4)) {
        const auto sys = delta_system(w, wp);
        for (int trial = 0; trial < 100; ++trial) {
            std::vector<Rational> free(static_cast<std::size_t>(sys.free_count()));
            for (auto& f : free) f = Rational(num(rng), den(rng));
            std::vector<Rational> y(static_cast<std::size_t>(sys.p));
            for (std::size_t f = 0; f < free.size(); ++f) y[static_cast<std::size_t>(sys.free_columns[f])] = free[f];
            for (int i = 0; i < sys.rank; ++i) {
                Rational acc(0);
                for (std::size_t f = 0; f < free.size(); ++f) acc += sys.solution_map[static_cast<std::size_t>(i)][f] * free[f];
                y[static_cast<std::size_t>(sys.pivot_columns[static_cast<std::size_t>(i)])] = acc;
            }
            for (const auto& row : sys.d) {
                Rational total(0);
                for (int c = 0; c < sys.p; ++c) total += Rational(row[static_cast<std::size_t>(c)]) * y[static_cast<std::size_t>(c)];
                EXPECT_EQ(total, Rational(0));
            }
        }
    }
}

TEST(Reduce, NonUnitPivotJacobian) {
    // 2 y1 + y2 = 0 with y2 preferred as pivot: jacobian stays 1.
    const auto a = reduce_constraints({{2, 1}}, 2);
    EXPECT_EQ(a.rank, 1);
    EXPECT_EQ(a.pivot_columns, (std::vector<int>{1}));
    EXPECT_EQ(a.jacobian_factor, Rational(1));
    // Only non-unit entries available.
    const auto b = reduce_constraints({{2, 4}}, 2);
    EXPECT_EQ(b.jacobian_factor, Rational(1, 2));
    EXPECT_EQ(b.solution_map[0][0], Rational(-2));
}

TEST(Reduce, RejectsMismatchedOmegaPrime) {
    EXPECT_THROW(delta_system(Partition({1, 2}), Partition({1, 2, 3})), InvalidArgument);
}
