#pragma once

// Integer linear forms w_j(omega) and the delta-constraint systems obtained by
// summing them over the blocks of a second partition omega'. Elimination is
// exact over the rationals.

#include <cstdlib>
#include <span>
#include <vector>

#include <boost/rational.hpp>

#include "vandermonde/errors.hpp"
#include "vandermonde/partitions.hpp"

namespace vandermonde {

using Rational = boost::rational<long long>;

/// k x p matrix with A[j][i] = [i+1 in P_j] - [pred(i+1) in P_j], where the
/// predecessor is cyclic (pred(1) = p). Row j applied to y gives
/// w_j = sum_{i in P_j} (y_i - y_{[i+1]}).
struct WMatrix {
    int p = 0;
    int k = 0;
    std::vector<std::vector<int>> rows;

    template <typename T>
    std::vector<T> apply(std::span<const T> y) const {
        std::vector<T> out(static_cast<std::size_t>(k), T{});
        for (int j = 0; j < k; ++j) {
            const auto& row = rows[static_cast<std::size_t>(j)];
            T acc{};
            for (int i = 0; i < p; ++i) {
                if (row[static_cast<std::size_t>(i)] != 0) acc += static_cast<T>(row[static_cast<std::size_t>(i)]) * y[static_cast<std::size_t>(i)];
            }
            out[static_cast<std::size_t>(j)] = acc;
        }
        return out;
    }
};

inline WMatrix w_matrix(const Partition& omega) {
    WMatrix a;
    a.p = omega.size();
    a.k = omega.blocks_count();
    a.rows.assign(static_cast<std::size_t>(a.k), std::vector<int>(static_cast<std::size_t>(a.p), 0));
    // Element m (1-based) appears as +y_m in the block of m and as -y_m in
    // the block of its cyclic predecessor.
    for (int m = 1; m <= a.p; ++m) {
        const int pred = (m == 1) ? a.p : m - 1;
        a.rows[static_cast<std::size_t>(omega.label_of(m) - 1)][static_cast<std::size_t>(m - 1)] += 1;
        a.rows[static_cast<std::size_t>(omega.label_of(pred) - 1)][static_cast<std::size_t>(m - 1)] -= 1;
    }
    return a;
}

/// Row-reduced form of D y = 0 where row j' of D is the sum of the A rows
/// indexed by block j' of omega'. Pivot variables are expressed through the
/// free ones: y[pivot_columns[i]] = sum_f solution_map[i][f] * y[free_columns[f]].
struct ConstraintSystem {
    int p = 0;
    int h = 0;
    std::vector<std::vector<int>> d;
    int rank = 0;
    std::vector<int> pivot_rows;
    std::vector<int> pivot_columns;
    std::vector<int> free_columns;
    std::vector<std::vector<Rational>> solution_map;
    Rational jacobian_factor{1};

    int free_count() const { return static_cast<int>(free_columns.size()); }

    /// True when every solution_map entry is an integer.
    bool integral_solution_map() const {
        for (const auto& row : solution_map)
            for (const auto& v : row)
                if (v.denominator() != 1) return false;
        return true;
    }

    /// Full p-vector from free-variable values.
    template <typename T>
    void complete(std::span<const T> free_values, std::span<T> y) const {
        for (std::size_t f = 0; f < free_columns.size(); ++f) {
            y[static_cast<std::size_t>(free_columns[f])] = free_values[f];
        }
        for (std::size_t i = 0; i < pivot_columns.size(); ++i) {
            T acc{};
            const auto& row = solution_map[i];
            for (std::size_t f = 0; f < free_columns.size(); ++f) {
                if (row[f] != Rational(0)) {
                    acc += static_cast<T>(boost::rational_cast<double>(row[f])) * free_values[f];
                }
            }
            y[static_cast<std::size_t>(pivot_columns[i])] = acc;
        }
    }
};

namespace detail {

inline Rational rational_determinant(std::vector<std::vector<Rational>> m) {
    const std::size_t n = m.size();
    Rational det{1};
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t pivot = n;
        for (std::size_t r = c; r < n; ++r) {
            if (m[r][c] != Rational(0)) {
                pivot = r;
                break;
            }
        }
        if (pivot == n) return Rational{0};
        if (pivot != c) {
            std::swap(m[pivot], m[c]);
            det = -det;
        }
        det *= m[c][c];
        for (std::size_t r = c + 1; r < n; ++r) {
            if (m[r][c] == Rational(0)) continue;
            const Rational factor = m[r][c] / m[c][c];
            for (std::size_t cc = c; cc < n; ++cc) m[r][cc] -= factor * m[c][cc];
        }
    }
    return det;
}

} // namespace detail

/// Exact elimination of an integer system with greedy pivots that prefer
/// entries of magnitude one.
inline ConstraintSystem reduce_constraints(std::vector<std::vector<int>> d, int p) {
    ConstraintSystem sys;
    sys.p = p;
    sys.h = static_cast<int>(d.size());
    sys.d = d;

    const std::size_t rows = d.size();
    const std::size_t cols = static_cast<std::size_t>(p);
    std::vector<std::vector<Rational>> m(rows, std::vector<Rational>(cols));
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c) m[r][c] = Rational(d[r][c]);
    std::vector<int> origin(rows);
    for (std::size_t r = 0; r < rows; ++r) origin[r] = static_cast<int>(r);

    std::size_t next_row = 0;
    std::vector<bool> is_pivot(cols, false);
    while (next_row < rows) {
        // First unit entry in column order, else the first nonzero one.
        std::size_t best = rows;
        std::size_t c = cols;
        for (std::size_t cc = 0; cc < cols && best == rows; ++cc) {
            if (is_pivot[cc]) continue;
            for (std::size_t r = next_row; r < rows; ++r) {
                if (abs(m[r][cc]) == Rational(1)) {
                    best = r;
                    c = cc;
                    break;
                }
            }
        }
        for (std::size_t cc = 0; cc < cols && best == rows; ++cc) {
            if (is_pivot[cc]) continue;
            for (std::size_t r = next_row; r < rows; ++r) {
                if (m[r][cc] != Rational(0)) {
                    best = r;
                    c = cc;
                    break;
                }
            }
        }
        if (best == rows) break;
        std::swap(m[best], m[next_row]);
        std::swap(origin[best], origin[next_row]);
        const Rational lead = m[next_row][c];
        for (auto& v : m[next_row]) v /= lead;
        for (std::size_t r = 0; r < rows; ++r) {
            if (r == next_row || m[r][c] == Rational(0)) continue;
            const Rational factor = m[r][c];
            for (std::size_t cc = 0; cc < cols; ++cc) m[r][cc] -= factor * m[next_row][cc];
        }
        is_pivot[c] = true;
        sys.pivot_columns.push_back(static_cast<int>(c));
        sys.pivot_rows.push_back(origin[next_row]);
        ++next_row;
    }
    sys.rank = static_cast<int>(sys.pivot_columns.size());
    for (std::size_t c = 0; c < cols; ++c)
        if (!is_pivot[c]) sys.free_columns.push_back(static_cast<int>(c));

    sys.solution_map.assign(static_cast<std::size_t>(sys.rank), std::vector<Rational>(sys.free_columns.size()));
    for (int i = 0; i < sys.rank; ++i) {
        for (std::size_t f = 0; f < sys.free_columns.size(); ++f) {
            sys.solution_map[static_cast<std::size_t>(i)][f] = -m[static_cast<std::size_t>(i)][static_cast<std::size_t>(sys.free_columns[f])];
        }
    }

    if (sys.rank > 0) {
        std::vector<std::vector<Rational>> sub(static_cast<std::size_t>(sys.rank), std::vector<Rational>(static_cast<std::size_t>(sys.rank)));
        for (int i = 0; i < sys.rank; ++i)
            for (int j = 0; j < sys.rank; ++j)
                sub[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                    Rational(d[static_cast<std::size_t>(sys.pivot_rows[static_cast<std::size_t>(i)])][static_cast<std::size_t>(sys.pivot_columns[static_cast<std::size_t>(j)])]);
        const Rational det = detail::rational_determinant(std::move(sub));
        sys.jacobian_factor = Rational(1) / abs(det);
    }
    return sys;
}

/// D rows are sums of w_matrix(omega) rows over the blocks of omega_prime.
inline ConstraintSystem delta_system(const Partition& omega, const Partition& omega_prime) {
    if (omega_prime.size() != omega.blocks_count()) {
        throw InvalidArgument("delta_system: omega' must partition the blocks of omega");
    }
    const WMatrix a = w_matrix(omega);
    std::vector<std::vector<int>> d(static_cast<std::size_t>(omega_prime.blocks_count()),
                                    std::vector<int>(static_cast<std::size_t>(a.p), 0));
    for (int jp = 0; jp < omega_prime.blocks_count(); ++jp) {
        for (int member : omega_prime.block(jp)) {
            const auto& row = a.rows[static_cast<std::size_t>(member - 1)];
            for (int i = 0; i < a.p; ++i) d[static_cast<std::size_t>(jp)][static_cast<std::size_t>(i)] += row[static_cast<std::size_t>(i)];
        }
    }
    return reduce_constraints(std::move(d), a.p);
}

} // namespace vandermonde
