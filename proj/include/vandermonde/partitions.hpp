#pragma once

// Set partitions of {1,...,p} encoded as restricted-growth strings, together
// with the counting functions and coefficients the moment expansion needs.

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "vandermonde/errors.hpp"

namespace vandermonde {

/// A set partition of {1,...,p}. `omega()[i]` is the 1-based block label of
/// element i+1; labels appear for the first time in increasing order.
class Partition {
public:
    Partition() = default;

    explicit Partition(std::vector<int> omega) : omega_(std::move(omega)) {
        if (omega_.empty()) {
            throw InvalidArgument("partition: empty restricted-growth string");
        }
        if (omega_[0] != 1) {
            throw InvalidArgument("partition: restricted-growth string must start with 1");
        }
        int max_label = 0;
        for (int label : omega_) {
            if (label < 1 || label > max_label + 1) {
                throw InvalidArgument("partition: not a restricted-growth string");
            }
            max_label = std::max(max_label, label);
        }
        blocks_.assign(static_cast<std::size_t>(max_label), {});
        for (std::size_t i = 0; i < omega_.size(); ++i) {
            blocks_[static_cast<std::size_t>(omega_[i] - 1)].push_back(static_cast<int>(i) + 1);
        }
    }

    /// p = number of elements.
    int size() const { return static_cast<int>(omega_.size()); }
    /// k = number of blocks.
    int blocks_count() const { return static_cast<int>(blocks_.size()); }
    const std::vector<int>& omega() const { return omega_; }
    /// Block j (0-based) as a sorted list of 1-based elements.
    const std::vector<int>& block(int j) const { return blocks_.at(static_cast<std::size_t>(j)); }
    const std::vector<std::vector<int>>& blocks() const { return blocks_; }

    /// Block label (1-based) of a 1-based element.
    int label_of(int element) const { return omega_.at(static_cast<std::size_t>(element - 1)); }

    std::string str() const {
        std::ostringstream os;
        os << '[';
        for (std::size_t i = 0; i < omega_.size(); ++i) {
            if (i) os << ',';
            os << omega_[i];
        }
        os << ']';
        return os.str();
    }

    friend bool operator==(const Partition& a, const Partition& b) { return a.omega_ == b.omega_; }
    friend auto operator<=>(const Partition& a, const Partition& b) { return a.omega_ <=> b.omega_; }
    friend std::ostream& operator<<(std::ostream& os, const Partition& part) { return os << part.str(); }

private:
    std::vector<int> omega_;
    std::vector<std::vector<int>> blocks_;
};

/// The partition {1..p} -> one block per element: [1,2,...,p].
inline Partition finest_partition(int p) {
    std::vector<int> omega(static_cast<std::size_t>(p));
    for (int i = 0; i < p; ++i) omega[static_cast<std::size_t>(i)] = i + 1;
    return Partition(std::move(omega));
}

/// The single-block partition [1,1,...,1].
inline Partition coarsest_partition(int p) {
    return Partition(std::vector<int>(static_cast<std::size_t>(p), 1));
}

/// Partition induced by equal values of `mu`, blocks ordered by first appearance.
template <typename T>
Partition partition_of(std::span<const T> mu) {
    if (mu.empty()) throw InvalidArgument("partition_of: empty label vector");
    std::map<T, int> first_seen;
    std::vector<int> omega;
    omega.reserve(mu.size());
    for (const T& label : mu) {
        auto [it, inserted] = first_seen.try_emplace(label, static_cast<int>(first_seen.size()) + 1);
        omega.push_back(it->second);
    }
    return Partition(std::move(omega));
}

inline Partition partition_of(const std::vector<long long>& mu) {
    return partition_of(std::span<const long long>(mu));
}

inline Partition partition_of(const std::vector<int>& mu) {
    return partition_of(std::span<const int>(mu));
}

namespace detail {

inline std::uint64_t checked_add(std::uint64_t a, std::uint64_t b) {
    std::uint64_t out;
    if (__builtin_add_overflow(a, b, &out)) throw std::overflow_error("integer overflow in addition");
    return out;
}

inline std::int64_t checked_add(std::int64_t a, std::int64_t b) {
    std::int64_t out;
    if (__builtin_add_overflow(a, b, &out)) throw std::overflow_error("integer overflow in addition");
    return out;
}

inline std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b) {
    std::uint64_t out;
    if (__builtin_mul_overflow(a, b, &out)) throw std::overflow_error("integer overflow in multiplication");
    return out;
}

inline std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
    std::int64_t out;
    if (__builtin_mul_overflow(a, b, &out)) throw std::overflow_error("integer overflow in multiplication");
    return out;
}

inline std::uint64_t factorial(int n) {
    std::uint64_t out = 1;
    for (int i = 2; i <= n; ++i) out = checked_mul(out, static_cast<std::uint64_t>(i));
    return out;
}

inline std::uint64_t binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    k = std::min(k, n - k);
    // C(n,i) = C(n,i-1) * (n-i+1) / i stays integral at every step.
    unsigned __int128 out = 1;
    for (int i = 1; i <= k; ++i) {
        out = out * static_cast<unsigned>(n - i + 1) / static_cast<unsigned>(i);
        if (out > UINT64_MAX) throw std::overflow_error("binomial overflow");
    }
    return static_cast<std::uint64_t>(out);
}

inline void enumerate_rgs(int p, int k, std::vector<int>& prefix, int current_max,
                          std::vector<Partition>& out) {
    const int pos = static_cast<int>(prefix.size());
    if (pos == p) {
        if (current_max == k) out.emplace_back(prefix);
        return;
    }
    // Not enough positions left to open the remaining blocks.
    if (k - current_max > p - pos) return;
    const int limit = std::min(current_max + 1, k);
    for (int label = 1; label <= limit; ++label) {
        prefix.push_back(label);
        enumerate_rgs(p, k, prefix, std::max(current_max, label), out);
        prefix.pop_back();
    }
}

} // namespace detail

/// Stirling number of the second kind S(p,k), exact; throws on overflow.
inline std::uint64_t stirling2(int p, int k) {
    if (p < 1 || k < 1 || k > p) {
        throw InvalidArgument("stirling2: need 1 <= k <= p");
    }
    // S(n,j) = j*S(n-1,j) + S(n-1,j-1), row by row.
    std::vector<std::uint64_t> row(static_cast<std::size_t>(k) + 1, 0);
    row[0] = 1;
    for (int n = 1; n <= p; ++n) {
        for (int j = std::min(n, k); j >= 1; --j) {
            row[static_cast<std::size_t>(j)] = detail::checked_add(
                detail::checked_mul(static_cast<std::uint64_t>(j), row[static_cast<std::size_t>(j)]),
                row[static_cast<std::size_t>(j) - 1]);
        }
        row[0] = 0;
    }
    return row[static_cast<std::size_t>(k)];
}

/// Bell number B(p) via the Bell triangle; throws on overflow.
inline std::uint64_t bell(int p) {
    if (p < 1) throw InvalidArgument("bell: need p >= 1");
    std::vector<std::uint64_t> row{1};
    for (int n = 1; n < p; ++n) {
        std::vector<std::uint64_t> next{row.back()};
        for (std::uint64_t v : row) next.push_back(detail::checked_add(next.back(), v));
        row = std::move(next);
    }
    return row.back();
}

/// All partitions of {1..p} into exactly k blocks, lexicographic in omega.
inline std::vector<Partition> enumerate_partitions_k(int p, int k) {
    if (p < 1 || k < 1 || k > p) {
        throw InvalidArgument("enumerate_partitions_k: need 1 <= k <= p");
    }
    std::vector<Partition> out;
    std::vector<int> prefix;
    prefix.reserve(static_cast<std::size_t>(p));
    prefix.push_back(1);
    detail::enumerate_rgs(p, k, prefix, 1, out);
    return out;
}

/// All partitions of {1..p}, grouped by block count k = 1..p.
inline std::vector<Partition> enumerate_partitions(int p) {
    if (p < 1) throw InvalidArgument("enumerate_partitions: need p >= 1");
    if (p > 12) throw ResourceError("enumerate_partitions: p > 12 exceeds the memory budget");
    std::vector<Partition> out;
    for (int k = 1; k <= p; ++k) {
        auto part = enumerate_partitions_k(p, k);
        out.insert(out.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
    }
    return out;
}

/// (-1)^(k-h) * prod_j (|P_j| - 1)! for a partition of {1..k} into h blocks.
inline std::int64_t u_coeff(const Partition& omega_prime) {
    const int k = omega_prime.size();
    const int h = omega_prime.blocks_count();
    std::int64_t out = ((k - h) % 2 == 0) ? 1 : -1;
    for (const auto& block : omega_prime.blocks()) {
        out = detail::checked_mul(out, static_cast<std::int64_t>(detail::factorial(static_cast<int>(block.size()) - 1)));
    }
    return out;
}

/// Lazily enumerates the label vectors mu in {0..r-1}^p inducing a given
/// partition, i.e. injective assignments of labels to blocks, in
/// lexicographic order of the block labels.
class MemberGenerator {
public:
    MemberGenerator(Partition omega, int r) : omega_(std::move(omega)), r_(r) {
        const int k = omega_.blocks_count();
        if (r_ >= k) {
            labels_.resize(static_cast<std::size_t>(k));
            for (int j = 0; j < k; ++j) labels_[static_cast<std::size_t>(j)] = j;
            done_ = false;
        }
    }

    /// Writes the next member into `mu`; returns false when exhausted.
    bool next(std::vector<int>& mu) {
        if (done_) return false;
        mu.resize(static_cast<std::size_t>(omega_.size()));
        for (int i = 0; i < omega_.size(); ++i) {
            mu[static_cast<std::size_t>(i)] = labels_[static_cast<std::size_t>(omega_.omega()[static_cast<std::size_t>(i)] - 1)];
        }
        advance();
        return true;
    }

private:
    bool used_elsewhere(std::size_t upto, int value) const {
        for (std::size_t j = 0; j < upto; ++j)
            if (labels_[j] == value) return true;
        return false;
    }

    // Next k-permutation of {0..r-1} in lexicographic order.
    void advance() {
        const std::size_t k = labels_.size();
        for (std::size_t pos = k; pos-- > 0;) {
            int candidate = labels_[pos] + 1;
            while (candidate < r_ && used_elsewhere(pos, candidate)) ++candidate;
            if (candidate >= r_) continue;
            labels_[pos] = candidate;
            // Fill the tail with the smallest unused labels.
            for (std::size_t tail = pos + 1; tail < k; ++tail) {
                int v = 0;
                while (used_elsewhere(tail, v)) ++v;
                labels_[tail] = v;
            }
            return;
        }
        done_ = true;
    }

    Partition omega_;
    int r_;
    std::vector<int> labels_;
    bool done_ = true;
};

/// Eager form of MemberGenerator: r!/(r-k)! vectors, empty when r < k.
inline std::vector<std::vector<int>> members_of(const Partition& omega, int r) {
    std::vector<std::vector<int>> out;
    MemberGenerator gen(omega, r);
    std::vector<int> mu;
    while (gen.next(mu)) out.push_back(mu);
    return out;
}

} // namespace vandermonde
