#pragma once

// Sobol points (Joe-Kuo direction numbers) with an optional random digital
// shift, used for randomized quasi-Monte-Carlo estimates.

#include <algorithm>
#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "vandermonde/errors.hpp"
#include "vandermonde/jitter.hpp"

namespace vandermonde {

class SobolSequence {
public:
    static constexpr int max_dimension = 13;
    static constexpr int bits = 32;

    explicit SobolSequence(int dimension) : dimension_(dimension), state_(static_cast<std::size_t>(dimension), 0u),
                                            shift_(static_cast<std::size_t>(dimension), 0u) {
        if (dimension < 1 || dimension > max_dimension) {
            throw InvalidArgument("sobol: dimension must be in [1, 13]");
        }
        directions_.resize(static_cast<std::size_t>(dimension));
        // First coordinate is the van der Corput sequence in base 2.
        for (int i = 0; i < bits; ++i) directions_[0][static_cast<std::size_t>(i)] = 1u << (bits - 1 - i);
        for (int dim = 1; dim < dimension; ++dim) {
            const Primitive& prim = primitives()[static_cast<std::size_t>(dim - 1)];
            auto& v = directions_[static_cast<std::size_t>(dim)];
            const int s = prim.degree;
            for (int i = 0; i < s; ++i) v[static_cast<std::size_t>(i)] = prim.m[static_cast<std::size_t>(i)] << (bits - 1 - i);
            for (int i = s; i < bits; ++i) {
                std::uint32_t value = v[static_cast<std::size_t>(i - s)] ^ (v[static_cast<std::size_t>(i - s)] >> s);
                for (int k = 1; k < s; ++k) {
                    if ((prim.a >> (s - 1 - k)) & 1u) value ^= v[static_cast<std::size_t>(i - k)];
                }
                v[static_cast<std::size_t>(i)] = value;
            }
        }
    }

    int dimension() const { return dimension_; }

    /// XOR every coordinate with a random word; restarts the sequence.
    void randomize(Rng& rng) {
        for (auto& s : shift_) s = static_cast<std::uint32_t>(rng() >> 32);
        reset();
    }

    void reset() {
        std::fill(state_.begin(), state_.end(), 0u);
        index_ = 0;
    }

    /// Next point in [0,1)^dimension (Gray-code order; the first is the origin
    /// before shifting).
    void next(std::span<double> out) {
        if (index_ > 0) {
            std::uint64_t c = 0;
            std::uint64_t value = index_ - 1;
            while (value & 1u) {
                value >>= 1;
                ++c;
            }
            if (c >= static_cast<std::uint64_t>(bits)) throw ResourceError("sobol: sequence exhausted");
            for (int dim = 0; dim < dimension_; ++dim) state_[static_cast<std::size_t>(dim)] ^= directions_[static_cast<std::size_t>(dim)][c];
        }
        ++index_;
        for (int dim = 0; dim < dimension_; ++dim) {
            out[static_cast<std::size_t>(dim)] = static_cast<double>(state_[static_cast<std::size_t>(dim)] ^ shift_[static_cast<std::size_t>(dim)]) * 0x1.0p-32;
        }
    }

private:
    struct Primitive {
        int degree;
        std::uint32_t a;
        std::array<std::uint32_t, 5> m;
    };

    static const std::array<Primitive, max_dimension - 1>& primitives() {
        static const std::array<Primitive, max_dimension - 1> table{{
            {1, 0, {1, 0, 0, 0, 0}},
            {2, 1, {1, 3, 0, 0, 0}},
            {3, 1, {1, 3, 1, 0, 0}},
            {3, 2, {1, 1, 1, 0, 0}},
            {4, 1, {1, 1, 3, 3, 0}},
            {4, 4, {1, 3, 5, 13, 0}},
            {5, 2, {1, 1, 5, 5, 17}},
            {5, 4, {1, 1, 5, 5, 5}},
            {5, 7, {1, 1, 7, 11, 19}},
            {5, 11, {1, 1, 5, 1, 1}},
            {5, 13, {1, 1, 1, 3, 11}},
            {5, 14, {1, 3, 5, 5, 31}},
        }};
        return table;
    }

    int dimension_;
    std::vector<std::array<std::uint32_t, bits>> directions_;
    std::vector<std::uint32_t> state_;
    std::vector<std::uint32_t> shift_;
    std::uint64_t index_ = 0;
};

} // namespace vandermonde
