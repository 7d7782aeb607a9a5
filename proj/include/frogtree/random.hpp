//------------------------------- -*- C++ -*- -------------------------------//
// Copyright frogtree contributors
// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
//! \file frogtree/random.hpp
//! Counter-based random streams for reproducible parallel Monte Carlo.
//---------------------------------------------------------------------------//
#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>

namespace frogtree
{
//---------------------------------------------------------------------------//
/*!
 * Independent random purposes within one trial.
 *
 * Each purpose gets its own Philox key, so e.g. the sleeping-frog counts of a
 * trial do not depend on how many walk steps were drawn before them.
 */
enum class StreamPurpose : std::uint64_t
{
    walk = 1,
    sleepers = 2,
    star_system = 3,
    poisson_division = 4,
    cover_time = 5,
    coupling_simple = 6,
    coupling_nonbacktracking = 7,
};

//---------------------------------------------------------------------------//
//! SplitMix64 finalizer, used to derive keys from (seed, purpose).
constexpr std::uint64_t splitmix64(std::uint64_t z) noexcept
{
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

//---------------------------------------------------------------------------//
/*!
 * Philox4x32-10 bijection (Salmon et al., SC'11).
 *
 * Maps a 128-bit counter to 128 random bits under a 64-bit key.
 */
struct Philox4x32
{
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static constexpr Counter apply(Counter ctr, Key key) noexcept
    {
        constexpr std::uint32_t mul_a = 0xD2511F53u;
        constexpr std::uint32_t mul_b = 0xCD9E8D57u;
        constexpr std::uint32_t weyl_a = 0x9E3779B9u;
        constexpr std::uint32_t weyl_b = 0xBB67AE85u;
        for (int round = 0; round < 10; ++round)
        {
            std::uint64_t const p0 = std::uint64_t(mul_a) * ctr[0];
            std::uint64_t const p1 = std::uint64_t(mul_b) * ctr[2];
            ctr = {std::uint32_t(p1 >> 32) ^ ctr[1] ^ key[0],
                   std::uint32_t(p1),
                   std::uint32_t(p0 >> 32) ^ ctr[3] ^ key[1],
                   std::uint32_t(p0)};
            key[0] += weyl_a;
            key[1] += weyl_b;
        }
        return ctr;
    }
};

namespace detail
{
constexpr Philox4x32::Key
derive_key(std::uint64_t seed, StreamPurpose purpose) noexcept
{
    std::uint64_t const k
        = splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(purpose)));
    return {std::uint32_t(k), std::uint32_t(k >> 32)};
}
}  // namespace detail

//---------------------------------------------------------------------------//
/*!
 * Stateless 128-bit draw keyed by (seed, purpose, stream, index).
 *
 * Used where a random quantity must be a pure function of its address, e.g.
 * the number of frogs sleeping at a vertex.
 */
inline Philox4x32::Counter counter_draw(std::uint64_t seed,
                                        StreamPurpose purpose,
                                        std::uint64_t stream,
                                        std::uint64_t index) noexcept
{
    return Philox4x32::apply({std::uint32_t(index),
                              std::uint32_t(index >> 32),
                              std::uint32_t(stream),
                              std::uint32_t(stream >> 32)},
                             detail::derive_key(seed, purpose));
}

//! Uniform double in [0, 1) with 53 random bits.
inline double to_unit_double(std::uint32_t hi, std::uint32_t lo) noexcept
{
    std::uint64_t const bits
        = ((std::uint64_t(hi) << 32) | std::uint64_t(lo)) >> 11;
    return double(bits) * 0x1.0p-53;
}

//---------------------------------------------------------------------------//
/*!
 * Sequential stream of 32-bit values for one (seed, purpose, stream) triple.
 *
 * Satisfies UniformRandomBitGenerator. Copying a stream copies its position.
 * Two streams with different triples never share a counter block.
 */
class CounterStream
{
  public:
    using result_type = std::uint32_t;

    CounterStream(std::uint64_t seed,
                  StreamPurpose purpose,
                  std::uint64_t stream) noexcept
        : key_(detail::derive_key(seed, purpose)), stream_(stream)
    {
    }

    static constexpr result_type min() { return 0; }
    static constexpr result_type max()
    {
        return std::numeric_limits<result_type>::max();
    }

    result_type operator()() noexcept
    {
        if (pos_ == 4)
        {
            block_ = Philox4x32::apply({std::uint32_t(next_block_),
                                        std::uint32_t(next_block_ >> 32),
                                        std::uint32_t(stream_),
                                        std::uint32_t(stream_ >> 32)},
                                       key_);
            ++next_block_;
            pos_ = 0;
        }
        return block_[pos_++];
    }

    //! Uniform double in [0, 1)
    double uniform() noexcept
    {
        std::uint32_t const hi = (*this)();
        return to_unit_double(hi, (*this)());
    }

    //! Uniform integer in [0, n) (Lemire's multiply-shift with rejection)
    std::uint32_t below(std::uint32_t n) noexcept
    {
        std::uint64_t m = std::uint64_t((*this)()) * n;
        auto low = std::uint32_t(m);
        if (low < n)
        {
            std::uint32_t const threshold = (0u - n) % n;
            while (low < threshold)
            {
                m = std::uint64_t((*this)()) * n;
                low = std::uint32_t(m);
            }
        }
        return std::uint32_t(m >> 32);
    }

    bool bernoulli(double p) noexcept { return this->uniform() < p; }

  private:
    Philox4x32::Key key_;
    std::uint64_t stream_;
    std::uint64_t next_block_ = 0;
    Philox4x32::Counter block_{};
    int pos_ = 4;
};

//---------------------------------------------------------------------------//
// SAMPLERS
//---------------------------------------------------------------------------//
/*!
 * Poisson sample by sequential inversion.
 *
 * Rates above 30 are split into equal pieces so the inversion never starts
 * from an underflowing e^{-rate}.
 */
template<class Rng>
std::uint64_t sample_poisson(Rng& rng, double rate)
{
    if (!(rate > 0))
    {
        return 0;
    }
    constexpr double max_piece = 30.0;
    int const pieces = rate > max_piece ? int(std::ceil(rate / max_piece)) : 1;
    double const piece = rate / pieces;
    double const p0 = std::exp(-piece);
    std::uint64_t total = 0;
    for (int i = 0; i < pieces; ++i)
    {
        double u = rng.uniform();
        double p = p0;
        double cdf = p;
        std::uint64_t k = 0;
        while (u >= cdf)
        {
            ++k;
            p *= piece / double(k);
            double const next = cdf + p;
            if (next == cdf)
            {
                break;
            }
            cdf = next;
        }
        total += k;
    }
    return total;
}

//! Binomial sample as a sum of Bernoulli trials.
template<class Rng>
std::uint64_t sample_binomial(Rng& rng, std::uint64_t n, double p)
{
    if (p <= 0)
    {
        return 0;
    }
    if (p >= 1)
    {
        return n;
    }
    std::uint64_t hits = 0;
    for (std::uint64_t i = 0; i < n; ++i)
    {
        hits += rng.bernoulli(p) ? 1 : 0;
    }
    return hits;
}

//---------------------------------------------------------------------------//
}  // namespace frogtree
