//------------------------------- -*- C++ -*- -------------------------------//
// Copyright frogtree contributors
// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
//! \file tests/test_random.cpp
//---------------------------------------------------------------------------//
#include <atomic>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>
#include <vector>

#include <gtest/gtest.h>

#include <frogtree/parallel.hpp>
#include <frogtree/random.hpp>

using namespace frogtree;

// Known-answer vectors published with the Random123 library
TEST(Philox, KnownAnswers)
{
    using C = Philox4x32::Counter;
    EXPECT_EQ(Philox4x32::apply({0, 0, 0, 0}, {0, 0}),
              (C{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}));
    EXPECT_EQ(Philox4x32::apply({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff},
                                {0xffffffff, 0xffffffff}),
              (C{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}));
    EXPECT_EQ(Philox4x32::apply({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344},
                                {0xa4093822, 0x299f31d0}),
              (C{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1}));
}

TEST(SplitMix, ReferenceOutput)
{
    // First output of the reference generator seeded with 0
    EXPECT_EQ(splitmix64(0), 0xe220a8397b1dcdafull);
}

TEST(CounterStream, DeterministicAndDistinct)
{
    CounterStream a(7, StreamPurpose::walk, 3);
    CounterStream b(7, StreamPurpose::walk, 3);
    CounterStream c(7, StreamPurpose::walk, 4);
    CounterStream e(7, StreamPurpose::sleepers, 3);
    int same_c = 0;
    int same_e = 0;
    for (int i = 0; i < 1000; ++i)
    {
        auto const x = a();
        EXPECT_EQ(x, b());
        same_c += x == c();
        same_e += x == e();
    }
    EXPECT_LT(same_c, 3);
    EXPECT_LT(same_e, 3);
}

TEST(CounterStream, CopyKeepsPosition)
{
    CounterStream a(1, StreamPurpose::walk, 0);
    for (int i = 0; i < 5; ++i)
    {
        a();
    }
    auto b = a;
    for (int i = 0; i < 20; ++i)
    {
        EXPECT_EQ(a(), b());
    }
}

TEST(CounterStream, BelowIsUniform)
{
    CounterStream rng(11, StreamPurpose::walk, 0);
    constexpr std::uint32_t n = 7;
    constexpr int draws = 700000;
    std::vector<int> hist(n, 0);
    for (int i = 0; i < draws; ++i)
    {
        auto const r = rng.below(n);
        ASSERT_LT(r, n);
        ++hist[r];
    }
    double chi2 = 0;
    double const expect = double(draws) / n;
    for (int h : hist)
    {
        chi2 += (h - expect) * (h - expect) / expect;
    }
    // 6 degrees of freedom, p = 0.001
    EXPECT_LT(chi2, 22.46);
}

TEST(CounterStream, UnitInterval)
{
    CounterStream rng(3, StreamPurpose::walk, 9);
    double sum = 0;
    constexpr int draws = 200000;
    for (int i = 0; i < draws; ++i)
    {
        double const u = rng.uniform();
        ASSERT_GE(u, 0.0);
        ASSERT_LT(u, 1.0);
        sum += u;
    }
    EXPECT_NEAR(sum / draws, 0.5, 4 * std::sqrt(1.0 / 12 / draws));
    EXPECT_EQ(to_unit_double(0, 0), 0.0);
    EXPECT_LT(to_unit_double(0xffffffff, 0xffffffff), 1.0);
}

class PoissonSampler : public ::testing::TestWithParam<double>
{
};

TEST_P(PoissonSampler, Moments)
{
    double const rate = GetParam();
    CounterStream rng(5, StreamPurpose::walk, std::uint64_t(rate * 1000));
    constexpr int draws = 200000;
    double sum = 0;
    double sum_sq = 0;
    for (int i = 0; i < draws; ++i)
    {
        auto const x = double(sample_poisson(rng, rate));
        sum += x;
        sum_sq += x * x;
    }
    double const mean = sum / draws;
    double const var = sum_sq / draws - mean * mean;
    EXPECT_NEAR(mean, rate, 5 * std::sqrt(rate / draws) + 1e-12);
    // Var of the sample variance of a Poisson is rate + 2 rate^2 (approx)
    EXPECT_NEAR(var, rate, 5 * std::sqrt((rate + 2 * rate * rate) / draws) + 1e-12);
}

INSTANTIATE_TEST_SUITE_P(Rates, PoissonSampler,
                         ::testing::Values(0.0, 0.3, 2.0, 17.5, 80.0));

TEST(BinomialSampler, Moments)
{
    CounterStream rng(5, StreamPurpose::walk, 1);
    constexpr int draws = 100000;
    double sum = 0;
    for (int i = 0; i < draws; ++i)
    {
        sum += double(sample_binomial(rng, 10, 0.3));
    }
    EXPECT_NEAR(sum / draws, 3.0, 5 * std::sqrt(2.1 / draws));
    EXPECT_EQ(sample_binomial(rng, 10, 0.0), 0u);
    EXPECT_EQ(sample_binomial(rng, 10, 1.0), 10u);
}

TEST(ParallelFor, CoversEveryIndexOnce)
{
    for (unsigned threads : {1u, 3u, 8u})
    {
        std::vector<std::atomic<int>> seen(1000);
        parallel_for(1000, threads, [&](unsigned, std::int64_t i) { ++seen[i]; });
        for (auto const& s : seen)
        {
            EXPECT_EQ(s.load(), 1);
        }
    }
}

TEST(ParallelFor, RethrowsWorkerException)
{
    EXPECT_THROW(parallel_for(100, 4,
                              [](unsigned, std::int64_t i) {
                                  if (i == 57)
                                  {
                                      throw std::runtime_error("boom");
                                  }
                              }),
                 std::runtime_error);
}
