//------------------------------- -*- C++ -*- -------------------------------//
// Copyright frogtree contributors
// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
//! \file frogtree/pmf.hpp
//! Truncated probability mass functions on the nonnegative integers.
//---------------------------------------------------------------------------//
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>

#include "errors.hpp"
#include "parallel.hpp"
#include "random.hpp"

namespace frogtree
{
//! Allowed deviation of total mass (finite part plus tail) from one
inline constexpr double normalization_tolerance = 1e-12;
//! Absolute slack on every CDF comparison in dominance verdicts
inline constexpr double dominance_slack = 1e-10;
//! Default truncation tolerance for constructors
inline constexpr double default_truncation_tol = 1e-12;

//---------------------------------------------------------------------------//
/*!
 * Probability mass function on {0, ..., K} with explicit tail mass above K.
 *
 * The tail records probability that lives somewhere above the truncation
 * point K but whose location is not tracked. Operations never drop mass:
 * anything they cannot place exactly is moved into the tail. Instances are
 * immutable.
 */
class Pmf
{
  public:
    //! Construct and validate; throws PreconditionError on bad input
    explicit Pmf(std::vector<double> masses,
                 double tail_mass = 0,
                 double tol = default_truncation_tol)
        : masses_(std::move(masses)), tail_(tail_mass), tol_(tol)
    {
        detail::require(!masses_.empty(), "pmf needs at least one mass");
        detail::require(tol_ > 0 && tol_ < 1, "pmf tol must lie in (0, 1)");
        detail::require(std::isfinite(tail_) && tail_ >= 0,
                        "pmf tail mass must be finite and >= 0");
        double sum = 0;
        for (double m : masses_)
        {
            detail::require(std::isfinite(m) && m >= 0,
                            "pmf masses must be finite and >= 0");
            sum += m;
        }
        detail::require(std::abs(sum + tail_ - 1) <= normalization_tolerance,
                        "pmf masses plus tail must sum to 1");
    }

    //! Exact point mass at `value`
    static Pmf point_mass(std::size_t value, double tol = default_truncation_tol)
    {
        std::vector<double> m(value + 1, 0.0);
        m[value] = 1;
        return Pmf(std::move(m), 0, tol);
    }

    //! Build from computed masses, absorbing round-off (internal use)
    static Pmf from_computed(std::vector<double> masses, double tail, double tol);

    std::span<double const> masses() const noexcept { return masses_; }
    double tail_mass() const noexcept { return tail_; }
    double tol() const noexcept { return tol_; }

    //! Largest explicitly represented value K
    std::size_t truncation_point() const noexcept
    {
        return masses_.size() - 1;
    }

    double mass(std::size_t k) const noexcept
    {
        return k < masses_.size() ? masses_[k] : 0.0;
    }

    //! P[X <= x] counting only explicit masses (tail assumed above x)
    double cdf(std::size_t x) const noexcept
    {
        std::size_t const end = std::min(x + 1, masses_.size());
        double s = 0;
        for (std::size_t k = 0; k < end; ++k)
        {
            s += masses_[k];
        }
        return s;
    }

    //! Mean of the explicit part (a lower bound on the true mean)
    double mean() const noexcept
    {
        double s = 0;
        for (std::size_t k = 0; k < masses_.size(); ++k)
        {
            s += double(k) * masses_[k];
        }
        return s;
    }

    double variance() const noexcept
    {
        double const mu = this->mean();
        double s = 0;
        for (std::size_t k = 0; k < masses_.size(); ++k)
        {
            double const dx = double(k) - mu;
            s += dx * dx * masses_[k];
        }
        return s;
    }

  private:
    struct Unchecked
    {
    };
    Pmf(Unchecked, std::vector<double> masses, double tail, double tol)
        : masses_(std::move(masses)), tail_(tail), tol_(tol)
    {
    }

    std::vector<double> masses_;
    double tail_;
    double tol_;
};

//---------------------------------------------------------------------------//
/*!
 * Seal computed masses into a Pmf.
 *
 * Trailing zeros are trimmed. A round-off deficit in total mass is moved to
 * the tail; a round-off excess is removed by rescaling the explicit part.
 * Deviations larger than 1e-9 indicate a bug and throw std::logic_error.
 */
inline Pmf Pmf::from_computed(std::vector<double> masses, double tail, double tol)
{
    while (masses.size() > 1 && masses.back() == 0)
    {
        masses.pop_back();
    }
    if (masses.empty())
    {
        masses.push_back(0);
    }
    double sum = 0;
    for (double& m : masses)
    {
        if (!(m >= 0))
        {
            m = 0;
        }
        sum += m;
    }
    tail = std::max(tail, 0.0);
    double const excess = sum + tail - 1;
    if (!(std::abs(excess) <= 1e-9))
    {
        std::ostringstream os;
        os << "internal normalization error: total mass " << sum + tail;
        throw std::logic_error(os.str());
    }
    if (excess < 0)
    {
        tail = 1 - sum;
    }
    else if (excess > 0 && sum > 0)
    {
        double const target = std::max(1 - tail, 0.0);
        double const scale = target / sum;
        for (double& m : masses)
        {
            m *= scale;
        }
    }
    return Pmf(Unchecked{}, std::move(masses), tail, tol);
}

namespace detail
{
inline void check_tol(double tol)
{
    require(tol > 0 && tol < 1, "tol must lie in (0, 1)");
}

//! log(k!) for k = 0..n
inline std::vector<double> log_factorials(std::size_t n)
{
    std::vector<double> lf(n + 1, 0.0);
    for (std::size_t k = 2; k <= n; ++k)
    {
        lf[k] = lf[k - 1] + std::log(double(k));
    }
    return lf;
}

inline double log_poisson(double rate, double log_rate, std::size_t k)
{
    return -rate + double(k) * log_rate - std::lgamma(double(k) + 1);
}
}  // namespace detail

//---------------------------------------------------------------------------//
// CONSTRUCTORS
//---------------------------------------------------------------------------//
/*!
 * Poisson(rate) truncated at the smallest K with P[X > K] <= tol.
 */
inline Pmf poisson_pmf(double rate, double tol = default_truncation_tol)
{
    detail::require(std::isfinite(rate) && rate >= 0,
                    "poisson rate must be finite and >= 0");
    detail::check_tol(tol);
    if (rate == 0)
    {
        return Pmf::point_mass(0, tol);
    }
    double const log_rate = std::log(rate);
    std::vector<double> masses;
    double tail = 1;
    for (std::size_t k = 0;; ++k)
    {
        masses.push_back(std::exp(detail::log_poisson(rate, log_rate, k)));
        // P[X > k] = P(k + 1, rate), the regularized lower incomplete gamma
        tail = boost::math::gamma_p(double(k) + 1, rate);
        if (tail <= tol)
        {
            break;
        }
    }
    return Pmf::from_computed(std::move(masses), tail, tol);
}

/*!
 * Poisson(rate) conditioned to be nonzero.
 */
inline Pmf conditioned_nonzero(double rate, double tol = default_truncation_tol)
{
    detail::require(std::isfinite(rate) && rate > 0,
                    "conditioned_nonzero needs rate > 0 (zero-rate "
                    "conditioning is degenerate)");
    detail::check_tol(tol);
    double const log_rate = std::log(rate);
    double const nonzero = -std::expm1(-rate);
    double const log_nonzero = std::log(nonzero);
    std::vector<double> masses{0.0};
    double tail = 1;
    for (std::size_t k = 1;; ++k)
    {
        masses.push_back(
            std::exp(detail::log_poisson(rate, log_rate, k) - log_nonzero));
        tail = boost::math::gamma_p(double(k) + 1, rate) / nonzero;
        if (tail <= tol)
        {
            break;
        }
    }
    return Pmf::from_computed(std::move(masses), tail, tol);
}

/*!
 * Binomial(n, p), represented exactly (no tail).
 */
inline Pmf binomial_pmf(std::size_t n, double p, double tol = default_truncation_tol)
{
    detail::require(p >= 0 && p <= 1, "binomial p must lie in [0, 1]");
    detail::check_tol(tol);
    if (p == 0)
    {
        return Pmf::point_mass(0, tol);
    }
    if (p == 1)
    {
        return Pmf::point_mass(n, tol);
    }
    auto const lf = detail::log_factorials(n);
    double const lp = std::log(p);
    double const lq = std::log1p(-p);
    std::vector<double> masses(n + 1);
    for (std::size_t j = 0; j <= n; ++j)
    {
        masses[j] = std::exp(lf[n] - lf[j] - lf[n - j] + double(j) * lp
                             + double(n - j) * lq);
    }
    return Pmf::from_computed(std::move(masses), 0, tol);
}

//---------------------------------------------------------------------------//
// OPERATIONS
//---------------------------------------------------------------------------//
/*!
 * Move trailing mass into the tail while the tail stays within `tol`.
 */
inline Pmf truncate_tail(Pmf const& pi, double tol)
{
    detail::check_tol(tol);
    std::vector<double> masses(pi.masses().begin(), pi.masses().end());
    double tail = pi.tail_mass();
    while (masses.size() > 1 && tail + masses.back() <= tol)
    {
        tail += masses.back();
        masses.pop_back();
    }
    return Pmf::from_computed(std::move(masses), tail, pi.tol());
}

/*!
 * Law of Bin(X, p) for X ~ pi.
 *
 * The tail of `pi` is mapped entirely into the output tail, except for p = 0
 * where every value thins to zero.
 */
inline Pmf thin(Pmf const& pi, double p)
{
    detail::require(p >= 0 && p <= 1, "thinning probability must lie in [0, 1]");
    if (p == 0)
    {
        return Pmf::point_mass(0, pi.tol());
    }
    if (p == 1)
    {
        return pi;
    }
    auto const in = pi.masses();
    std::size_t const kmax = pi.truncation_point();
    auto const lf = detail::log_factorials(kmax);
    double const lp = std::log(p);
    double const lq = std::log1p(-p);
    std::vector<double> out(kmax + 1, 0.0);
    for (std::size_t k = 0; k <= kmax; ++k)
    {
        if (in[k] == 0)
        {
            continue;
        }
        for (std::size_t j = 0; j <= k; ++j)
        {
            out[j] += in[k]
                      * std::exp(lf[k] - lf[j] - lf[k - j] + double(j) * lp
                                 + double(k - j) * lq);
        }
    }
    return Pmf::from_computed(std::move(out), pi.tail_mass(), pi.tol());
}

/*!
 * Law of X + Y for independent X ~ a, Y ~ b.
 *
 * Any pair involving a tail value lands in the output tail, so the output
 * tail is t_a + t_b - t_a t_b.
 */
inline Pmf convolve(Pmf const& a, Pmf const& b)
{
    auto const x = a.masses();
    auto const y = b.masses();
    std::vector<double> out(x.size() + y.size() - 1, 0.0);
    for (std::size_t i = 0; i < x.size(); ++i)
    {
        if (x[i] == 0)
        {
            continue;
        }
        for (std::size_t j = 0; j < y.size(); ++j)
        {
            out[i + j] += x[i] * y[j];
        }
    }
    double const ta = a.tail_mass();
    double const tb = b.tail_mass();
    return Pmf::from_computed(
        std::move(out), ta + tb - ta * tb, std::max(a.tol(), b.tol()));
}

/*!
 * Mixture sum_i weights[i] * components[i]; weights must sum to one.
 */
inline Pmf mixture(std::span<double const> weights,
                   std::span<Pmf const> components)
{
    detail::require(weights.size() == components.size() && !weights.empty(),
                    "mixture needs one weight per component");
    std::size_t len = 1;
    double tol = 0;
    for (auto const& c : components)
    {
        len = std::max(len, c.masses().size());
        tol = std::max(tol, c.tol());
    }
    std::vector<double> out(len, 0.0);
    double tail = 0;
    for (std::size_t i = 0; i < weights.size(); ++i)
    {
        detail::require(weights[i] >= 0, "mixture weights must be >= 0");
        auto const m = components[i].masses();
        for (std::size_t k = 0; k < m.size(); ++k)
        {
            out[k] += weights[i] * m[k];
        }
        tail += weights[i] * components[i].tail_mass();
    }
    return Pmf::from_computed(std::move(out), tail, tol);
}

/*!
 * Upper bound on the total-variation distance.
 *
 * Explicit masses are compared pointwise; the two tails are treated as
 * disjoint, which is exact when both are zero.
 */
inline double total_variation(Pmf const& p, Pmf const& q) noexcept
{
    std::size_t const len = std::max(p.masses().size(), q.masses().size());
    double s = 0;
    for (std::size_t k = 0; k < len; ++k)
    {
        s += std::abs(p.mass(k) - q.mass(k));
    }
    return 0.5 * (s + p.tail_mass() + q.tail_mass());
}

//! Empirical pmf from a histogram of counts
inline Pmf empirical_pmf(std::span<std::uint64_t const> counts,
                         double tol = default_truncation_tol)
{
    std::uint64_t const total
        = std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
    detail::require(total > 0, "empirical pmf needs at least one sample");
    std::vector<double> masses(counts.size());
    for (std::size_t k = 0; k < counts.size(); ++k)
    {
        masses[k] = double(counts[k]) / double(total);
    }
    return Pmf::from_computed(std::move(masses), 0, tol);
}

//---------------------------------------------------------------------------//
// STOCHASTIC DOMINANCE
//---------------------------------------------------------------------------//
/*!
 * Result of testing `lower` ⪯ `upper`.
 *
 * A not-dominates verdict carries a value x at which the CDF inequality
 * provably fails; an inconclusive verdict carries the largest CDF deficit
 * that could not be certified away (tails included).
 */
struct DominanceVerdict
{
    enum class Outcome
    {
        dominates,
        not_dominates,
        inconclusive
    };

    Outcome outcome = Outcome::inconclusive;
    std::size_t witness = 0;
    double slack = 0;

    bool is_dominates() const noexcept { return outcome == Outcome::dominates; }

    std::string to_string() const
    {
        switch (outcome)
        {
            case Outcome::dominates:
                return "dominates";
            case Outcome::not_dominates:
                return "not_dominates(" + std::to_string(witness) + ")";
            case Outcome::inconclusive:
            {
                std::ostringstream os;
                os << "inconclusive(" << slack << ")";
                return os.str();
            }
        }
        return "unknown";
    }
};

/*!
 * Decide whether `lower` is stochastically dominated by `upper`.
 *
 * Certification takes the worst case for each tail: the tail of `lower` is
 * placed at +infinity and the tail of `upper` just above its truncation
 * point. Refutation takes the best case (the reverse placement), so a
 * not-dominates witness holds whatever the tails hide.
 */
inline DominanceVerdict
dominates(Pmf const& lower, Pmf const& upper, double slack = dominance_slack)
{
    std::size_t const kl = lower.truncation_point();
    std::size_t const ku = upper.truncation_point();
    std::size_t const kmax = std::max(kl, ku);
    auto const ml = lower.masses();
    auto const mu = upper.masses();

    double sl = 0;
    double su = 0;
    double worst = 0;
    for (std::size_t x = 0; x <= kmax; ++x)
    {
        if (x <= kl)
        {
            sl += ml[x];
        }
        if (x <= ku)
        {
            su += mu[x];
        }
        // Exact partial sums
        double const lower_min = sl;
        double const upper_min = su;
        double const lower_max = x <= kl ? sl : sl + lower.tail_mass();
        double const upper_max = x <= ku ? su : su + upper.tail_mass();

        if (lower_max + slack < upper_min)
        {
            DominanceVerdict v;
            v.outcome = DominanceVerdict::Outcome::not_dominates;
            v.witness = x;
            v.slack = upper_min - lower_max;
            return v;
        }
        worst = std::max(worst, upper_max - lower_min);
    }
    // Beyond both truncation points, upper's CDF may already be 1 while
    // lower still misses its tail.
    worst = std::max(worst, 1 - sl);

    DominanceVerdict v;
    v.slack = worst;
    v.outcome = worst <= slack ? DominanceVerdict::Outcome::dominates
                               : DominanceVerdict::Outcome::inconclusive;
    return v;
}

//---------------------------------------------------------------------------//
// CONDITIONED POISSON
//---------------------------------------------------------------------------//
/*!
 * log r(k), the log likelihood ratio of Poi(rate2) to Poi(rate1), both
 * conditioned to be nonzero.
 */
inline double log_conditioned_ratio(double rate1, double rate2, std::size_t k)
{
    return std::log(-std::expm1(-rate1)) - std::log(-std::expm1(-rate2))
           + rate1 - rate2 + double(k) * (std::log(rate2) - std::log(rate1));
}

/*!
 * Whether r(k) is nondecreasing on k = 1..kmax (evaluated in log space).
 */
inline bool
likelihood_ratio_monotone(double rate1, double rate2, std::size_t kmax)
{
    detail::require(rate1 > 0 && rate2 > 0, "rates must be positive");
    detail::require(rate1 <= rate2, "likelihood ratio needs rate1 <= rate2");
    double prev = log_conditioned_ratio(rate1, rate2, 1);
    for (std::size_t k = 2; k <= kmax; ++k)
    {
        double const cur = log_conditioned_ratio(rate1, rate2, k);
        if (cur < prev - 1e-12 * std::max(1.0, std::abs(prev)))
        {
            return false;
        }
        prev = cur;
    }
    return true;
}

//! Sample Poi(rate) conditioned to be nonzero, by inversion
template<class Rng>
std::uint64_t sample_conditioned_nonzero(Rng& rng, double rate)
{
    double const u = rng.uniform();
    double p = rate * std::exp(-rate) / -std::expm1(-rate);
    double cdf = p;
    std::uint64_t k = 1;
    while (u >= cdf)
    {
        ++k;
        p *= rate / double(k);
        double const next = cdf + p;
        if (next == cdf)
        {
            break;
        }
        cdf = next;
    }
    return k;
}

/*!
 * Monte Carlo check of the split representation of a Poisson law.
 *
 * Samples Z = sum_{i=1}^M Zbar_i with M ~ Bin(n, 1 - e^{-rate/n}) and Zbar_i
 * i.i.d. Poi(rate/n) conditioned nonzero; returns the total-variation
 * distance between the empirical law of Z and Poi(rate). Sample i uses its
 * own counter stream, so the result does not depend on `threads`.
 */
inline double poisson_division_verify(double rate,
                                      std::uint64_t n,
                                      std::uint64_t samples,
                                      std::uint64_t seed,
                                      unsigned threads = 0)
{
    detail::require(std::isfinite(rate) && rate >= 0, "rate must be >= 0");
    detail::require(n >= 1, "n must be >= 1");
    detail::require(samples >= 1, "samples must be >= 1");

    double const piece = rate / double(n);
    double const p_nonzero = -std::expm1(-piece);
    constexpr std::int64_t chunk = 4096;
    auto const chunks = std::int64_t((samples + chunk - 1) / chunk);
    unsigned const workers = resolve_threads(threads);
    std::vector<std::vector<std::uint64_t>> hist(workers);

    parallel_for(chunks, workers, [&](unsigned w, std::int64_t c) {
        auto& h = hist[w];
        std::uint64_t const begin = std::uint64_t(c) * chunk;
        std::uint64_t const end = std::min<std::uint64_t>(samples, begin + chunk);
        for (std::uint64_t i = begin; i < end; ++i)
        {
            CounterStream rng(seed, StreamPurpose::poisson_division, i);
            std::uint64_t z = 0;
            if (piece > 0)
            {
                std::uint64_t const m = sample_binomial(rng, n, p_nonzero);
                for (std::uint64_t j = 0; j < m; ++j)
                {
                    z += sample_conditioned_nonzero(rng, piece);
                }
            }
            if (z >= h.size())
            {
                h.resize(z + 1, 0);
            }
            ++h[z];
        }
    });

    std::vector<std::uint64_t> counts;
    for (auto const& h : hist)
    {
        if (h.size() > counts.size())
        {
            counts.resize(h.size(), 0);
        }
        for (std::size_t k = 0; k < h.size(); ++k)
        {
            counts[k] += h[k];
        }
    }
    return total_variation(empirical_pmf(counts), poisson_pmf(rate));
}

//---------------------------------------------------------------------------//
}  // namespace frogtree
