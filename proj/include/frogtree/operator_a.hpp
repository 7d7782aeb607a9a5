//------------------------------- -*- C++ -*- -------------------------------//
// Copyright frogtree contributors
// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
//! \file frogtree/operator_a.hpp
//! The two-wave star-graph operator on root-visit laws.
//---------------------------------------------------------------------------//
#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "errors.hpp"
#include "parallel.hpp"
#include "pmf.hpp"
#include "random.hpp"

namespace frogtree
{
//---------------------------------------------------------------------------//
/*!
 * Tree arity and sleeping-frog density of the star system.
 *
 * The star has a centre (the first child of the root) joined to the root and
 * to d further leaves v_1..v_d. The centre holds Poi(mu) particles; v_1 holds
 * a pi-distributed batch that moves in the first wave.
 */
struct StarParams
{
    int d = 2;
    double mu = 0;
    double tol = default_truncation_tol;

    void validate() const
    {
        detail::require(d >= 2, "star arity d must be >= 2");
        detail::require(std::isfinite(mu) && mu >= 0, "mu must be >= 0");
        detail::require(tol > 0 && tol < 1, "tol must lie in (0, 1)");
    }

    //! Mean number of centre particles sent to each neighbour
    double centre_share() const noexcept { return mu / (d + 1); }
};

//! Iterates may not grow beyond this many explicit values
inline constexpr std::size_t iterate_support_cap = 4096;
//! Accumulated tail mass allowed across an iteration run
inline constexpr double iterate_tail_budget = 1e-8;

//---------------------------------------------------------------------------//
/*!
 * Poisson-mixture form of the operator applied to Poi(lambda).
 *
 * The image is Poi(rates[U]) with U ~ Bin(d - 1, u_prob).
 */
struct MixtureRep
{
    double lambda = 0;
    double u_prob = 0;
    std::vector<double> rates;
};

inline MixtureRep mixture_rep(double lambda, StarParams const& params)
{
    params.validate();
    detail::require(std::isfinite(lambda) && lambda >= 0, "lambda must be >= 0");
    int const d = params.d;
    MixtureRep rep;
    rep.lambda = lambda;
    rep.u_prob = -std::expm1(-lambda / d - params.centre_share());
    rep.rates.resize(d);
    for (int u = 0; u < d; ++u)
    {
        rep.rates[u] = (u + 1) * lambda / d + params.centre_share();
    }
    return rep;
}

/*!
 * Image of Poi(lambda) via the closed-form Poisson mixture.
 */
inline Pmf apply_poisson(double lambda, StarParams const& params)
{
    MixtureRep const rep = mixture_rep(lambda, params);
    Pmf const weights = binomial_pmf(params.d - 1, rep.u_prob);
    std::vector<double> w;
    std::vector<Pmf> components;
    for (std::size_t u = 0; u < rep.rates.size(); ++u)
    {
        if (weights.mass(u) > 0)
        {
            w.push_back(weights.mass(u));
            components.push_back(poisson_pmf(rep.rates[u], params.tol));
        }
    }
    return mixture(w, components);
}

//---------------------------------------------------------------------------//
/*!
 * Occupancy laws for balls = 0..max_balls thrown into `boxes` boxes.
 *
 * Row n is the law of the number of occupied boxes after n uniform,
 * independent throws. Computed by the forward recurrence
 * P_{n+1}(t) = P_n(t) t/b + P_n(t-1) (b-t+1)/b, which is the probability
 * form of the Stirling recurrence and involves only positive terms.
 */
inline std::vector<std::vector<double>>
occupancy_table(std::size_t max_balls, std::size_t boxes)
{
    detail::require(boxes >= 1, "occupancy needs at least one box");
    std::vector<std::vector<double>> rows(max_balls + 1);
    std::vector<double> cur(boxes + 1, 0.0);
    cur[0] = 1;
    double const b = double(boxes);
    for (std::size_t n = 0; n <= max_balls; ++n)
    {
        rows[n] = cur;
        std::vector<double> next(boxes + 1, 0.0);
        for (std::size_t t = 0; t <= boxes; ++t)
        {
            if (cur[t] == 0)
            {
                continue;
            }
            next[t] += cur[t] * (double(t) / b);
            if (t < boxes)
            {
                next[t + 1] += cur[t] * (double(boxes - t) / b);
            }
        }
        cur = std::move(next);
    }
    return rows;
}

//! Law of the number of occupied boxes
inline Pmf occupancy_pmf(std::size_t balls, std::size_t boxes)
{
    auto rows = occupancy_table(balls, boxes);
    return Pmf::from_computed(std::move(rows[balls]), 0, default_truncation_tol);
}

//---------------------------------------------------------------------------//
/*!
 * Exact image of an arbitrary law pi under the star-system operator.
 *
 * Contributions to the root:
 *  - Poi(mu/(d+1)) centre particles, independent of everything else;
 *  - j of the X_1 ~ pi particles from v_1, jointly with the number t of
 *    v_2..v_d they occupy (occupancy of the remaining X_1 - j particles);
 *  - given t, U = t + Bin(d-1-t, 1-e^{-mu/(d+1)}) hit leaves, each releasing
 *    a fresh pi batch of which Bin(pi, 1/d) reach the root.
 *
 * The tail of pi is charged to the output tail.
 */
inline Pmf apply_general(Pmf const& pi, StarParams const& params)
{
    params.validate();
    int const d = params.d;
    std::size_t const others = std::size_t(d - 1);
    std::size_t const kmax = pi.truncation_point();
    auto const in = pi.masses();
    double const hit_by_centre = -std::expm1(-params.centre_share());

    auto const occ = occupancy_table(kmax, others);
    auto const lf = detail::log_factorials(kmax);
    double const lp = std::log(1.0 / d);
    double const lq = std::log1p(-1.0 / d);

    std::vector<Pmf> extra_hits;
    for (std::size_t t = 0; t <= others; ++t)
    {
        extra_hits.push_back(binomial_pmf(others - t, hit_by_centre));
    }

    // joint[u][j]: P[U = u, j first-wave v_1 particles reach the root]
    std::vector<std::vector<double>> joint(others + 1,
                                           std::vector<double>(kmax + 1, 0.0));
    for (std::size_t k = 0; k <= kmax; ++k)
    {
        if (in[k] == 0)
        {
            continue;
        }
        for (std::size_t j = 0; j <= k; ++j)
        {
            double const to_root
                = in[k]
                  * std::exp(lf[k] - lf[j] - lf[k - j] + double(j) * lp
                             + double(k - j) * lq);
            if (to_root == 0)
            {
                continue;
            }
            auto const& occ_row = occ[k - j];
            for (std::size_t t = 0; t <= others; ++t)
            {
                double const w = to_root * occ_row[t];
                if (w == 0)
                {
                    continue;
                }
                auto const extra = extra_hits[t].masses();
                for (std::size_t e = 0; e < extra.size(); ++e)
                {
                    joint[t + e][j] += w * extra[e];
                }
            }
        }
    }

    Pmf const batch = thin(pi, 1.0 / d);
    Pmf batch_power = Pmf::point_mass(0, pi.tol());
    std::vector<double> total;
    double tail = pi.tail_mass();
    for (std::size_t u = 0; u <= others; ++u)
    {
        if (u > 0)
        {
            batch_power = convolve(batch_power, batch);
        }
        double weight = 0;
        for (double x : joint[u])
        {
            weight += x;
        }
        if (weight == 0)
        {
            continue;
        }
        auto const bp = batch_power.masses();
        if (total.size() < kmax + bp.size())
        {
            total.resize(kmax + bp.size(), 0.0);
        }
        for (std::size_t j = 0; j <= kmax; ++j)
        {
            double const x = joint[u][j];
            if (x == 0)
            {
                continue;
            }
            for (std::size_t s = 0; s < bp.size(); ++s)
            {
                total[j + s] += x * bp[s];
            }
        }
        tail += weight * batch_power.tail_mass();
    }
    if (total.empty())
    {
        total.push_back(0);
    }
    Pmf const waves = Pmf::from_computed(std::move(total), tail, pi.tol());
    Pmf const centre = poisson_pmf(params.centre_share(), params.tol);
    return truncate_tail(convolve(waves, centre), params.tol);
}

//---------------------------------------------------------------------------//
/*!
 * Iterates nu_k = A nu_{k-1}, nu_0 = delta_0, for k = 1..n.
 *
 * Throws TruncationError naming the iteration when the support cap or the
 * accumulated tail budget is exceeded.
 */
inline std::vector<Pmf> iterate(StarParams const& params, std::size_t n)
{
    params.validate();
    detail::require(n >= 1, "iteration count must be >= 1");
    std::vector<Pmf> out;
    out.reserve(n);
    Pmf cur = Pmf::point_mass(0, params.tol);
    for (std::size_t k = 1; k <= n; ++k)
    {
        cur = apply_general(cur, params);
        if (cur.truncation_point() + 1 > iterate_support_cap)
        {
            throw TruncationError(k, "support exceeds cap of "
                                         + std::to_string(iterate_support_cap));
        }
        if (cur.tail_mass() > iterate_tail_budget)
        {
            throw TruncationError(k, "accumulated tail mass exceeds budget");
        }
        out.push_back(cur);
    }
    return out;
}

/*!
 * Check Poi(k epsilon) ⪯ nu_k for k = 1..n.
 */
inline std::vector<DominanceVerdict>
verify_bootstrap(StarParams const& params, double epsilon, std::size_t n)
{
    detail::require(epsilon > 0, "epsilon must be > 0");
    auto const iterates = iterate(params, n);
    std::vector<DominanceVerdict> verdicts;
    verdicts.reserve(n);
    for (std::size_t k = 1; k <= n; ++k)
    {
        verdicts.push_back(
            dominates(poisson_pmf(double(k) * epsilon), iterates[k - 1]));
    }
    return verdicts;
}

/*!
 * Whether A p1 ⪯ A p2 is certified, given a certified p1 ⪯ p2.
 */
inline bool
verify_monotonicity(Pmf const& p1, Pmf const& p2, StarParams const& params)
{
    if (!dominates(p1, p2).is_dominates())
    {
        throw PreconditionError(
            "verify_monotonicity requires p1 to be certified below p2");
    }
    return dominates(apply_general(p1, params), apply_general(p2, params))
        .is_dominates();
}

//---------------------------------------------------------------------------//
// MONTE CARLO
//---------------------------------------------------------------------------//
namespace detail
{
//! Inverse-CDF sampler over the explicit part of a pmf
class PmfSampler
{
  public:
    explicit PmfSampler(Pmf const& pi)
    {
        double s = 0;
        for (double m : pi.masses())
        {
            s += m;
            cdf_.push_back(s);
        }
    }

    //! Values falling in the tail map to K + 1
    template<class Rng>
    std::uint64_t operator()(Rng& rng) const
    {
        double const u = rng.uniform();
        auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
        return std::uint64_t(it - cdf_.begin());
    }

  private:
    std::vector<double> cdf_;
};
}  // namespace detail

/*!
 * Simulate the star system literally and return the empirical root law.
 *
 * Trial i draws from its own counter stream, so results do not depend on
 * the number of threads.
 */
inline Pmf mc_star_system(Pmf const& pi,
                          StarParams const& params,
                          std::uint64_t trials,
                          std::uint64_t seed,
                          unsigned threads = 0)
{
    params.validate();
    detail::require(trials >= 1, "trials must be >= 1");
    int const d = params.d;
    detail::PmfSampler const sample_pi(pi);
    constexpr std::int64_t chunk = 4096;
    auto const chunks = std::int64_t((trials + chunk - 1) / chunk);
    unsigned const workers = resolve_threads(threads);
    std::vector<std::vector<std::uint64_t>> hist(workers);
    std::vector<std::vector<char>> hit_scratch(workers,
                                               std::vector<char>(d + 1, 0));

    parallel_for(chunks, workers, [&](unsigned w, std::int64_t c) {
        auto& h = hist[w];
        auto& hit = hit_scratch[w];
        std::uint64_t const begin = std::uint64_t(c) * chunk;
        std::uint64_t const end = std::min<std::uint64_t>(trials, begin + chunk);
        for (std::uint64_t i = begin; i < end; ++i)
        {
            CounterStream rng(seed, StreamPurpose::star_system, i);
            std::fill(hit.begin(), hit.end(), 0);
            std::uint64_t at_root = 0;

            // Centre particles: destination 0 is the root, 1..d are v_1..v_d
            std::uint64_t const centre = sample_poisson(rng, params.mu);
            for (std::uint64_t p = 0; p < centre; ++p)
            {
                std::uint32_t const dest = rng.below(std::uint32_t(d + 1));
                if (dest == 0)
                {
                    ++at_root;
                }
                else
                {
                    hit[dest] = 1;
                }
            }
            // v_1 particles: destination 0 is the root, i = 1..d-1 is v_{i+1}
            std::uint64_t const first = sample_pi(rng);
            for (std::uint64_t p = 0; p < first; ++p)
            {
                std::uint32_t const dest = rng.below(std::uint32_t(d));
                if (dest == 0)
                {
                    ++at_root;
                }
                else
                {
                    hit[dest + 1] = 1;
                }
            }
            // Second wave from hit v_2..v_d with fresh batches
            for (int v = 2; v <= d; ++v)
            {
                if (!hit[v])
                {
                    continue;
                }
                std::uint64_t const batch = sample_pi(rng);
                at_root += sample_binomial(rng, batch, 1.0 / d);
            }

            if (at_root >= h.size())
            {
                h.resize(at_root + 1, 0);
            }
            ++h[at_root];
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
    return empirical_pmf(counts);
}

//---------------------------------------------------------------------------//
}  // namespace frogtree
