//------------------------------- -*- C++ -*- -------------------------------//
// Copyright frogtree contributors
// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
//! \file frogtree/transience.hpp
//! Weight-function supermartingale for the subcritical regime.
//---------------------------------------------------------------------------//
#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "certificates.hpp"
#include "errors.hpp"
#include "tree_sim.hpp"

namespace frogtree
{
//---------------------------------------------------------------------------//
/*!
 * Weight W = sum_f e^{-theta |f|} and its one-step expansion factor m.
 */
struct WeightParams
{
    int d = 2;
    double eta_mean = 0;
    double theta = 0;
    double m = 0;

    bool subcritical() const noexcept { return m < 1; }
};

inline double m_of_theta(int d, double eta_mean, double theta)
{
    return std::exp(theta) / (d + 1)
           + d * (eta_mean + 1) * std::exp(-theta) / (d + 1);
}

inline WeightParams weight_params(int d, double eta_mean, double theta)
{
    detail::require(d >= 2, "d must be >= 2");
    detail::require(std::isfinite(eta_mean) && eta_mean >= 0,
                    "eta_mean must be >= 0");
    detail::require(theta > 0, "theta must be > 0");
    return {d, eta_mean, theta, m_of_theta(d, eta_mean, theta)};
}

//! Minimizer of m(theta): theta = ln((E eta + 1) d) / 2
inline WeightParams optimal_theta(int d, double eta_mean)
{
    detail::require(d >= 2, "d must be >= 2");
    detail::require(std::isfinite(eta_mean) && eta_mean >= 0,
                    "eta_mean must be >= 0");
    WeightParams p;
    p.d = d;
    p.eta_mean = eta_mean;
    p.theta = 0.5 * std::log((eta_mean + 1) * d);
    p.m = 2 * std::sqrt((eta_mean + 1) * d) / (d + 1);
    return p;
}

//! W at one step from the depths of the awake frogs
inline double weight_of_depths(std::span<int const> depths, double theta)
{
    double w = 0;
    for (int k : depths)
    {
        w += std::exp(-theta * k);
    }
    return w;
}

//! Weight sequence W_0..W_T recorded by a trial
inline std::vector<double> const& weight_trace(SimOutcome const& outcome)
{
    if (outcome.weight_trace.empty())
    {
        throw PreconditionError("outcome has no weight trace: run the "
                                "simulation with weight_theta set");
    }
    return outcome.weight_trace;
}

//---------------------------------------------------------------------------//
struct SupermartingaleOptions
{
    //! Absorbing depth; 0 picks the smallest D with e^{-theta D} <= 1e-8
    int depth_cap = 0;
    //! Normal quantile for the confidence band (99% two-sided)
    double z = 2.5758293035489004;
    //! Standard errors allowed in the pooled one-step check
    double step_z = 3;
    unsigned threads = 0;
    std::optional<std::chrono::steady_clock::time_point> deadline;
};

/*!
 * Statistical check that E[W_n] <= m^n.
 *
 * `band[n]` is z standard errors of the mean of W_n; the bound holds at n
 * when mean_w[n] <= m_pow[n] + band[n]. The step check compares the pooled
 * mean of W_{n+1} - m W_n with step_z standard errors.
 */
struct SupermartingaleReport
{
    WeightParams params;
    int horizon = 0;
    int depth_cap = 0;
    std::int64_t trials = 0;
    std::vector<double> mean_w;
    std::vector<double> m_pow;
    std::vector<double> band;
    bool bound_holds = true;
    int worst_step = 0;
    double worst_excess = 0;

    std::vector<double> step_mean;
    std::vector<double> step_se;
    bool step_bound_holds = true;

    //! visit_after[n]: fraction of trials with a root visit at a step > n
    std::vector<double> visit_after;
    bool visits_decay = true;

    //! Mean of e^{-theta D} * absorbed_at_cap over trials
    double absorbed_weight = 0;
    //! absorbed_weight below 1% of m^T
    bool absorbed_negligible = true;
    bool timed_out = false;

    bool passed() const noexcept
    {
        return bound_holds && step_bound_holds && visits_decay
               && absorbed_negligible && !timed_out;
    }
};

inline int default_weight_depth_cap(int d, double theta)
{
    int cap = int(std::ceil(std::log(1e8) / theta)) + 1;
    // Keep heap indices within 63 bits
    long double reach = 1;
    int limit = 0;
    while (reach * d * d < 9.2e18L)
    {
        reach *= d;
        ++limit;
    }
    return std::clamp(cap, 2, limit);
}

/*!
 * Run simple-walk trials with the given frog law and check the weight bound.
 */
inline SupermartingaleReport supermartingale_check(SimConfig config,
                                                   SupermartingaleOptions const& opts
                                                   = {})
{
    double const eta_mean = config.frog_law.mean();
    auto const params = optimal_theta(config.d, eta_mean);
    if (!params.subcritical())
    {
        throw PreconditionError(
            "supercritical configuration: m = " + std::to_string(params.m)
            + " >= 1 (mean frog count must be below "
            + std::to_string(transience_threshold(config.d)) + ")");
    }
    detail::require(config.horizon >= 0, "horizon must be >= 0");
    detail::require(config.trials >= 1, "trials must be >= 1");

    SupermartingaleReport rep;
    rep.params = params;
    rep.horizon = config.horizon;
    rep.trials = config.trials;
    if (config.horizon == 0)
    {
        rep.mean_w = {1.0};
        rep.m_pow = {1.0};
        rep.band = {0.0};
        rep.visit_after = {0.0};
        return rep;
    }

    config.variant = WalkVariant::simple;
    config.weight_theta = params.theta;
    config.record_visit_times = true;
    config.depth_cap = opts.depth_cap > 0
                           ? opts.depth_cap
                           : default_weight_depth_cap(config.d, params.theta);
    config.threads = opts.threads;
    rep.depth_cap = config.depth_cap;

    BatchOptions bopts;
    bopts.deadline = opts.deadline;
    auto const batch = run_batch(config, bopts);
    rep.timed_out = batch.timed_out;
    auto const n_trials = double(batch.trials_completed);
    detail::require(n_trials >= 2, "supermartingale_check needs >= 2 completed trials");

    auto const steps = std::size_t(config.horizon) + 1;
    std::vector<double> sum(steps, 0.0), sum_sq(steps, 0.0);
    std::vector<double> dsum(steps - 1, 0.0), dsum_sq(steps - 1, 0.0);
    std::vector<double> visits_after(steps, 0.0);
    double absorbed = 0;
    double const cap_weight = std::exp(-params.theta * config.depth_cap);
    for (auto const& o : batch.outcomes)
    {
        auto const& w = o.weight_trace;
        for (std::size_t n = 0; n < steps; ++n)
        {
            sum[n] += w[n];
            sum_sq[n] += w[n] * w[n];
        }
        for (std::size_t n = 0; n + 1 < steps; ++n)
        {
            double const diff = w[n + 1] - params.m * w[n];
            dsum[n] += diff;
            dsum_sq[n] += diff * diff;
        }
        if (!o.root_visit_times.empty())
        {
            auto const last = std::size_t(o.root_visit_times.back());
            for (std::size_t n = 0; n < std::min(last, steps); ++n)
            {
                visits_after[n] += 1;
            }
        }
        absorbed += cap_weight * double(o.absorbed_at_cap);
    }

    auto se_of = [n_trials](double s, double s2) {
        double const mean = s / n_trials;
        double const var = std::max(0.0, (s2 - n_trials * mean * mean)
                                             / (n_trials - 1));
        return std::sqrt(var / n_trials);
    };

    rep.mean_w.resize(steps);
    rep.m_pow.resize(steps);
    rep.band.resize(steps);
    rep.visit_after.resize(steps);
    rep.worst_excess = -1;
    for (std::size_t n = 0; n < steps; ++n)
    {
        rep.mean_w[n] = sum[n] / n_trials;
        rep.m_pow[n] = std::pow(params.m, double(n));
        rep.band[n] = opts.z * se_of(sum[n], sum_sq[n]);
        double const excess = rep.mean_w[n] - rep.m_pow[n] - rep.band[n];
        if (excess > 0)
        {
            rep.bound_holds = false;
        }
        double const rel = (rep.mean_w[n] - rep.m_pow[n]) / rep.m_pow[n];
        if (n == 0 || rel > rep.worst_excess)
        {
            rep.worst_excess = rel;
            rep.worst_step = int(n);
        }
        rep.visit_after[n] = visits_after[n] / n_trials;
        if (n > 0 && rep.visit_after[n] > rep.visit_after[n - 1])
        {
            rep.visits_decay = false;
        }
    }
    if (rep.visit_after.front() > 0
        && !(rep.visit_after.back() < rep.visit_after.front()))
    {
        rep.visits_decay = false;
    }

    rep.step_mean.resize(steps - 1);
    rep.step_se.resize(steps - 1);
    for (std::size_t n = 0; n + 1 < steps; ++n)
    {
        rep.step_mean[n] = dsum[n] / n_trials;
        rep.step_se[n] = se_of(dsum[n], dsum_sq[n]);
        if (rep.step_mean[n] > opts.step_z * rep.step_se[n])
        {
            rep.step_bound_holds = false;
        }
    }

    rep.absorbed_weight = absorbed / n_trials;
    rep.absorbed_negligible = rep.absorbed_weight < 0.01 * rep.m_pow.back();
    return rep;
}

//! Poisson sleepers with mean mu
inline SupermartingaleReport supermartingale_check(int d,
                                                   double mu,
                                                   std::int64_t trials,
                                                   int horizon,
                                                   std::uint64_t seed,
                                                   SupermartingaleOptions const& opts
                                                   = {})
{
    SimConfig c;
    c.d = d;
    c.frog_law = FrogLaw::poisson(mu);
    c.trials = trials;
    c.horizon = horizon;
    c.seed = seed;
    return supermartingale_check(std::move(c), opts);
}

//---------------------------------------------------------------------------//
}  // namespace frogtree
