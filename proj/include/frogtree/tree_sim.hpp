//------------------------------- -*- C++ -*- -------------------------------//
// Copyright frogtree contributors
// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
//! \file frogtree/tree_sim.hpp
//! Monte Carlo engine for the frog model on d-ary trees.
//---------------------------------------------------------------------------//
#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <absl/container/flat_hash_set.h>

#include "errors.hpp"
#include "parallel.hpp"
#include "pmf.hpp"
#include "random.hpp"

namespace frogtree
{
//---------------------------------------------------------------------------//
// VERTICES
//---------------------------------------------------------------------------//
/*!
 * Vertex of the d-ary tree as the sequence of child indices from the root.
 *
 * Internally vertices are addressed by their breadth-first (heap) index:
 * the root is 0 and child c of v is v*d + 1 + c.
 */
class VertexPath
{
  public:
    VertexPath() = default;
    explicit VertexPath(std::vector<int> children)
        : children_(std::move(children))
    {
    }

    std::vector<int> const& children() const noexcept { return children_; }
    std::size_t depth() const noexcept { return children_.size(); }
    bool is_root() const noexcept { return children_.empty(); }

    VertexPath parent() const
    {
        detail::require(!is_root(), "the root has no parent");
        return VertexPath(
            std::vector<int>(children_.begin(), children_.end() - 1));
    }

    VertexPath child(int c) const
    {
        auto next = children_;
        next.push_back(c);
        return VertexPath(std::move(next));
    }

    std::uint64_t index(int d) const
    {
        std::uint64_t v = 0;
        for (int c : children_)
        {
            detail::require(c >= 0 && c < d, "child index out of range");
            v = v * std::uint64_t(d) + 1 + std::uint64_t(c);
        }
        return v;
    }

    static VertexPath from_index(std::uint64_t v, int d)
    {
        std::vector<int> rev;
        while (v != 0)
        {
            rev.push_back(int((v - 1) % std::uint64_t(d)));
            v = (v - 1) / std::uint64_t(d);
        }
        return VertexPath(std::vector<int>(rev.rbegin(), rev.rend()));
    }

    friend bool operator==(VertexPath const&, VertexPath const&) = default;

  private:
    std::vector<int> children_;
};

//---------------------------------------------------------------------------//
// CONFIGURATION
//---------------------------------------------------------------------------//
enum class WalkVariant
{
    simple,
    nonbacktracking
};

inline char const* to_string(WalkVariant v)
{
    return v == WalkVariant::simple ? "simple" : "nonbacktracking";
}

inline WalkVariant parse_walk_variant(std::string const& s)
{
    if (s == "simple")
    {
        return WalkVariant::simple;
    }
    if (s == "nonbacktracking")
    {
        return WalkVariant::nonbacktracking;
    }
    throw PreconditionError("variant must be 'simple' or 'nonbacktracking', got '"
                            + s + "'");
}

//---------------------------------------------------------------------------//
/*!
 * Law of the number of frogs sleeping at each non-root vertex.
 *
 * Counts are drawn by inverting the CDF at a per-vertex uniform, so laws
 * that are stochastically ordered give pointwise ordered configurations
 * under a shared seed.
 */
class FrogLaw
{
  public:
    enum class Kind
    {
        poisson,
        fixed,
        custom
    };

    static FrogLaw poisson(double mu)
    {
        detail::require(std::isfinite(mu) && mu >= 0, "frog density mu must be >= 0");
        FrogLaw law(Kind::poisson);
        law.param_ = mu;
        if (mu > 0)
        {
            // Accumulate until the CDF saturates in double precision
            double p = std::exp(-mu);
            double cdf = p;
            law.cdf_.push_back(cdf);
            for (std::uint32_t k = 1; cdf < 1 && k < 100000; ++k)
            {
                p *= mu / k;
                double const next = cdf + p;
                if (next == cdf && p < 1e-300)
                {
                    break;
                }
                cdf = next;
                law.cdf_.push_back(cdf);
            }
        }
        else
        {
            law.cdf_.push_back(1.0);
        }
        return law;
    }

    static FrogLaw fixed(std::uint32_t count)
    {
        FrogLaw law(Kind::fixed);
        law.param_ = count;
        law.cdf_.assign(count + 1, 0.0);
        law.cdf_.back() = 1.0;
        return law;
    }

    static FrogLaw custom(Pmf const& pmf)
    {
        FrogLaw law(Kind::custom);
        law.param_ = pmf.mean();
        double s = 0;
        for (double m : pmf.masses())
        {
            s += m;
            law.cdf_.push_back(s);
        }
        return law;
    }

    Kind kind() const noexcept { return kind_; }

    //! Mean number of sleeping frogs per vertex
    double mean() const noexcept { return param_; }

    //! Smallest k with CDF(k) > u
    std::uint32_t quantile(double u) const noexcept
    {
        auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
        if (it == cdf_.end())
        {
            return std::uint32_t(cdf_.size() - 1);
        }
        return std::uint32_t(it - cdf_.begin());
    }

    std::string describe() const
    {
        switch (kind_)
        {
            case Kind::poisson:
                return "poisson(" + std::to_string(param_) + ")";
            case Kind::fixed:
                return "fixed(" + std::to_string(std::uint32_t(param_)) + ")";
            case Kind::custom:
                return "custom(mean=" + std::to_string(param_) + ")";
        }
        return "unknown";
    }

  private:
    explicit FrogLaw(Kind k) : kind_(k) {}

    Kind kind_;
    double param_ = 0;
    std::vector<double> cdf_;
};

//---------------------------------------------------------------------------//
/*!
 * Parameters of a batch of frog-model trials on the infinite tree.
 *
 * Frogs that step to depth `depth_cap` are removed and counted as absorbed.
 */
struct SimConfig
{
    int d = 2;
    FrogLaw frog_law = FrogLaw::poisson(1.0);
    WalkVariant variant = WalkVariant::simple;
    int horizon = 100;
    int depth_cap = 20;
    std::int64_t trials = 1000;
    std::uint64_t seed = 1;
    //! Record W_n = sum_f e^{-theta |f|} when set
    std::optional<double> weight_theta;
    bool record_visit_times = true;
    //! Track walk-rule violations and the visited vertex list (slow)
    bool check_invariants = false;
    unsigned threads = 0;

    void validate() const
    {
        detail::require(d >= 2 && d <= 250, "d must lie in [2, 250]");
        detail::require(horizon >= 1, "horizon must be >= 1");
        detail::require(depth_cap >= 2, "depth_cap must be >= 2");
        detail::require(trials >= 1, "trials must be >= 1");
        // Heap indices of depth_cap-level vertices must fit in 63 bits
        long double reach = 1;
        for (int i = 0; i <= depth_cap; ++i)
        {
            reach *= d;
        }
        detail::require(reach < 9.2e18L,
                        "depth_cap too large for d: vertex indices overflow "
                        "64 bits");
        if (weight_theta)
        {
            detail::require(*weight_theta > 0, "weight theta must be > 0");
        }
    }
};

//! Measured results of one trial
struct SimOutcome
{
    std::int64_t trial = 0;
    std::int64_t root_visits = 0;
    std::vector<std::int32_t> root_visit_times;
    std::int64_t frogs_woken = 0;
    std::int64_t absorbed_at_cap = 0;
    //! W_0..W_T when weights are enabled
    std::vector<double> weight_trace;
    std::int64_t vertices_visited = 0;
    std::int64_t max_active = 0;
    int root_children_visited = 0;
    //! Only populated with check_invariants
    std::int64_t invariant_violations = 0;
    std::vector<std::uint64_t> visited_vertices;
};

//! Number of sleeping frogs at vertex `v` in trial `trial`
inline std::uint32_t sleepers_at(SimConfig const& config,
                                 std::int64_t trial,
                                 std::uint64_t v)
{
    auto const bits = counter_draw(
        config.seed, StreamPurpose::sleepers, std::uint64_t(trial), v);
    return config.frog_law.quantile(to_unit_double(bits[0], bits[1]));
}

namespace detail
{
//---------------------------------------------------------------------------//
/*!
 * Set of visited vertices: a bitset over all vertices above the depth cap
 * when that fits in 256 MiB, a hash set otherwise.
 */
class VisitedSet
{
  public:
    static constexpr std::uint64_t dense_limit = std::uint64_t(1) << 31;

    VisitedSet(int d, int depth_cap)
    {
        // Vertices at depth < depth_cap: (d^cap - 1) / (d - 1)
        long double count = 0;
        long double level = 1;
        for (int k = 0; k < depth_cap; ++k)
        {
            count += level;
            level *= d;
            if (count > dense_limit)
            {
                break;
            }
        }
        if (count <= dense_limit)
        {
            words_.assign(std::size_t((std::uint64_t(count) + 63) / 64), 0);
            dense_ = true;
        }
    }

    bool dense() const noexcept { return dense_; }

    //! Insert; true if the vertex was not present
    bool insert(std::uint64_t v)
    {
        ++size_;
        if (dense_)
        {
            std::uint64_t& w = words_[v >> 6];
            std::uint64_t const bit = std::uint64_t(1) << (v & 63);
            if (w & bit)
            {
                --size_;
                return false;
            }
            if (w == 0)
            {
                touched_.push_back(std::uint32_t(v >> 6));
            }
            w |= bit;
            return true;
        }
        bool const inserted = sparse_.insert(v).second;
        if (!inserted)
        {
            --size_;
        }
        return inserted;
    }

    std::int64_t size() const noexcept { return size_; }

    std::vector<std::uint64_t> sorted_members() const
    {
        std::vector<std::uint64_t> out;
        if (dense_)
        {
            for (auto wi : touched_)
            {
                std::uint64_t w = words_[wi];
                while (w)
                {
                    int const b = __builtin_ctzll(w);
                    out.push_back(std::uint64_t(wi) * 64 + std::uint64_t(b));
                    w &= w - 1;
                }
            }
        }
        else
        {
            out.assign(sparse_.begin(), sparse_.end());
        }
        std::sort(out.begin(), out.end());
        return out;
    }

    void clear()
    {
        if (dense_)
        {
            if (touched_.size() * 8 > words_.size())
            {
                std::fill(words_.begin(), words_.end(), 0);
            }
            else
            {
                for (auto wi : touched_)
                {
                    words_[wi] = 0;
                }
            }
            touched_.clear();
        }
        else
        {
            sparse_.clear();
        }
        size_ = 0;
    }

  private:
    bool dense_ = false;
    std::vector<std::uint64_t> words_;
    std::vector<std::uint32_t> touched_;
    absl::flat_hash_set<std::uint64_t> sparse_;
    std::int64_t size_ = 0;
};

//! Awake frog; `from` is 0 (fresh), 1 (arrived from parent) or 2 + c
//! (arrived from child c)
struct Frog
{
    std::uint64_t vertex;
    std::uint16_t depth;
    std::uint8_t from;
    std::uint8_t descended;
};
}  // namespace detail

//---------------------------------------------------------------------------//
/*!
 * Reusable per-worker state for running trials of one configuration.
 *
 * Dynamics per step: every awake frog moves once (simple: uniform neighbour;
 * nonbacktracking: uniform over neighbours other than the one it came from,
 * halting on arrival at the root). A frog arriving at an unvisited vertex
 * wakes its sleepers, who start moving on the next step. Root visits are
 * counted per frog arrival at steps >= 1.
 */
class TrialRunner
{
  public:
    explicit TrialRunner(SimConfig config)
        : config_(std::move(config)), visited_(config_.d, config_.depth_cap)
    {
        config_.validate();
        if (config_.weight_theta)
        {
            weight_by_depth_.resize(config_.depth_cap + 1);
            for (int k = 0; k <= config_.depth_cap; ++k)
            {
                weight_by_depth_[k] = std::exp(-*config_.weight_theta * k);
            }
        }
        root_child_seen_.assign(config_.d, 0);
    }

    SimConfig const& config() const noexcept { return config_; }

    SimOutcome run(std::int64_t trial)
    {
        int const d = config_.d;
        auto const ud = std::uint64_t(d);
        int const cap = config_.depth_cap;
        bool const nonbacktracking = config_.variant
                                     == WalkVariant::nonbacktracking;
        bool const weights = config_.weight_theta.has_value();
        bool const check = config_.check_invariants;

        SimOutcome out;
        out.trial = trial;
        visited_.clear();
        visited_.insert(0);
        std::fill(root_child_seen_.begin(), root_child_seen_.end(), 0);
        frogs_.clear();
        frogs_.push_back({0, 0, 0, 0});
        if (weights)
        {
            out.weight_trace.assign(std::size_t(config_.horizon) + 1, 0.0);
            out.weight_trace[0] = 1.0;
        }
        out.max_active = 1;

        CounterStream rng(config_.seed, StreamPurpose::walk, std::uint64_t(trial));

        for (int t = 1; t <= config_.horizon && !frogs_.empty(); ++t)
        {
            born_.clear();
            std::size_t keep = 0;
            for (std::size_t i = 0, n = frogs_.size(); i < n; ++i)
            {
                detail::Frog f = frogs_[i];
                std::uint32_t r;
                if (f.depth == 0)
                {
                    r = rng.below(std::uint32_t(d));
                }
                else if (nonbacktracking && f.from != 0)
                {
                    std::uint32_t const excluded = f.from == 1 ? std::uint32_t(d)
                                                               : f.from - 2u;
                    r = rng.below(std::uint32_t(d));
                    if (r >= excluded)
                    {
                        ++r;
                    }
                }
                else
                {
                    r = rng.below(std::uint32_t(d + 1));
                }

                if (f.depth > 0 && r == std::uint32_t(d))
                {
                    // Toward the root
                    if (check && nonbacktracking
                        && (f.descended || f.from == 1))
                    {
                        ++out.invariant_violations;
                    }
                    std::uint64_t const c = (f.vertex - 1) % ud;
                    f.vertex = (f.vertex - 1) / ud;
                    f.from = std::uint8_t(2 + c);
                    --f.depth;
                }
                else
                {
                    if (check && nonbacktracking && f.from >= 2
                        && f.from - 2u == r)
                    {
                        ++out.invariant_violations;
                    }
                    f.vertex = f.vertex * ud + 1 + r;
                    f.from = 1;
                    f.descended = 1;
                    ++f.depth;
                }

                if (f.depth == 0)
                {
                    ++out.root_visits;
                    if (config_.record_visit_times)
                    {
                        out.root_visit_times.push_back(t);
                    }
                    if (nonbacktracking)
                    {
                        continue;
                    }
                }
                else if (f.depth >= cap)
                {
                    ++out.absorbed_at_cap;
                    continue;
                }
                else if (visited_.insert(f.vertex))
                {
                    if (f.depth == 1)
                    {
                        root_child_seen_[f.vertex - 1] = 1;
                    }
                    std::uint32_t const k = sleepers_at(config_, trial, f.vertex);
                    out.frogs_woken += k;
                    for (std::uint32_t j = 0; j < k; ++j)
                    {
                        born_.push_back({f.vertex, f.depth, 0, 0});
                    }
                }
                frogs_[keep++] = f;
            }
            frogs_.resize(keep);
            frogs_.insert(frogs_.end(), born_.begin(), born_.end());
            out.max_active = std::max<std::int64_t>(out.max_active,
                                                    std::int64_t(frogs_.size()));
            if (weights)
            {
                double w = 0;
                for (auto const& f : frogs_)
                {
                    w += weight_by_depth_[f.depth];
                }
                out.weight_trace[std::size_t(t)] = w;
            }
        }

        out.vertices_visited = visited_.size();
        out.root_children_visited = int(std::count(
            root_child_seen_.begin(), root_child_seen_.end(), char(1)));
        if (check)
        {
            out.visited_vertices = visited_.sorted_members();
        }
        return out;
    }

  private:
    SimConfig config_;
    detail::VisitedSet visited_;
    std::vector<detail::Frog> frogs_;
    std::vector<detail::Frog> born_;
    std::vector<double> weight_by_depth_;
    std::vector<char> root_child_seen_;
};

//! One trial of the frog model
inline SimOutcome run_trial(SimConfig const& config, std::int64_t trial_index)
{
    TrialRunner runner(config);
    return runner.run(trial_index);
}

//---------------------------------------------------------------------------//
// BATCHES
//---------------------------------------------------------------------------//
//! Aggregate statistics of a batch of trials
struct BatchSummary
{
    std::int64_t trials_requested = 0;
    std::int64_t trials_completed = 0;
    //! Set when a deadline stopped the batch early
    bool timed_out = false;
    double mean_visits = 0;
    double var_visits = 0;
    double stderr_visits = 0;
    double mean_woken = 0;
    double mean_absorbed = 0;
    //! visit_histogram[k] = number of trials with k root visits
    std::vector<std::uint64_t> visit_histogram;
    //! Per-trial outcomes in trial order (if kept)
    std::vector<SimOutcome> outcomes;
    double seconds = 0;

    Pmf visit_pmf() const { return empirical_pmf(visit_histogram); }
};

struct BatchOptions
{
    bool keep_outcomes = true;
    std::optional<std::chrono::steady_clock::time_point> deadline;
};

/*!
 * Run `config.trials` independent trials.
 *
 * Without a deadline the result depends only on the configuration, not on
 * the thread count. With a deadline, trials not started before it are
 * skipped and the summary covers the completed ones.
 */
inline BatchSummary run_batch(SimConfig const& config, BatchOptions const& opts = {})
{
    config.validate();
    auto const start = std::chrono::steady_clock::now();
    unsigned const workers = static_cast<unsigned>(std::min<std::int64_t>(
        resolve_threads(config.threads), config.trials));
    std::vector<std::optional<TrialRunner>> runners(workers);
    std::vector<std::optional<SimOutcome>> results(std::size_t(config.trials));

    parallel_for(config.trials, workers, [&](unsigned w, std::int64_t i) {
        if (opts.deadline && std::chrono::steady_clock::now() > *opts.deadline)
        {
            return;
        }
        if (!runners[w])
        {
            runners[w].emplace(config);
        }
        results[std::size_t(i)] = runners[w]->run(i);
    });

    BatchSummary s;
    s.trials_requested = config.trials;
    double sum = 0;
    double sum_sq = 0;
    double woken = 0;
    double absorbed = 0;
    for (auto& r : results)
    {
        if (!r)
        {
            s.timed_out = true;
            continue;
        }
        ++s.trials_completed;
        auto const v = r->root_visits;
        sum += double(v);
        sum_sq += double(v) * double(v);
        woken += double(r->frogs_woken);
        absorbed += double(r->absorbed_at_cap);
        if (std::size_t(v) >= s.visit_histogram.size())
        {
            s.visit_histogram.resize(std::size_t(v) + 1, 0);
        }
        ++s.visit_histogram[std::size_t(v)];
        if (opts.keep_outcomes)
        {
            s.outcomes.push_back(std::move(*r));
        }
    }
    auto const n = double(s.trials_completed);
    if (n > 0)
    {
        s.mean_visits = sum / n;
        s.mean_woken = woken / n;
        s.mean_absorbed = absorbed / n;
        s.var_visits = n > 1 ? (sum_sq - n * s.mean_visits * s.mean_visits)
                                   / (n - 1)
                             : 0.0;
        s.var_visits = std::max(s.var_visits, 0.0);
        s.stderr_visits = std::sqrt(s.var_visits / n);
    }
    s.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now()
                                              - start)
                    .count();
    return s;
}

//---------------------------------------------------------------------------//
// EXPERIMENTS
//---------------------------------------------------------------------------//
//! Empirical CDF of a histogram at x = 0..len-1
inline std::vector<double>
empirical_cdf(std::vector<std::uint64_t> const& hist, std::size_t len)
{
    std::uint64_t total = 0;
    for (auto c : hist)
    {
        total += c;
    }
    std::vector<double> cdf(len, 1.0);
    std::uint64_t run = 0;
    for (std::size_t x = 0; x < len; ++x)
    {
        if (x < hist.size())
        {
            run += hist[x];
        }
        cdf[x] = total ? double(run) / double(total) : 0.0;
    }
    return cdf;
}

//! Dvoretzky-Kiefer-Wolfowitz half-width at confidence 1 - alpha
inline double dkw_band(std::int64_t n, double alpha)
{
    return std::sqrt(std::log(2.0 / alpha) / (2.0 * double(n)));
}

/*!
 * One-sided comparison of root-visit laws of the two walk variants.
 *
 * `violation` is sup_x [(F_simple - band) - (F_nb + band)]: positive means
 * the nonbacktracking law is significantly *not* dominated by the simple
 * one. `reverse_violation` is the same statistic with roles swapped.
 */
struct CouplingReport
{
    BatchSummary simple;
    BatchSummary nonbacktracking;
    std::vector<double> cdf_simple;
    std::vector<double> cdf_nonbacktracking;
    double band_simple = 0;
    double band_nonbacktracking = 0;
    double alpha = 0.01;
    double violation = 0;
    std::size_t violation_at = 0;
    double reverse_violation = 0;
    std::size_t reverse_violation_at = 0;

    //! No significant violation of nu_nb ⪯ nu_simple
    bool consistent() const noexcept { return violation <= 0; }
    //! Significant violation of nu_simple ⪯ nu_nb
    bool reverse_violated() const noexcept { return reverse_violation > 0; }
};

inline CouplingReport dominance_experiment(SimConfig const& config_simple,
                                           SimConfig const& config_nb,
                                           double alpha = 0.01,
                                           BatchOptions const& opts = {})
{
    detail::require(config_simple.variant == WalkVariant::simple,
                    "first configuration must use the simple walk");
    detail::require(config_nb.variant == WalkVariant::nonbacktracking,
                    "second configuration must use the nonbacktracking walk");
    detail::require(config_simple.d == config_nb.d
                        && config_simple.frog_law.kind()
                               == config_nb.frog_law.kind()
                        && config_simple.frog_law.mean()
                               == config_nb.frog_law.mean()
                        && config_simple.horizon == config_nb.horizon
                        && config_simple.depth_cap == config_nb.depth_cap
                        && config_simple.trials == config_nb.trials,
                    "coupling configurations must match in d, frog law, "
                    "horizon, depth_cap and trials");
    detail::require(alpha > 0 && alpha < 1, "alpha must lie in (0, 1)");

    BatchOptions inner = opts;
    inner.keep_outcomes = false;
    CouplingReport rep;
    rep.alpha = alpha;
    rep.simple = run_batch(config_simple, inner);
    rep.nonbacktracking = run_batch(config_nb, inner);
    std::size_t const len = std::max(rep.simple.visit_histogram.size(),
                                     rep.nonbacktracking.visit_histogram.size());
    rep.cdf_simple = empirical_cdf(rep.simple.visit_histogram, len);
    rep.cdf_nonbacktracking = empirical_cdf(rep.nonbacktracking.visit_histogram,
                                            len);
    rep.band_simple = dkw_band(rep.simple.trials_completed, alpha);
    rep.band_nonbacktracking = dkw_band(rep.nonbacktracking.trials_completed,
                                        alpha);
    double const bands = rep.band_simple + rep.band_nonbacktracking;
    rep.violation = -std::numeric_limits<double>::infinity();
    rep.reverse_violation = -std::numeric_limits<double>::infinity();
    for (std::size_t x = 0; x < len; ++x)
    {
        double const fwd = rep.cdf_simple[x] - rep.cdf_nonbacktracking[x] - bands;
        double const rev = rep.cdf_nonbacktracking[x] - rep.cdf_simple[x] - bands;
        if (fwd > rep.violation)
        {
            rep.violation = fwd;
            rep.violation_at = x;
        }
        if (rev > rep.reverse_violation)
        {
            rep.reverse_violation = rev;
            rep.reverse_violation_at = x;
        }
    }
    return rep;
}

//---------------------------------------------------------------------------//
//! Mean root visits of a simple-walk batch with its standard error
struct ProxyEstimate
{
    double mean = 0;
    double stderr_mean = 0;
};

/*!
 * Finite-horizon recurrence proxy: mean root visits of a simple-walk batch
 * with Poi(mu) sleepers. Monotone surrogate only; it does not decide
 * almost-sure recurrence.
 */
inline ProxyEstimate recurrence_proxy(int d,
                                      double mu,
                                      int horizon,
                                      int depth_cap,
                                      std::int64_t trials,
                                      std::uint64_t seed,
                                      unsigned threads = 0)
{
    SimConfig c;
    c.d = d;
    c.frog_law = FrogLaw::poisson(mu);
    c.variant = WalkVariant::simple;
    c.horizon = horizon;
    c.depth_cap = depth_cap;
    c.trials = trials;
    c.seed = seed;
    c.record_visit_times = false;
    c.threads = threads;
    BatchOptions opts;
    opts.keep_outcomes = false;
    auto const s = run_batch(c, opts);
    return {s.mean_visits, s.stderr_visits};
}

struct CriticalSearchParams
{
    int d = 2;
    int horizon = 100;
    int depth_cap = 20;
    std::int64_t trials = 1000;
    double threshold_visits = 5;
    double mu_lo = 0.01;
    double mu_hi = 5;
    int iterations = 10;
    std::uint64_t seed = 1;
    unsigned threads = 0;
};

struct CriticalSearchResult
{
    double crossing = 0;
    double bracket_lo = 0;
    double bracket_hi = 0;
    //! Every evaluated (mu, proxy), sorted by mu
    std::vector<std::pair<double, ProxyEstimate>> curve;
};

/*!
 * Bisection on mu for the point where the recurrence proxy crosses
 * `threshold_visits`. Every probe shares the base seed.
 */
inline CriticalSearchResult critical_search(CriticalSearchParams const& p)
{
    detail::require(p.mu_lo >= 0 && p.mu_lo < p.mu_hi,
                    "critical_search needs 0 <= mu_lo < mu_hi");
    detail::require(p.iterations >= 0, "iterations must be >= 0");
    CriticalSearchResult res;
    auto probe = [&](double mu) {
        auto const est = recurrence_proxy(
            p.d, mu, p.horizon, p.depth_cap, p.trials, p.seed, p.threads);
        res.curve.emplace_back(mu, est);
        return est.mean;
    };
    double const at_lo = probe(p.mu_lo);
    if (!(at_lo < p.threshold_visits))
    {
        throw PreconditionError("bracket violation: proxy(mu_lo="
                                + std::to_string(p.mu_lo)
                                + ") = " + std::to_string(at_lo)
                                + " is not below threshold_visits");
    }
    double const at_hi = probe(p.mu_hi);
    if (!(at_hi > p.threshold_visits))
    {
        throw PreconditionError("bracket violation: proxy(mu_hi="
                                + std::to_string(p.mu_hi)
                                + ") = " + std::to_string(at_hi)
                                + " is not above threshold_visits");
    }
    double lo = p.mu_lo;
    double hi = p.mu_hi;
    for (int i = 0; i < p.iterations; ++i)
    {
        double const mid = 0.5 * (lo + hi);
        if (probe(mid) < p.threshold_visits)
        {
            lo = mid;
        }
        else
        {
            hi = mid;
        }
    }
    res.bracket_lo = lo;
    res.bracket_hi = hi;
    res.crossing = 0.5 * (lo + hi);
    std::sort(res.curve.begin(), res.curve.end(), [](auto const& a, auto const& b) {
        return a.first < b.first;
    });
    return res;
}

//---------------------------------------------------------------------------//
// COVER TIME
//---------------------------------------------------------------------------//
struct CoverTimeStats
{
    int d = 2;
    int height = 0;
    std::int64_t trials = 0;
    double mean = 0;
    double stderr_mean = 0;
    double q10 = 0;
    double q50 = 0;
    double q90 = 0;
    std::int64_t max = 0;
    std::vector<std::int64_t> samples;
};

//! Cap on simulated steps per cover-time trial
inline constexpr std::int64_t cover_time_step_limit = 100'000'000;

/*!
 * Cover time of the one-per-site frog model on the finite d-ary tree of
 * the given height. Walks are simple random walks on the finite tree, so
 * the root steps to a child and leaves step to their parent.
 */
inline std::int64_t
cover_time_trial(int d, int height, std::uint64_t seed, std::int64_t trial)
{
    std::uint64_t vertices = 0;
    std::uint64_t level = 1;
    for (int k = 0; k <= height; ++k)
    {
        vertices += level;
        level *= std::uint64_t(d);
    }
    if (vertices == 1)
    {
        return 0;
    }
    auto const ud = std::uint64_t(d);
    std::vector<char> visited(vertices, 0);
    visited[0] = 1;
    std::uint64_t seen = 1;
    std::vector<std::pair<std::uint64_t, int>> frogs{{0, 0}};
    std::vector<std::pair<std::uint64_t, int>> born;
    CounterStream rng(seed, StreamPurpose::cover_time, std::uint64_t(trial));
    for (std::int64_t t = 1; t <= cover_time_step_limit; ++t)
    {
        born.clear();
        for (auto& [v, depth] : frogs)
        {
            if (depth == 0)
            {
                v = 1 + rng.below(std::uint32_t(d));
                depth = 1;
            }
            else if (depth == height)
            {
                v = (v - 1) / ud;
                --depth;
            }
            else
            {
                std::uint32_t const r = rng.below(std::uint32_t(d + 1));
                if (r == std::uint32_t(d))
                {
                    v = (v - 1) / ud;
                    --depth;
                }
                else
                {
                    v = v * ud + 1 + r;
                    ++depth;
                }
            }
            if (!visited[v])
            {
                visited[v] = 1;
                ++seen;
                born.emplace_back(v, depth);
            }
        }
        if (seen == vertices)
        {
            return t;
        }
        frogs.insert(frogs.end(), born.begin(), born.end());
    }
    throw std::runtime_error("cover time exceeded the step limit of "
                             + std::to_string(cover_time_step_limit));
}

inline CoverTimeStats cover_time(int d,
                                 int height,
                                 std::int64_t trials,
                                 std::uint64_t seed,
                                 unsigned threads = 0)
{
    detail::require(d >= 2, "d must be >= 2");
    detail::require(height >= 0, "height must be >= 0");
    detail::require(trials >= 1, "trials must be >= 1");
    long double size = 0;
    long double level = 1;
    for (int k = 0; k <= height; ++k)
    {
        size += level;
        level *= d;
    }
    detail::require(size <= 1e8L, "finite tree too large (over 1e8 vertices)");

    CoverTimeStats s;
    s.d = d;
    s.height = height;
    s.trials = trials;
    s.samples.resize(std::size_t(trials));
    parallel_for(trials, threads, [&](unsigned, std::int64_t i) {
        s.samples[std::size_t(i)] = cover_time_trial(d, height, seed, i);
    });
    double sum = 0;
    double sum_sq = 0;
    for (auto x : s.samples)
    {
        sum += double(x);
        sum_sq += double(x) * double(x);
    }
    auto const n = double(trials);
    s.mean = sum / n;
    double const var = n > 1 ? std::max(0.0, (sum_sq - n * s.mean * s.mean) / (n - 1))
                             : 0.0;
    s.stderr_mean = std::sqrt(var / n);
    auto sorted = s.samples;
    std::sort(sorted.begin(), sorted.end());
    auto q = [&](double f) {
        auto idx = std::size_t(std::floor(f * double(sorted.size() - 1)));
        return double(sorted[idx]);
    };
    s.q10 = q(0.1);
    s.q50 = q(0.5);
    s.q90 = q(0.9);
    s.max = sorted.back();
    return s;
}

//---------------------------------------------------------------------------//
}  // namespace frogtree
