//------------------------------- -*- C++ -*- -------------------------------//
// Copyright frogtree contributors
// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
//! \file tools/frogtree_cli.cpp
//! Command-line front end for frog-model experiments.
//---------------------------------------------------------------------------//
#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include <frogtree/frogtree.hpp>

namespace
{
using nlohmann::json;
namespace fs = std::filesystem;
using namespace frogtree;

constexpr int schema_version = 1;
constexpr char const default_out_dir[] = "frogtree_out";

//---------------------------------------------------------------------------//
/*!
 * Parameters of one subcommand.
 *
 * Each parameter is both a CLI flag and a config-file key. Resolution order
 * is flag, then config file, then default.
 */
class ParamSet
{
  public:
    ParamSet(CLI::App* app, std::string name) : app_(app), name_(std::move(name))
    {
        app_->add_option("--config", config_path_,
                         "JSON config file (flags override its values)");
    }

    template<class T>
    void add(std::string const& key,
             T def,
             std::string const& help,
             std::string const& extra_names = {})
    {
        auto holder = std::make_shared<T>(def);
        std::string names = "--" + key;
        auto dashed = key;
        std::replace(dashed.begin(), dashed.end(), '_', '-');
        if (dashed != key)
        {
            names += ",--" + dashed;
        }
        if (!extra_names.empty())
        {
            names = extra_names + "," + names;
        }
        auto* opt = app_->add_option(names, *holder, help)->capture_default_str();
        entries_.push_back(Entry{key,
                                 json(def),
                                 opt,
                                 [holder] { return json(*holder); },
                                 [key](json const& j) {
                                     try
                                     {
                                         (void)j.get<T>();
                                     }
                                     catch (json::exception const&)
                                     {
                                         throw PreconditionError(
                                             "config field '" + key
                                             + "': wrong type (got "
                                             + j.dump() + ")");
                                     }
                                 }});
    }

    std::string const& name() const { return name_; }

    //! Merge defaults, config file and flags into one flat object
    json resolve() const
    {
        json file = json::object();
        if (!config_path_.empty())
        {
            std::ifstream in(config_path_);
            if (!in)
            {
                throw PreconditionError("cannot open config file '"
                                        + config_path_ + "'");
            }
            try
            {
                file = json::parse(in);
            }
            catch (json::parse_error const& e)
            {
                throw PreconditionError("malformed config file '" + config_path_
                                        + "': " + e.what());
            }
            if (!file.is_object())
            {
                throw PreconditionError("config file must hold a JSON object");
            }
        }

        json out = json::object();
        out["schema_version"] = schema_version;
        out["subcommand"] = name_;
        for (auto const& [key, value] : file.items())
        {
            if (key == "schema_version")
            {
                if (value != json(schema_version))
                {
                    throw PreconditionError(
                        "config field 'schema_version': unsupported version "
                        + value.dump());
                }
                continue;
            }
            if (key == "subcommand")
            {
                if (value != json(name_))
                {
                    throw PreconditionError("config field 'subcommand': file is "
                                            "for " + value.dump() + ", not '"
                                            + name_ + "'");
                }
                continue;
            }
            auto it = std::find_if(entries_.begin(), entries_.end(),
                                   [&](Entry const& e) { return e.key == key; });
            if (it == entries_.end())
            {
                throw PreconditionError("config field '" + key
                                        + "': unknown key for '" + name_ + "'");
            }
            it->check(value);
        }
        for (auto const& e : entries_)
        {
            if (e.opt->count() > 0)
            {
                out[e.key] = e.from_cli();
            }
            else if (file.contains(e.key))
            {
                out[e.key] = file.at(e.key);
            }
            else
            {
                out[e.key] = e.def;
            }
        }
        return out;
    }

  private:
    struct Entry
    {
        std::string key;
        json def;
        CLI::Option* opt;
        std::function<json()> from_cli;
        std::function<void(json const&)> check;
    };

    CLI::App* app_;
    std::string name_;
    std::string config_path_;
    std::vector<Entry> entries_;
};

//---------------------------------------------------------------------------//
// HELPERS
//---------------------------------------------------------------------------//
std::string env_out_dir()
{
    if (char const* env = std::getenv("FROGTREE_OUTPUT_DIR"); env && *env)
    {
        return env;
    }
    return default_out_dir;
}

template<class T>
T get(json const& cfg, char const* key)
{
    return cfg.at(key).get<T>();
}

std::uint64_t get_seed(json const& cfg)
{
    return cfg.at("seed").get<std::uint64_t>();
}

void add_common(ParamSet& p, bool threads = true)
{
    p.add<std::string>("out", env_out_dir(),
                       "Output directory (default from FROGTREE_OUTPUT_DIR)");
    if (threads)
    {
        p.add<unsigned>("threads", 0,
                        "Worker threads, 0 = all cores; results do not "
                        "depend on it");
    }
}

fs::path prepare_out(json const& cfg)
{
    fs::path dir = get<std::string>(cfg, "out");
    fs::create_directories(dir);
    std::ofstream(dir / "config.json") << cfg.dump(2) << '\n';
    return dir;
}

void write_json(fs::path const& path, json const& j)
{
    std::ofstream(path) << j.dump(2) << '\n';
}

json optional_real(std::optional<double> x)
{
    return x ? json(*x) : json(nullptr);
}

FrogLaw make_law(json const& cfg)
{
    auto const law = get<std::string>(cfg, "law");
    if (law == "poisson")
    {
        return FrogLaw::poisson(get<double>(cfg, "mu"));
    }
    if (law == "fixed")
    {
        auto const k = get<int>(cfg, "k");
        detail::require(k >= 0, "config field 'k': must be >= 0");
        return FrogLaw::fixed(std::uint32_t(k));
    }
    throw PreconditionError("config field 'law': must be 'poisson' or 'fixed'");
}

//---------------------------------------------------------------------------//
// SUBCOMMANDS
//---------------------------------------------------------------------------//
int run_simulate(json const& cfg)
{
    SimConfig c;
    c.d = get<int>(cfg, "d");
    c.frog_law = make_law(cfg);
    c.variant = parse_walk_variant(get<std::string>(cfg, "variant"));
    c.horizon = get<int>(cfg, "horizon");
    c.depth_cap = get<int>(cfg, "depth_cap");
    c.trials = get<std::int64_t>(cfg, "trials");
    c.seed = get_seed(cfg);
    c.record_visit_times = false;
    c.threads = get<unsigned>(cfg, "threads");
    if (auto theta = get<double>(cfg, "theta"); theta > 0)
    {
        c.weight_theta = theta;
    }
    c.validate();
    auto const dir = prepare_out(cfg);
    auto const s = run_batch(c);

    std::ofstream jsonl(dir / "outcomes.jsonl");
    write_outcomes_jsonl(jsonl, s.outcomes);
    std::ofstream csv(dir / "summary.csv");
    write_summary_csv_header(csv);
    write_summary_csv_row(csv, c, s);
    if (c.weight_theta)
    {
        std::ofstream w(dir / "weights.csv");
        w << "trial,n,w\n";
        for (auto const& o : s.outcomes)
        {
            for (std::size_t n = 0; n < o.weight_trace.size(); ++n)
            {
                w << o.trial << ',' << n << ',' << format_real(o.weight_trace[n])
                  << '\n';
            }
        }
    }

    std::cout << "mean_visits = " << format_real(s.mean_visits)
              << " (stderr " << format_real(s.stderr_visits) << ")\n"
              << "mean_woken = " << format_real(s.mean_woken) << '\n'
              << "mean_absorbed_at_cap = " << format_real(s.mean_absorbed)
              << '\n'
              << "wrote " << (dir / "summary.csv").string() << '\n';
    return 0;
}

int run_operator_iterate(json const& cfg)
{
    StarParams params;
    params.d = get<int>(cfg, "d");
    params.mu = get<double>(cfg, "mu");
    params.tol = get<double>(cfg, "tol");
    params.validate();
    auto const n = get<int>(cfg, "n");
    detail::require(n >= 1, "config field 'n': must be >= 1");
    auto const eps = get<double>(cfg, "epsilon");
    detail::require(eps >= 0, "config field 'epsilon': must be >= 0");
    auto const dir = prepare_out(cfg);

    auto const iterates = iterate(params, std::size_t(n));
    std::vector<DominanceVerdict> verdicts;
    if (eps > 0)
    {
        verdicts = verify_bootstrap(params, eps, std::size_t(n));
    }
    std::ofstream csv(dir / "iterates.csv");
    csv << "k,mean,support,tail_mass" << (eps > 0 ? ",verdict" : "") << '\n';
    std::cout << "k  mean  support  tail" << (eps > 0 ? "  verdict" : "") << '\n';
    for (int k = 1; k <= n; ++k)
    {
        auto const& p = iterates[std::size_t(k - 1)];
        csv << k << ',' << format_real(p.mean()) << ',' << p.masses().size()
            << ',' << format_real(p.tail_mass());
        std::cout << k << "  " << format_real(p.mean()) << "  "
                  << p.masses().size() << "  " << format_real(p.tail_mass());
        if (eps > 0)
        {
            auto const v = verdicts[std::size_t(k - 1)].to_string();
            csv << ',' << v;
            std::cout << "  " << v;
        }
        csv << '\n';
        std::cout << '\n';
    }
    return 0;
}

int run_find_epsilon(json const& cfg)
{
    auto const cert = epsilon_max(get<int>(cfg, "d"), get<double>(cfg, "mu"));
    auto const dir = prepare_out(cfg);
    json j = {{"d", cert.d},
              {"mu", cert.mu},
              {"m", cert.m},
              {"epsilon_max", optional_real(cert.epsilon_max)},
              {"lambda_grid_checked", cert.lambda_grid_checked}};
    write_json(dir / "certificate.json", j);
    if (cert.epsilon_max)
    {
        std::printf("epsilon_max = %.10f\n", *cert.epsilon_max);
    }
    else
    {
        std::printf("epsilon_max absent: e^{-m} + e^{-m/d} >= 1 (m = %.10g)\n",
                    cert.m);
    }
    std::cout << cert.lambda_grid_checked << '\n';
    return 0;
}

int run_verify_inequality(json const& cfg)
{
    auto const d = get<int>(cfg, "d");
    auto const mu = get<double>(cfg, "mu");
    auto const eps = get<double>(cfg, "epsilon");
    auto grid = get<std::vector<double>>(cfg, "lambdas");
    bool const default_grid = grid.empty();
    if (default_grid)
    {
        grid = default_lambda_grid();
    }
    bool const holds = verify_nbound(d, mu, eps, grid);
    auto const dir = prepare_out(cfg);

    std::ofstream csv(dir / "inequality.csv");
    csv << "lambda,p_m,p_n,scaled_gap\n";
    double worst = std::numeric_limits<double>::infinity();
    double worst_lambda = 0;
    for (double lambda : grid)
    {
        auto const bp = binomial_param_compare(d, mu, eps, lambda);
        double const gap = scaled_binomial_gap(d, mu, eps, lambda);
        if (gap < worst)
        {
            worst = gap;
            worst_lambda = lambda;
        }
        csv << format_real(lambda) << ',' << format_real(bp.p_m) << ','
            << format_real(bp.p_n) << ',' << format_real(gap) << '\n';
    }
    write_json(dir / "result.json",
               {{"holds", holds},
                {"grid", default_grid ? describe_default_lambda_grid()
                                      : std::to_string(grid.size())
                                            + " user-supplied points"},
                {"min_scaled_gap", worst},
                {"at_lambda", worst_lambda}});
    std::cout << "inequality " << (holds ? "holds" : "FAILS")
              << " on the grid; min scaled gap " << format_real(worst)
              << " at lambda = " << format_real(worst_lambda) << '\n';
    return holds ? 0 : 1;
}

int run_cim_check(json const& cfg)
{
    auto const xmin = get<double>(cfg, "xmin");
    auto const xmax = get<double>(cfg, "xmax");
    auto const step = get<double>(cfg, "step");
    detail::require(step > 0, "config field 'step': must be > 0");
    detail::require(xmax >= xmin, "config field 'xmax': must be >= xmin");
    detail::require(xmin >= 2, "config field 'xmin': must be >= 2");
    auto const dir = prepare_out(cfg);

    std::ofstream csv(dir / "cim.csv");
    csv << "x,value,holds\n";
    auto const count = static_cast<std::int64_t>(std::floor((xmax - xmin) / step
                                                            + 1e-9));
    std::int64_t failures = 0;
    double largest = 0;
    for (std::int64_t i = 0; i <= count; ++i)
    {
        double const x = xmin + double(i) * step;
        auto const r = cim_check(x);
        failures += r.holds ? 0 : 1;
        largest = std::max(largest, r.value);
        csv << format_real(x) << ',' << format_real(r.value) << ','
            << (r.holds ? 1 : 0) << '\n';
    }
    std::cout << count + 1 << " grid points, " << failures
              << " failures, max value " << format_real(largest) << '\n';
    return failures == 0 ? 0 : 1;
}

int run_transience_check(json const& cfg)
{
    SimConfig c;
    c.d = get<int>(cfg, "d");
    c.frog_law = FrogLaw::poisson(get<double>(cfg, "mu"));
    c.trials = get<std::int64_t>(cfg, "trials");
    c.horizon = get<int>(cfg, "horizon");
    c.seed = get_seed(cfg);
    SupermartingaleOptions opts;
    opts.depth_cap = get<int>(cfg, "depth_cap");
    opts.threads = get<unsigned>(cfg, "threads");
    auto const rep = supermartingale_check(c, opts);
    auto const dir = prepare_out(cfg);

    std::ofstream csv(dir / "weights.csv");
    write_weight_csv(csv, rep);
    write_json(dir / "report.json",
               {{"theta", rep.params.theta},
                {"m", rep.params.m},
                {"depth_cap", rep.depth_cap},
                {"bound_holds", rep.bound_holds},
                {"worst_step", rep.worst_step},
                {"worst_relative_excess", rep.worst_excess},
                {"step_bound_holds", rep.step_bound_holds},
                {"visits_decay", rep.visits_decay},
                {"absorbed_weight", rep.absorbed_weight},
                {"absorbed_negligible", rep.absorbed_negligible},
                {"passed", rep.passed()}});
    std::cout << "theta = " << format_real(rep.params.theta)
              << ", m = " << format_real(rep.params.m)
              << ", depth cap = " << rep.depth_cap << '\n'
              << "E[W_n] <= m^n within band: "
              << (rep.bound_holds ? "yes" : "NO") << '\n'
              << "one-step bound: " << (rep.step_bound_holds ? "yes" : "NO")
              << '\n'
              << "absorbed weight " << format_real(rep.absorbed_weight) << '\n';
    return rep.passed() ? 0 : 1;
}

int run_critical_search(json const& cfg)
{
    CriticalSearchParams p;
    p.d = get<int>(cfg, "d");
    p.horizon = get<int>(cfg, "horizon");
    p.depth_cap = get<int>(cfg, "depth_cap");
    p.trials = get<std::int64_t>(cfg, "trials");
    p.threshold_visits = get<double>(cfg, "threshold_visits");
    p.mu_lo = get<double>(cfg, "mu_lo");
    p.mu_hi = get<double>(cfg, "mu_hi");
    p.iterations = get<int>(cfg, "iterations");
    p.seed = get_seed(cfg);
    p.threads = get<unsigned>(cfg, "threads");
    auto const dir = prepare_out(cfg);
    auto const res = critical_search(p);

    std::ofstream csv(dir / "curve.csv");
    csv << "mu,proxy,stderr\n";
    for (auto const& [mu, est] : res.curve)
    {
        csv << format_real(mu) << ',' << format_real(est.mean) << ','
            << format_real(est.stderr_mean) << '\n';
    }
    write_json(dir / "result.json",
               {{"crossing", res.crossing},
                {"bracket_lo", res.bracket_lo},
                {"bracket_hi", res.bracket_hi}});
    std::cout << "crossing mu = " << format_real(res.crossing) << " in ["
              << format_real(res.bracket_lo) << ", "
              << format_real(res.bracket_hi) << "]\n";
    return 0;
}

int run_cover_time(json const& cfg)
{
    auto const s = cover_time(get<int>(cfg, "d"),
                              get<int>(cfg, "height"),
                              get<std::int64_t>(cfg, "trials"),
                              get_seed(cfg),
                              get<unsigned>(cfg, "threads"));
    auto const dir = prepare_out(cfg);
    std::ofstream csv(dir / "cover_times.csv");
    csv << "trial,cover_time\n";
    for (std::size_t i = 0; i < s.samples.size(); ++i)
    {
        csv << i << ',' << s.samples[i] << '\n';
    }
    write_json(dir / "summary.json",
               {{"mean", s.mean},
                {"stderr", s.stderr_mean},
                {"q10", s.q10},
                {"q50", s.q50},
                {"q90", s.q90},
                {"max", s.max}});
    std::cout << "mean cover time = " << format_real(s.mean) << " (stderr "
              << format_real(s.stderr_mean) << "), median "
              << format_real(s.q50) << ", max " << s.max << '\n';
    return 0;
}

int run_coupling_check(json const& cfg)
{
    SimConfig c;
    c.d = get<int>(cfg, "d");
    c.frog_law = make_law(cfg);
    c.horizon = get<int>(cfg, "horizon");
    c.depth_cap = get<int>(cfg, "depth_cap");
    c.trials = get<std::int64_t>(cfg, "trials");
    c.seed = get_seed(cfg);
    c.record_visit_times = false;
    c.threads = get<unsigned>(cfg, "threads");
    auto nb = c;
    nb.variant = WalkVariant::nonbacktracking;
    auto const dir = prepare_out(cfg);
    auto const rep = dominance_experiment(c, nb, get<double>(cfg, "alpha"));

    std::ofstream csv(dir / "coupling.csv");
    csv << "x,cdf_simple,cdf_nonbacktracking\n";
    for (std::size_t x = 0; x < rep.cdf_simple.size(); ++x)
    {
        csv << x << ',' << format_real(rep.cdf_simple[x]) << ','
            << format_real(rep.cdf_nonbacktracking[x]) << '\n';
    }
    write_json(dir / "report.json",
               {{"band_simple", rep.band_simple},
                {"band_nonbacktracking", rep.band_nonbacktracking},
                {"violation", rep.violation},
                {"violation_at", rep.violation_at},
                {"consistent", rep.consistent()},
                {"reverse_violation", rep.reverse_violation},
                {"reverse_violation_at", rep.reverse_violation_at},
                {"reverse_violated", rep.reverse_violated()},
                {"mean_simple", rep.simple.mean_visits},
                {"mean_nonbacktracking", rep.nonbacktracking.mean_visits}});
    std::cout << "nonbacktracking below simple: "
              << (rep.consistent() ? "consistent" : "VIOLATED")
              << " (statistic " << format_real(rep.violation) << ")\n"
              << "reverse order: "
              << (rep.reverse_violated() ? "violated" : "not rejected")
              << " (statistic " << format_real(rep.reverse_violation) << ")\n";
    return rep.consistent() ? 0 : 1;
}

//---------------------------------------------------------------------------//
struct Subcommand
{
    std::unique_ptr<ParamSet> params;
    std::function<int(json const&)> run;
};

void add_sim_params(ParamSet& p, int horizon, int depth_cap, std::int64_t trials)
{
    p.add<int>("d", 2, "Tree arity (children per vertex)");
    p.add<double>("mu", 1.0, "Mean sleeping frogs per vertex (poisson law)");
    p.add<std::string>("law", "poisson", "Sleeper law: poisson or fixed");
    p.add<int>("k", 1, "Sleepers per vertex for the fixed law");
    p.add<int>("horizon", horizon, "Time horizon T (steps)", "-T");
    p.add<int>("depth_cap", depth_cap, "Absorbing depth D (levels)", "-D");
    p.add<std::int64_t>("trials", trials, "Independent trials");
    p.add<std::uint64_t>("seed", 1, "Base seed");
}

}  // namespace

//---------------------------------------------------------------------------//
int main(int argc, char** argv)
{
    CLI::App app{"Frog model on d-ary trees: operator certificates and "
                 "Monte Carlo experiments"};
    app.require_subcommand(1);
    std::vector<std::pair<CLI::App*, Subcommand>> subs;
    auto make = [&](char const* name, char const* desc, auto&& run) -> ParamSet& {
        auto* sub = app.add_subcommand(name, desc);
        subs.push_back({sub, Subcommand{std::make_unique<ParamSet>(sub, name), run}});
        return *subs.back().second.params;
    };

    {
        auto& p = make("simulate",
                       "Run a batch of trials on the infinite tree; writes "
                       "outcomes.jsonl and summary.csv",
                       run_simulate);
        add_sim_params(p, 100, 20, 1000);
        p.add<std::string>("variant", "simple", "Walk: simple or nonbacktracking");
        p.add<double>("theta", 0.0, "Record weights e^{-theta depth} (0 = off)");
        add_common(p);
    }
    {
        auto& p = make("operator-iterate",
                       "Iterate the star-system operator from delta_0; "
                       "writes iterates.csv",
                       run_operator_iterate);
        p.add<int>("d", 2, "Tree arity");
        p.add<double>("mu", 6.0, "Poisson frog density");
        p.add<int>("n", 10, "Iterations");
        p.add<double>("epsilon", 0.0,
                      "Check Poi(k epsilon) below iterate k (0 = skip)");
        p.add<double>("tol", default_truncation_tol,
                      "Tail mass tolerance per pmf");
        add_common(p, false);
    }
    {
        auto& p = make("find-epsilon",
                       "Closed-form bootstrap increment; writes "
                       "certificate.json",
                       run_find_epsilon);
        p.add<int>("d", 2, "Tree arity");
        p.add<double>("mu", 6.0, "Poisson frog density");
        add_common(p, false);
    }
    {
        auto& p = make("verify-inequality",
                       "Check the binomial parameter inequality on a lambda "
                       "grid; exit 1 if it fails",
                       run_verify_inequality);
        p.add<int>("d", 2, "Tree arity");
        p.add<double>("mu", 6.0, "Poisson frog density");
        p.add<double>("epsilon", 1.3, "Bootstrap increment");
        p.add<std::vector<double>>("lambdas", {},
                                   "Lambda grid (empty = 0 plus 512 log-spaced "
                                   "points on [1e-6, 1e3])");
        add_common(p, false);
    }
    {
        auto& p = make("cim-check",
                       "Evaluate x^-2 + x^(-2/x) on a grid; exit 1 if any "
                       "value reaches 1",
                       run_cim_check);
        p.add<double>("xmin", 2.0, "Grid start (>= 2)");
        p.add<double>("xmax", 64.0, "Grid end");
        p.add<double>("step", 0.01, "Grid spacing");
        add_common(p, false);
    }
    {
        auto& p = make("transience-check",
                       "Estimate E[W_n] against m^n in the subcritical regime; "
                       "writes weights.csv",
                       run_transience_check);
        p.add<int>("d", 5, "Tree arity");
        p.add<double>("mu", 0.5, "Poisson frog density (below (d-1)^2/(4d))");
        p.add<std::int64_t>("trials", 10000, "Independent trials");
        p.add<int>("horizon", 200, "Steps n = 0..horizon", "-T");
        p.add<int>("depth_cap", 0,
                   "Absorbing depth D (0 = smallest with e^{-theta D} <= 1e-8)",
                   "-D");
        p.add<std::uint64_t>("seed", 1, "Base seed");
        add_common(p);
    }
    {
        auto& p = make("critical-search",
                       "Bisection on mu for where the recurrence proxy crosses "
                       "a threshold; writes curve.csv",
                       run_critical_search);
        p.add<int>("d", 2, "Tree arity");
        p.add<int>("horizon", 100, "Time horizon T (steps)", "-T");
        p.add<int>("depth_cap", 20, "Absorbing depth D (levels)", "-D");
        p.add<std::int64_t>("trials", 1000, "Trials per probe");
        p.add<double>("threshold_visits", 1.5, "Target mean root visits");
        p.add<double>("mu_lo", 0.01, "Lower bracket");
        p.add<double>("mu_hi", 0.6, "Upper bracket");
        p.add<int>("iterations", 8, "Bisection steps");
        p.add<std::uint64_t>("seed", 1, "Base seed shared by all probes");
        add_common(p);
    }
    {
        auto& p = make("cover-time",
                       "Cover time of the one-per-site model on a finite tree; "
                       "writes cover_times.csv",
                       run_cover_time);
        p.add<int>("d", 2, "Tree arity");
        p.add<int>("height", 3, "Tree height (levels below the root)");
        p.add<std::int64_t>("trials", 1000, "Independent trials");
        p.add<std::uint64_t>("seed", 1, "Base seed");
        add_common(p);
    }
    {
        auto& p = make("coupling-check",
                       "Compare root-visit laws of simple and nonbacktracking "
                       "walks; exit 1 on a significant violation",
                       run_coupling_check);
        add_sim_params(p, 200, 25, 10000);
        p.add<double>("alpha", 0.01, "Per-sample confidence band level");
        add_common(p);
    }

    try
    {
        app.parse(argc, argv);
    }
    catch (CLI::ParseError const& e)
    {
        int const code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try
    {
        for (auto& [sub, cmd] : subs)
        {
            if (sub->parsed())
            {
                return cmd.run(cmd.params->resolve());
            }
        }
        return 2;
    }
    catch (PreconditionError const& e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    catch (json::exception const& e)
    {
        std::cerr << "error: config: " << e.what() << '\n';
        return 1;
    }
    catch (std::exception const& e)
    {
        std::cerr << "internal error: " << e.what() << '\n';
        return 2;
    }
}
