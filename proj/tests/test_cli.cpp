//------------------------------- -*- C++ -*- -------------------------------//
// Copyright frogtree contributors
// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
//! \file tests/test_cli.cpp
//! Runs the command-line tool as a subprocess.
//---------------------------------------------------------------------------//
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>
#include <sys/wait.h>

#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace
{
fs::path scratch()
{
    static fs::path const dir = [] {
        auto p = fs::temp_directory_path()
                 / ("frogtree_cli_test_" + std::to_string(::getpid()));
        fs::remove_all(p);
        fs::create_directories(p);
        return p;
    }();
    return dir;
}

int run(std::string const& args, std::string* output = nullptr)
{
    auto const log = scratch() / "stdout.txt";
    std::string const cmd = std::string(FROGTREE_CLI_PATH) + " " + args + " > "
                            + log.string() + " 2>&1";
    int const status = std::system(cmd.c_str());
    if (output)
    {
        std::ifstream in(log);
        std::stringstream ss;
        ss << in.rdbuf();
        *output = ss.str();
    }
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(fs::path const& p)
{
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json load(fs::path const& p)
{
    std::ifstream in(p);
    return json::parse(in);
}
}  // namespace

TEST(Cli, FindEpsilon)
{
    auto const out = scratch() / "eps";
    std::string text;
    ASSERT_EQ(run("find-epsilon --d 2 --mu 6 --out " + out.string(), &text), 0);
    EXPECT_NE(text.find("1.37347"), std::string::npos) << text;
    auto const cert = load(out / "certificate.json");
    EXPECT_NEAR(cert.at("epsilon_max").get<double>(),
                -2 * std::log(std::exp(-2.0) + std::exp(-1.0)), 1e-12);
    auto const cfg = load(out / "config.json");
    EXPECT_EQ(cfg.at("schema_version"), 1);
    EXPECT_EQ(cfg.at("subcommand"), "find-epsilon");

    ASSERT_EQ(run("find-epsilon --d 2 --mu 1 --out " + out.string()), 0);
    EXPECT_TRUE(load(out / "certificate.json").at("epsilon_max").is_null());
}

TEST(Cli, CimCheck)
{
    auto const out = scratch() / "cim";
    EXPECT_EQ(run("cim-check --xmin 2 --xmax 64 --step 0.01 --out " + out.string()),
              0);
    EXPECT_EQ(run("cim-check --xmin 1 --out " + out.string()), 1);
}

TEST(Cli, SimulateNonbacktrackingWithoutFrogs)
{
    auto const out = scratch() / "sim";
    ASSERT_EQ(run("simulate --d 2 --mu 0 --variant nonbacktracking --trials 100 "
                  "--out " + out.string()),
              0);
    auto const csv = slurp(out / "summary.csv");
    EXPECT_EQ(csv, "d,mu,variant,T,D,trials,mean_visits,stderr,mean_woken\n"
                   "2,0,nonbacktracking,100,20,100,0,0,0\n");
    std::ifstream jsonl(out / "outcomes.jsonl");
    std::string line;
    int rows = 0;
    while (std::getline(jsonl, line))
    {
        auto const rec = json::parse(line);
        EXPECT_EQ(rec.at("trial"), rows);
        EXPECT_EQ(rec.at("root_visits"), 0);
        EXPECT_TRUE(rec.contains("frogs_woken"));
        EXPECT_TRUE(rec.contains("absorbed_at_cap"));
        ++rows;
    }
    EXPECT_EQ(rows, 100);
}

TEST(Cli, ResolvedConfigReproducesOutput)
{
    auto const a = scratch() / "rep_a";
    auto const b = scratch() / "rep_b";
    ASSERT_EQ(run("simulate --d 3 --mu 0.7 -T 40 -D 10 --trials 200 --seed 9 "
                  "--threads 2 --out " + a.string()),
              0);
    auto cfg = load(a / "config.json");
    cfg["out"] = b.string();
    cfg["threads"] = 1;
    auto const cfg_path = scratch() / "rep.json";
    std::ofstream(cfg_path) << cfg.dump();
    ASSERT_EQ(run("simulate --config " + cfg_path.string()), 0);
    EXPECT_EQ(slurp(a / "outcomes.jsonl"), slurp(b / "outcomes.jsonl"));
    EXPECT_EQ(slurp(a / "summary.csv"), slurp(b / "summary.csv"));
}

TEST(Cli, FlagsOverrideConfig)
{
    auto const out = scratch() / "prec";
    auto const cfg_path = scratch() / "prec.json";
    std::ofstream(cfg_path) << R"({"schema_version": 1, "d": 3, "mu": 10})";
    ASSERT_EQ(run("find-epsilon --config " + cfg_path.string() + " --mu 25 --out "
                  + out.string()),
              0);
    auto const cfg = load(out / "config.json");
    EXPECT_EQ(cfg.at("d"), 3);
    EXPECT_EQ(cfg.at("mu"), 25.0);
}

TEST(Cli, ConfigErrorsNameTheField)
{
    auto const cfg_path = scratch() / "bad.json";
    std::string text;
    std::ofstream(cfg_path) << R"({"d": 2, "nonsense": 4})";
    EXPECT_EQ(run("find-epsilon --config " + cfg_path.string(), &text), 1);
    EXPECT_NE(text.find("nonsense"), std::string::npos);

    std::ofstream(cfg_path) << R"({"mu": "six"})";
    EXPECT_EQ(run("find-epsilon --config " + cfg_path.string(), &text), 1);
    EXPECT_NE(text.find("'mu'"), std::string::npos);

    std::ofstream(cfg_path) << R"({"mu": )";
    EXPECT_EQ(run("find-epsilon --config " + cfg_path.string(), &text), 1);
    EXPECT_NE(text.find("malformed"), std::string::npos);

    std::ofstream(cfg_path) << R"({"schema_version": 7})";
    EXPECT_EQ(run("find-epsilon --config " + cfg_path.string(), &text), 1);
    EXPECT_NE(text.find("schema_version"), std::string::npos);

    EXPECT_EQ(run("find-epsilon --no-such-flag", &text), 1);
    EXPECT_EQ(run("bogus-command", &text), 1);
}

TEST(Cli, BracketFailureExitsOne)
{
    std::string text;
    auto const out = scratch() / "crit";
    EXPECT_EQ(run("critical-search --trials 20 -T 30 -D 8 --mu-lo 0 --mu-hi 0.1 "
                  "--threshold-visits 50 --out " + out.string(), &text),
              1);
    EXPECT_NE(text.find("mu_hi"), std::string::npos) << text;
}

TEST(Cli, OutputDirectoryFromEnvironment)
{
    auto const out = scratch() / "envdir";
    std::string const cmd = "FROGTREE_OUTPUT_DIR=" + out.string() + " "
                            + std::string(FROGTREE_CLI_PATH)
                            + " find-epsilon > /dev/null";
    ASSERT_EQ(std::system(cmd.c_str()), 0);
    EXPECT_TRUE(fs::exists(out / "certificate.json"));
}

TEST(Cli, OtherSubcommands)
{
    auto const out = scratch() / "misc";
    auto const o = " --out " + out.string();
    EXPECT_EQ(run("operator-iterate --d 2 --mu 6 --n 4 --epsilon 1.37" + o), 0);
    EXPECT_NE(slurp(out / "iterates.csv").find("dominates"), std::string::npos);
    EXPECT_EQ(run("verify-inequality --d 2 --mu 6 --epsilon 1.3" + o), 0);
    EXPECT_EQ(run("verify-inequality --d 2 --mu 6 --epsilon 2" + o), 1);
    EXPECT_EQ(run("cover-time --d 2 --height 2 --trials 200" + o), 0);
    EXPECT_TRUE(fs::exists(out / "cover_times.csv"));
    EXPECT_EQ(run("transience-check --d 2 --mu 0 --trials 200 -T 30" + o), 0);
    EXPECT_EQ(slurp(out / "weights.csv").substr(0, 22), "n,mean_w,m_pow_n,band\n");
    EXPECT_EQ(run("transience-check --d 2 --mu 1" + o), 1);
    EXPECT_EQ(run("coupling-check --d 2 --mu 0 --trials 200 -T 40 -D 10" + o), 0);
    EXPECT_EQ(run("critical-search --d 2 -T 30 -D 8 --trials 100 --iterations 2" + o),
              0);
    EXPECT_TRUE(fs::exists(out / "curve.csv"));
}

TEST(Cli, HelpDocumentsDefaults)
{
    std::string text;
    EXPECT_EQ(run("simulate --help", &text), 0);
    EXPECT_NE(text.find("[100]"), std::string::npos);
    EXPECT_NE(text.find("steps"), std::string::npos);
}
