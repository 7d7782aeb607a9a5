//------------------------------- -*- C++ -*- -------------------------------//
// Copyright frogtree contributors
// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
//! \file frogtree/io.hpp
//! CSV and JSON-lines writers with fixed column order.
//---------------------------------------------------------------------------//
#pragma once

#include <cstdio>
#include <cstdlib>
#include <ostream>
#include <string>
#include <vector>

#include "transience.hpp"
#include "tree_sim.hpp"

namespace frogtree
{
//! Shortest round-trip decimal representation of a double
inline std::string format_real(double x)
{
    char buf[32];
    for (int prec = 1; prec <= 17; ++prec)
    {
        std::snprintf(buf, sizeof(buf), "%.*g", prec, x);
        if (std::strtod(buf, nullptr) == x)
        {
            break;
        }
    }
    return buf;
}

inline constexpr char const summary_csv_header[]
    = "d,mu,variant,T,D,trials,mean_visits,stderr,mean_woken";
inline constexpr char const weight_csv_header[] = "n,mean_w,m_pow_n,band";

//! One object per trial: trial, root_visits, frogs_woken, absorbed_at_cap
inline void write_outcomes_jsonl(std::ostream& os,
                                 std::vector<SimOutcome> const& outcomes)
{
    for (auto const& o : outcomes)
    {
        os << "{\"trial\":" << o.trial << ",\"root_visits\":" << o.root_visits
           << ",\"frogs_woken\":" << o.frogs_woken
           << ",\"absorbed_at_cap\":" << o.absorbed_at_cap << "}\n";
    }
}

inline void write_summary_csv_header(std::ostream& os)
{
    os << summary_csv_header << '\n';
}

inline void write_summary_csv_row(std::ostream& os,
                                  SimConfig const& config,
                                  BatchSummary const& s)
{
    os << config.d << ',' << format_real(config.frog_law.mean()) << ','
       << to_string(config.variant) << ',' << config.horizon << ','
       << config.depth_cap << ',' << s.trials_completed << ','
       << format_real(s.mean_visits) << ',' << format_real(s.stderr_visits)
       << ',' << format_real(s.mean_woken) << '\n';
}

inline void write_weight_csv(std::ostream& os, SupermartingaleReport const& rep)
{
    os << weight_csv_header << '\n';
    for (std::size_t n = 0; n < rep.mean_w.size(); ++n)
    {
        os << n << ',' << format_real(rep.mean_w[n]) << ','
           << format_real(rep.m_pow[n]) << ',' << format_real(rep.band[n])
           << '\n';
    }
}

}  // namespace frogtree
