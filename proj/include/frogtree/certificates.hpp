//------------------------------- -*- C++ -*- -------------------------------//
// Copyright frogtree contributors
// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
//! \file frogtree/certificates.hpp
//! Closed-form thresholds and numeric verifiers for the recurrence bound.
//---------------------------------------------------------------------------//
#pragma once

#include <cmath>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"

namespace frogtree
{
//---------------------------------------------------------------------------//
//! Default lambda grid: 0 plus 512 log-spaced points on [1e-6, 1e3]
inline std::vector<double> default_lambda_grid()
{
    constexpr int points = 512;
    std::vector<double> grid;
    grid.reserve(points + 1);
    grid.push_back(0.0);
    double const lo = std::log10(1e-6);
    double const hi = std::log10(1e3);
    for (int i = 0; i < points; ++i)
    {
        grid.push_back(std::pow(10.0, lo + (hi - lo) * i / (points - 1)));
    }
    return grid;
}

inline std::string describe_default_lambda_grid()
{
    return "lambda = 0 plus 512 log-spaced points on [1e-6, 1e3]";
}

//---------------------------------------------------------------------------//
/*!
 * Success parameters of the two binomial laws compared in the bootstrap.
 *
 * M ~ Bin(d-1, p_m) counts nonzero pieces of Poi(lambda + eps); N ~ Bin(d-1,
 * p_n) counts those of the lower bound on the operator image. M ⪯ N iff
 * p_m <= p_n.
 */
struct BinomialParams
{
    double p_m = 0;
    double p_n = 0;
};

inline BinomialParams
binomial_param_compare(int d, double mu, double epsilon, double lambda)
{
    detail::require(d >= 2, "d must be >= 2");
    detail::require(mu >= 0, "mu must be >= 0");
    detail::require(epsilon > 0, "epsilon must be > 0");
    detail::require(lambda >= 0, "lambda must be >= 0");
    double const m = mu / (d + 1);
    BinomialParams out;
    out.p_m = -std::expm1(-(lambda + epsilon) / d);
    out.p_n = -std::expm1(-lambda / d - m) * -std::expm1(-(lambda + m) / d);
    return out;
}

/*!
 * p_n - p_m divided by e^{-lambda/d}.
 *
 * Expanding the product gives p_n - p_m = e^{-lambda/d} [e^{-eps/d} - e^{-m}
 * - e^{-m/d} + e^{-m-(lambda+m)/d}]; the bracket keeps full relative
 * precision at large lambda where both parameters round to one.
 */
inline double scaled_binomial_gap(int d, double mu, double epsilon, double lambda)
{
    double const m = mu / (d + 1);
    return std::exp(-epsilon / d) - std::exp(-m) - std::exp(-m / d)
           + std::exp(-m - (lambda + m) / d);
}

/*!
 * Check p_m <= p_n at every lambda of the grid (equality tolerance 1e-12
 * on the scaled gap).
 */
inline bool verify_nbound(int d,
                          double mu,
                          double epsilon,
                          std::span<double const> lambdas)
{
    detail::require(d >= 2, "d must be >= 2");
    detail::require(mu >= 0, "mu must be >= 0");
    detail::require(epsilon > 0, "epsilon must be > 0");
    detail::require(!lambdas.empty(), "lambda grid must be nonempty");
    for (double lambda : lambdas)
    {
        detail::require(lambda >= 0, "lambda grid values must be >= 0");
        if (scaled_binomial_gap(d, mu, epsilon, lambda) < -1e-12)
        {
            return false;
        }
    }
    return true;
}

inline bool verify_nbound(int d, double mu, double epsilon)
{
    auto const grid = default_lambda_grid();
    return verify_nbound(d, mu, epsilon, grid);
}

//---------------------------------------------------------------------------//
/*!
 * Largest bootstrap increment certified by the closed form.
 *
 * With m = mu/(d+1), any eps with e^{-eps/d} >= e^{-m} + e^{-m/d} works for
 * every lambda; the bound is present iff that sum is below one.
 */
struct EpsilonCertificate
{
    int d = 2;
    double mu = 0;
    double m = 0;
    std::optional<double> epsilon_max;
    std::string lambda_grid_checked;
};

inline EpsilonCertificate epsilon_max(int d, double mu)
{
    detail::require(d >= 2, "d must be >= 2");
    detail::require(std::isfinite(mu) && mu >= 0, "mu must be >= 0");
    EpsilonCertificate cert;
    cert.d = d;
    cert.mu = mu;
    cert.m = mu / (d + 1);
    double const sum = std::exp(-cert.m) + std::exp(-cert.m / d);
    if (sum < 1)
    {
        double const eps = -d * std::log(sum);
        cert.epsilon_max = eps;
        bool const grid_ok = verify_nbound(d, mu, eps * (1 - 1e-9));
        cert.lambda_grid_checked = describe_default_lambda_grid()
                                   + (grid_ok ? ": holds" : ": FAILS");
    }
    else
    {
        cert.lambda_grid_checked = "not checked (no epsilon)";
    }
    return cert;
}

//---------------------------------------------------------------------------//
//! x^{-2} + x^{-2/x} and whether it is below one
struct CimValue
{
    double value = 0;
    bool holds = false;
};

inline CimValue cim_check(double x)
{
    detail::require(x >= 2, "cim_check is defined for x >= 2");
    CimValue out;
    out.value = std::pow(x, -2.0) + std::pow(x, -2.0 / x);
    out.holds = out.value < 1;
    return out;
}

//! Density above which the Poisson frog model on T_d is recurrent
inline double recurrence_threshold(int d)
{
    detail::require(d >= 2, "d must be >= 2");
    return 2.0 * (d + 1) * std::log(double(d));
}

//! Mean frog count below which the model on T_d is transient
inline double transience_threshold(int d)
{
    detail::require(d >= 2, "d must be >= 2");
    return double(d - 1) * double(d - 1) / (4.0 * d);
}

//---------------------------------------------------------------------------//
}  // namespace frogtree
