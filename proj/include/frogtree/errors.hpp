//------------------------------- -*- C++ -*- -------------------------------//
// Copyright frogtree contributors
// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
//! \file frogtree/errors.hpp
//---------------------------------------------------------------------------//
#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace frogtree
{
//---------------------------------------------------------------------------//
/*!
 * Input violates a documented precondition of an operation.
 *
 * The CLI maps this to exit code 1; anything else escaping an operation is
 * treated as an internal error.
 */
class PreconditionError : public std::invalid_argument
{
  public:
    using std::invalid_argument::invalid_argument;
};

//---------------------------------------------------------------------------//
/*!
 * Support cap or tail-mass budget exhausted while iterating an operator.
 */
class TruncationError : public std::runtime_error
{
  public:
    TruncationError(std::size_t iteration, std::string const& what)
        : std::runtime_error("iteration " + std::to_string(iteration) + ": "
                             + what)
        , iteration_(iteration)
    {
    }

    std::size_t iteration() const noexcept { return iteration_; }

  private:
    std::size_t iteration_;
};

namespace detail
{
inline void require(bool cond, std::string const& msg)
{
    if (!cond)
    {
        throw PreconditionError(msg);
    }
}
}  // namespace detail

//---------------------------------------------------------------------------//
}  // namespace frogtree
