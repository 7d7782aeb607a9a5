//------------------------------- -*- C++ -*- -------------------------------//
// Copyright frogtree contributors
// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
//! \file frogtree/frogtree.hpp
//! Umbrella header.
//---------------------------------------------------------------------------//
#pragma once

#include "certificates.hpp"
#include "errors.hpp"
#include "io.hpp"
#include "operator_a.hpp"
#include "parallel.hpp"
#include "pmf.hpp"
#include "random.hpp"
#include "transience.hpp"
#include "tree_sim.hpp"
