#pragma once

/// @file hslab.hpp
/// @brief Convenience umbrella for the whole library.

#include "hslab/asymptotics.hpp"
#include "hslab/bubble.hpp"
#include "hslab/checkpoint.hpp"
#include "hslab/constants.hpp"
#include "hslab/dimension.hpp"
#include "hslab/fiber.hpp"
#include "hslab/fields.hpp"
#include "hslab/grid.hpp"
#include "hslab/quadrature.hpp"
#include "hslab/solver.hpp"
