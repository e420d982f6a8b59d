#pragma once

// Umbrella header for the quadrature library.

#include "ncq/adaptive.hpp"
#include "ncq/error.hpp"
#include "ncq/expr.hpp"
#include "ncq/jet.hpp"
#include "ncq/rules.hpp"
#include "ncq/summation.hpp"
#include "ncq/verification.hpp"
