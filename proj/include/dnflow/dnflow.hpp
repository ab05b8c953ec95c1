#pragma once

#include "dnflow/barenblatt.hpp"
#include "dnflow/bundle.hpp"
#include "dnflow/config.hpp"
#include "dnflow/errors.hpp"
#include "dnflow/experiments.hpp"
#include "dnflow/fit.hpp"
#include "dnflow/inequalities.hpp"
#include "dnflow/monotone_table.hpp"
#include "dnflow/profiles.hpp"
#include "dnflow/quadrature.hpp"
#include "dnflow/rearrange.hpp"
#include "dnflow/solver.hpp"
#include "dnflow/theory.hpp"
