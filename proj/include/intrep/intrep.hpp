#pragma once

#include "intrep/rng.hpp"
#include "intrep/special_functions.hpp"
#include "intrep/quadrature.hpp"
#include "intrep/optimize.hpp"
#include "intrep/replication.hpp"
#include "intrep/matched_pairs.hpp"
#include "intrep/two_group.hpp"
#include "intrep/poisson_process.hpp"
#include "intrep/prop_hazards.hpp"
#include "intrep/regression_confsets.hpp"
#include "intrep/power_analysis.hpp"
