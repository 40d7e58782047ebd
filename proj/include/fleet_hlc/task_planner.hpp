#pragma once

#include "fleet_hlc/clustering.hpp"
#include "fleet_hlc/edge_estimates.hpp"
#include "fleet_hlc/plan_tracking.hpp"
#include "fleet_hlc/route_planner.hpp"
#include "fleet_hlc/upper_model.hpp"
