#pragma once

#include "fleet_hlc/artifacts.hpp"
#include "fleet_hlc/batch_ocp.hpp"
#include "fleet_hlc/bound_estimation.hpp"
#include "fleet_hlc/clustering.hpp"
#include "fleet_hlc/config.hpp"
#include "fleet_hlc/dynamics.hpp"
#include "fleet_hlc/edge_estimates.hpp"
#include "fleet_hlc/edge_map.hpp"
#include "fleet_hlc/errors.hpp"
#include "fleet_hlc/export.hpp"
#include "fleet_hlc/motion_controller.hpp"
#include "fleet_hlc/orchestrator.hpp"
#include "fleet_hlc/plan_tracking.hpp"
#include "fleet_hlc/rate_learning.hpp"
#include "fleet_hlc/rng.hpp"
#include "fleet_hlc/route_planner.hpp"
#include "fleet_hlc/safe_set_mpc.hpp"
#include "fleet_hlc/scenario.hpp"
#include "fleet_hlc/serialization.hpp"
#include "fleet_hlc/task_planner.hpp"
#include "fleet_hlc/upper_model.hpp"
