#ifndef RACKPLAN_RACKPLAN_HPP
#define RACKPLAN_RACKPLAN_HPP

#include "rackplan/action.hpp"
#include "rackplan/anomaly.hpp"
#include "rackplan/designator.hpp"
#include "rackplan/error.hpp"
#include "rackplan/goal.hpp"
#include "rackplan/model.hpp"
#include "rackplan/planner.hpp"
#include "rackplan/random.hpp"
#include "rackplan/report.hpp"
#include "rackplan/resolve.hpp"
#include "rackplan/scenario.hpp"
#include "rackplan/sexpr.hpp"
#include "rackplan/simulator.hpp"
#include "rackplan/state_codec.hpp"

#endif  // RACKPLAN_RACKPLAN_HPP
