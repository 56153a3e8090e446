#pragma once

#include "glosa/config.hpp"
#include "glosa/csv.hpp"
#include "glosa/cubic.hpp"
#include "glosa/ddp.hpp"
#include "glosa/dddp.hpp"
#include "glosa/deterministic.hpp"
#include "glosa/escape.hpp"
#include "glosa/expected_cost.hpp"
#include "glosa/grid.hpp"
#include "glosa/mpc.hpp"
#include "glosa/prior.hpp"
#include "glosa/report.hpp"
#include "glosa/rng.hpp"
#include "glosa/scalar_opt.hpp"
#include "glosa/scenario.hpp"
#include "glosa/sdp.hpp"
#include "glosa/types.hpp"
