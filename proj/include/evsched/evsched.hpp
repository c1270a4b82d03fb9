#pragma once

// Umbrella header for the scheduling toolkit.

#include "evsched/bcp.hpp"
#include "evsched/bcp_exact.hpp"
#include "evsched/config.hpp"
#include "evsched/csv.hpp"
#include "evsched/dac.hpp"
#include "evsched/error.hpp"
#include "evsched/generator.hpp"
#include "evsched/greedy.hpp"
#include "evsched/gtfs.hpp"
#include "evsched/json_io.hpp"
#include "evsched/kl.hpp"
#include "evsched/lp_writer.hpp"
#include "evsched/matching.hpp"
#include "evsched/metrics.hpp"
#include "evsched/min_cost_flow.hpp"
#include "evsched/schedule_data.hpp"
#include "evsched/sdvsp.hpp"
#include "evsched/units.hpp"
#include "evsched/validate.hpp"
