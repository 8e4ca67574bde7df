#pragma once

#include "slobench/actions.hpp"
#include "slobench/agents.hpp"
#include "slobench/dataset.hpp"
#include "slobench/environment.hpp"
#include "slobench/harness.hpp"
#include "slobench/metrics.hpp"
#include "slobench/report.hpp"
#include "slobench/runlog.hpp"
#include "slobench/scenario.hpp"
#include "slobench/slo.hpp"
#include "slobench/stats.hpp"
#include "slobench/synth.hpp"
#include "slobench/thermal.hpp"
