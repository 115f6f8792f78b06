#pragma once

#include "crowd/error.hpp"
#include "crowd/random.hpp"
#include "crowd/bytes.hpp"
#include "crowd/decision.hpp"
#include "crowd/fleet.hpp"
#include "crowd/scheduler.hpp"
#include "crowd/checkpoint.hpp"
#include "crowd/workloads.hpp"
#include "crowd/transport.hpp"
#include "crowd/metrics.hpp"
#include "crowd/coordinator.hpp"
#include "crowd/simulation.hpp"
#include "crowd/tcp.hpp"
#include "crowd/harness.hpp"
