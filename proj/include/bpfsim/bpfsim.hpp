#pragma once

// Umbrella header: deterministic discrete-event simulator for many-to-one
// data gathering over an urban vehicular grid, with a backoff-based
// geographic forwarding protocol and three broadcast-suppression baselines.

#include "bpfsim/channel.hpp"
#include "bpfsim/config_io.hpp"
#include "bpfsim/event_queue.hpp"
#include "bpfsim/metrics.hpp"
#include "bpfsim/mobility.hpp"
#include "bpfsim/packet.hpp"
#include "bpfsim/protocol.hpp"
#include "bpfsim/results.hpp"
#include "bpfsim/rng.hpp"
#include "bpfsim/road_grid.hpp"
#include "bpfsim/scenario.hpp"
#include "bpfsim/sim_time.hpp"
#include "bpfsim/simulation.hpp"
#include "bpfsim/stats.hpp"
#include "bpfsim/sweep.hpp"
#include "bpfsim/vec2.hpp"
