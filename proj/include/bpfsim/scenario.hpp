#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "bpfsim/channel.hpp"
#include "bpfsim/mobility.hpp"
#include "bpfsim/protocol.hpp"
#include "bpfsim/road_grid.hpp"
#include "bpfsim/vec2.hpp"

namespace bpfsim {

inline constexpr const char* kVersion = "bpfsim 1.0.0";

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct GridConfig {
  int blocks_x = 4;
  int blocks_y = 4;
  double block_m = 625.0;
};

struct NodeConfig {
  double density_per_km = 9.6;      // vehicles per km of road; sink extra
  std::optional<int> count;         // explicit total (incl. sink), overrides density
  bool static_nodes = false;        // freeze all vehicles at initial positions
  std::vector<Vec2> positions;      // explicit layout (last = sink), overrides count
};

struct SourceConfig {
  int count = 8;
  std::vector<std::uint32_t> ids;   // explicit source ids, overrides max-spread
};

struct AppConfig {
  double rate_pps = 5.0;
  int payload_bytes = 512;
  std::string phase = "random";     // random: per-source start offset in [0,1/rate); zero: all at t=0
};

struct MacConfig {
  int cw_slots = 16;                // contention slots drawn uniform over [0, cw_slots)
  SimTime slot_us = 13;
  int queue_limit = 64;
};

struct SimConfig {
  double duration_s = 200.0;        // generation window
  double drain_s = 10.0;            // silent tail so in-flight packets can land
  double cache_expiry_s = 10.0;     // duplicate-cache entry lifetime
};

struct ScenarioConfig {
  GridConfig grid;
  NodeConfig nodes;
  Vec2 sink{1250.0, 1250.0};
  SourceConfig sources;
  AppConfig app;
  SimConfig sim;
  ProtocolConfig protocol;
  ChannelConfig channel;
  MacConfig mac;
  std::uint64_t master_seed = 1;
  int runs = 10;

  RoadGrid make_grid() const { return {grid.blocks_x, grid.blocks_y, grid.block_m}; }

  int node_count() const {
    if (!nodes.positions.empty()) return static_cast<int>(nodes.positions.size());
    if (nodes.count) return *nodes.count;
    const double road_km = make_grid().total_road_length_m() / 1000.0;
    return static_cast<int>(std::llround(nodes.density_per_km * road_km)) + 1;
  }

  // density actually realized; equals the configured one when derived from it
  double effective_density_per_km() const {
    const double road_km = make_grid().total_road_length_m() / 1000.0;
    return (node_count() - 1) / road_km;
  }

  void validate() const {
    if (grid.blocks_x < 1 || grid.blocks_y < 1) throw ConfigError("grid.blocks_x/blocks_y must be >= 1");
    if (grid.block_m <= 0) throw ConfigError("grid.block_m must be > 0");
    if (nodes.positions.empty() && !nodes.count && nodes.density_per_km <= 0)
      throw ConfigError("nodes.density_per_km must be > 0");
    if (nodes.count && *nodes.count < 1) throw ConfigError("nodes.count must be >= 1");
    const int n = node_count();
    if (n < 1) throw ConfigError("nodes: need at least the sink node");
    if (sources.count < 0) throw ConfigError("sources.count must be >= 0");
    if (sources.ids.empty() && sources.count > n - 1)
      throw ConfigError("sources.count must be <= nodes - 1");
    for (auto id : sources.ids)
      if (id >= static_cast<std::uint32_t>(n - 1))
        throw ConfigError("sources.ids contains a non-vehicle id");
    if (app.rate_pps <= 0) throw ConfigError("app.rate_pps must be > 0");
    if (app.payload_bytes < 1) throw ConfigError("app.payload_bytes must be >= 1");
    if (app.phase != "random" && app.phase != "zero")
      throw ConfigError("app.phase must be random or zero");
    if (mac.cw_slots < 1) throw ConfigError("mac.cw_slots must be >= 1");
    if (mac.slot_us < 1) throw ConfigError("mac.slot_us must be >= 1");
    if (mac.queue_limit < 1) throw ConfigError("mac.queue_limit must be >= 1");
    if (sim.duration_s < 0) throw ConfigError("sim.duration_s must be >= 0");
    if (sim.drain_s < 0) throw ConfigError("sim.drain_s must be >= 0");
    if (sim.cache_expiry_s <= 0) throw ConfigError("sim.cache_expiry_s must be > 0");
    if (runs < 1) throw ConfigError("runs must be >= 1");
    try {
      protocol.validate();
      Channel probe(channel);  // channel invariants checked on construction
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }
};

// Greedy farthest-point source selection over the run's initial vehicle
// positions: start from the vehicle farthest from the sink, then repeatedly
// add the vehicle maximizing the minimum distance to the chosen set. Ties go
// to the lower id, so selection is deterministic.
inline std::vector<std::uint32_t> select_sources_max_spread(const std::vector<Vec2>& vehicle_pos,
                                                            const Vec2& sink_pos, int count) {
  const int n = static_cast<int>(vehicle_pos.size());
  if (count > n) throw ConfigError("sources.count must be <= nodes - 1");
  std::vector<std::uint32_t> chosen;
  if (count == 0) return chosen;
  std::vector<double> min_d(n, std::numeric_limits<double>::infinity());
  int best = 0;
  double best_d = -1;
  for (int i = 0; i < n; ++i) {
    const double d = distance_sq(vehicle_pos[i], sink_pos);
    if (d > best_d) {
      best_d = d;
      best = i;
    }
  }
  chosen.push_back(static_cast<std::uint32_t>(best));
  while (static_cast<int>(chosen.size()) < count) {
    for (int i = 0; i < n; ++i)
      min_d[i] = std::min(min_d[i], distance_sq(vehicle_pos[i], vehicle_pos[chosen.back()]));
    best = -1;
    best_d = -1;
    for (int i = 0; i < n; ++i) {
      if (min_d[i] == 0) continue;  // already chosen (distance to itself)
      if (min_d[i] > best_d) {
        best_d = min_d[i];
        best = i;
      }
    }
    if (best < 0) break;  // fewer distinct positions than requested sources
    chosen.push_back(static_cast<std::uint32_t>(best));
  }
  if (static_cast<int>(chosen.size()) < count)
    throw ConfigError("sources.count exceeds distinct vehicle positions");
  return chosen;
}

}  // namespace bpfsim
