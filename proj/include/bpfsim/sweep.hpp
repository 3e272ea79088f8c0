#pragma once

#include <atomic>
#include <exception>
#include <fstream>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "bpfsim/config_io.hpp"
#include "bpfsim/results.hpp"
#include "bpfsim/scenario.hpp"
#include "bpfsim/simulation.hpp"

namespace bpfsim {

// Cartesian experiment grid over a shared base config. Every point keeps the
// base master_seed, so a given run_index sees identical vehicle trajectories
// and generation times under every protocol.
struct SweepSpec {
  ScenarioConfig base;
  std::vector<std::string> protocols = {"bpf", "weighted-p", "slotted-1", "slotted-p"};
  std::vector<double> densities;     // empty: keep the base node setup
  std::vector<int> source_counts;    // empty: keep the base source setup

  std::vector<ScenarioConfig> points() const {
    std::vector<ScenarioConfig> out;
    const std::vector<double> ds =
        densities.empty() ? std::vector<double>{base.effective_density_per_km()} : densities;
    const std::vector<int> ss =
        source_counts.empty() ? std::vector<int>{base.sources.count} : source_counts;
    for (double d : ds) {
      for (int s : ss) {
        for (const auto& proto : protocols) {
          ScenarioConfig cfg = base;
          if (!densities.empty()) {
            cfg.nodes.density_per_km = d;
            cfg.nodes.count.reset();     // the density axis defines the population
            cfg.nodes.positions.clear();
          }
          if (!source_counts.empty()) {
            cfg.sources.count = s;
            cfg.sources.ids.clear();
          }
          cfg.protocol.variant = parse_variant(proto);
          out.push_back(std::move(cfg));
        }
      }
    }
    return out;
  }

  void validate() const {
    if (protocols.empty()) throw ConfigError("sweep: protocols must be nonempty");
    for (const auto& p : protocols) parse_variant(p);  // throws on unknown names
    for (double d : densities)
      if (d <= 0) throw ConfigError("sweep: densities must be > 0");
    for (int s : source_counts)
      if (s < 0) throw ConfigError("sweep: source_counts must be >= 0");
    for (const auto& cfg : points()) cfg.validate();
  }
};

// JSON sweep file:
//   { "base": {"<config key>": value, ...},
//     "protocols": [...], "densities": [...], "source_counts": [...] }
// All sections optional; base values use the same dotted keys as config files.
inline SweepSpec parse_sweep_json(const nlohmann::json& j) {
  SweepSpec spec;
  if (!j.is_object()) throw ConfigError("sweep spec: top level must be a JSON object");
  for (const auto& [section, value] : j.items()) {
    if (section == "base") {
      if (!value.is_object()) throw ConfigError("sweep spec: base must be an object");
      for (const auto& [key, v] : value.items()) {
        const std::string s = v.is_string() ? v.get<std::string>()
                                            : nlohmann::json(v).dump();
        apply_config_value(spec.base, key, s);
      }
    } else if (section == "protocols") {
      spec.protocols = value.get<std::vector<std::string>>();
    } else if (section == "densities") {
      spec.densities = value.get<std::vector<double>>();
    } else if (section == "source_counts") {
      spec.source_counts = value.get<std::vector<int>>();
    } else {
      throw ConfigError("sweep spec: unknown section '" + section + "'");
    }
  }
  spec.validate();
  return spec;
}

inline SweepSpec load_sweep_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open sweep spec: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("sweep spec " + path + ": " + e.what());
  }
  return parse_sweep_json(j);
}

inline RunReport execute_run(const ScenarioConfig& cfg, std::uint32_t run_index) {
  Simulation sim(cfg, run_index);
  return sim.run();
}

// Executes every (point, run) pair, `jobs` at a time. Results land in
// deterministic (point, run_index) order no matter how execution interleaves;
// a failed run marks its point with an error and the rest of the sweep
// continues.
inline std::vector<SweepPointResult> run_sweep(const SweepSpec& spec, int jobs = 1) {
  const std::vector<ScenarioConfig> cfgs = spec.points();
  if (cfgs.empty()) throw ConfigError("sweep: no points to run");
  std::vector<SweepPointResult> results(cfgs.size());
  struct Task {
    std::size_t point;
    std::uint32_t run_index;
  };
  std::vector<Task> tasks;
  for (std::size_t i = 0; i < cfgs.size(); ++i) {
    results[i].config = cfgs[i];
    results[i].reports.resize(cfgs[i].runs);
    for (int r = 0; r < cfgs[i].runs; ++r)
      tasks.push_back({i, static_cast<std::uint32_t>(r)});
  }

  std::atomic<std::size_t> next{0};
  std::mutex error_mu;
  auto worker = [&] {
    for (;;) {
      const std::size_t t = next.fetch_add(1);
      if (t >= tasks.size()) return;
      const Task& task = tasks[t];
      try {
        results[task.point].reports[task.run_index] = execute_run(cfgs[task.point], task.run_index);
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(error_mu);
        if (results[task.point].error.empty()) results[task.point].error = e.what();
      }
    }
  };

  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(jobs);
    for (int i = 0; i < jobs; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (auto& pt : results)
    if (!pt.error.empty()) pt.reports.clear();
  return results;
}

}  // namespace bpfsim
