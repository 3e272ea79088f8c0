// Command-line front end: single-scenario runs, experiment sweeps, and
// per-event debugging traces.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include <nlohmann/json.hpp>

#include "bpfsim/bpfsim.hpp"

namespace {

struct SimulateArgs {
  std::string config_path;
  std::optional<std::string> protocol;
  std::optional<double> density;
  std::optional<int> runs;
  std::optional<std::uint64_t> seed;
  std::string out_path;
};

bpfsim::ScenarioConfig resolve_config(const SimulateArgs& args) {
  bpfsim::ScenarioConfig cfg = bpfsim::load_config_file(args.config_path);
  if (args.protocol) cfg.protocol.variant = bpfsim::parse_variant(*args.protocol);
  if (args.density) {
    cfg.nodes.density_per_km = *args.density;
    cfg.nodes.count.reset();
    cfg.nodes.positions.clear();
  }
  if (args.runs) cfg.runs = *args.runs;
  if (args.seed) cfg.master_seed = *args.seed;
  cfg.validate();
  return cfg;
}

int cmd_simulate(const SimulateArgs& args) {
  const bpfsim::ScenarioConfig cfg = resolve_config(args);
  bpfsim::SweepPointResult point;
  point.config = cfg;
  point.reports.reserve(cfg.runs);
  for (int r = 0; r < cfg.runs; ++r)
    point.reports.push_back(bpfsim::execute_run(cfg, static_cast<std::uint32_t>(r)));
  bpfsim::write_results(args.out_path, {point}, cfg);
  std::cerr << "wrote " << args.out_path << " (" << cfg.runs << " runs)\n";
  return 0;
}

int cmd_sweep(const std::string& spec_path, const std::string& out_path, int jobs) {
  const bpfsim::SweepSpec spec = bpfsim::load_sweep_file(spec_path);
  const auto results = bpfsim::run_sweep(spec, jobs);
  bpfsim::write_results(out_path, results, spec.base);
  int failed = 0;
  for (const auto& pt : results)
    if (!pt.error.empty()) ++failed;
  std::cerr << "wrote " << out_path << " (" << results.size() << " points";
  if (failed > 0) std::cerr << ", " << failed << " failed";
  std::cerr << ")\n";
  return failed > 0 ? 1 : 0;
}

int cmd_trace(const std::string& config_path, std::uint32_t run_index,
              const std::string& out_path, const std::string& positions_path) {
  bpfsim::ScenarioConfig cfg = bpfsim::load_config_file(config_path);
  cfg.validate();
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write output file: " + out_path);

  bpfsim::Simulation sim(cfg, run_index);
  sim.set_trace([&out](const bpfsim::TraceEvent& ev) {
    const bpfsim::PacketKey key = bpfsim::PacketKey::unpack(ev.packet);
    nlohmann::ordered_json line;
    line["t_us"] = ev.t_us;
    line["kind"] = ev.kind;
    line["node"] = ev.node;
    line["packet"] = std::to_string(key.origin) + ":" + std::to_string(key.sequence);
    line["detail"] = ev.detail;
    out << line.dump() << "\n";
  });
  const bpfsim::RunReport report = sim.run();
  out.flush();
  if (!out) throw std::runtime_error("write failed: " + out_path);

  if (!positions_path.empty()) {
    std::ofstream pos(positions_path, std::ios::binary);
    if (!pos) throw std::runtime_error("cannot write output file: " + positions_path);
    pos << "time_s,node_id,x_m,y_m\n";
    bpfsim::Mobility mob = bpfsim::make_scenario_mobility(cfg, run_index);
    const auto total_s =
        static_cast<std::int64_t>(cfg.sim.duration_s + cfg.sim.drain_s);
    for (std::int64_t t = 0; t <= total_s; ++t) {
      for (int id = 0; id < mob.node_count(); ++id) {
        const bpfsim::Vec2 p =
            mob.position_at(static_cast<std::uint32_t>(id), t * bpfsim::kMicrosPerSecond);
        pos << t << "," << id << "," << bpfsim::format_double(p.x) << ","
            << bpfsim::format_double(p.y) << "\n";
      }
    }
    if (!pos) throw std::runtime_error("write failed: " + positions_path);
  }

  std::cerr << "run " << run_index << ": generated=" << report.generated
            << " delivered=" << report.delivered << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"deterministic VANET data-gathering simulator"};
  app.require_subcommand(1);
  app.set_version_flag("--version", bpfsim::kVersion);

  SimulateArgs sim_args;
  auto* simulate = app.add_subcommand("simulate", "run one scenario and write results");
  simulate->add_option("--config", sim_args.config_path, "scenario config file")->required();
  simulate->add_option("--protocol", sim_args.protocol,
                       "override protocol: bpf | weighted-p | slotted-1 | slotted-p");
  simulate->add_option("--density", sim_args.density, "override nodes.density_per_km");
  simulate->add_option("--runs", sim_args.runs, "override run count");
  simulate->add_option("--seed", sim_args.seed, "override master seed");
  simulate->add_option("--out", sim_args.out_path, "output path (.json for JSON, else CSV)")
      ->required();

  std::string spec_path, sweep_out;
  int jobs = 1;
  auto* sweep = app.add_subcommand("sweep", "run an experiment grid from a JSON spec");
  sweep->add_option("--spec", spec_path, "sweep spec JSON file")->required();
  sweep->add_option("--out", sweep_out, "output path (.json for JSON, else CSV)")->required();
  sweep->add_option("--jobs", jobs, "concurrent runs")->check(CLI::PositiveNumber);

  std::string trace_config, trace_out, positions_out;
  std::uint32_t run_index = 0;
  auto* trace = app.add_subcommand("trace", "write a per-event JSON-lines trace of one run");
  trace->add_option("--config", trace_config, "scenario config file")->required();
  trace->add_option("--run-index", run_index, "which run to trace")->required();
  trace->add_option("--out", trace_out, "trace output path")->required();
  trace->add_option("--positions-out", positions_out,
                    "also write per-second node positions CSV (time_s,node_id,x_m,y_m)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (simulate->parsed()) return cmd_simulate(sim_args);
    if (sweep->parsed()) return cmd_sweep(spec_path, sweep_out, jobs);
    if (trace->parsed()) return cmd_trace(trace_config, run_index, trace_out, positions_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
