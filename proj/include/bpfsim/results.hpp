#pragma once

#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "bpfsim/config_io.hpp"
#include "bpfsim/metrics.hpp"
#include "bpfsim/scenario.hpp"

namespace bpfsim {

// aggregate rows are emitted per point in this fixed order
inline const std::vector<std::pair<std::string, std::optional<double> RunReport::*>>&
result_metrics() {
  static const std::vector<std::pair<std::string, std::optional<double> RunReport::*>> m = {
      {"pdr_percent", &RunReport::pdr_percent},
      {"mean_delay_s", &RunReport::mean_delay_s},
      {"mean_hops", &RunReport::mean_hops},
      {"replicas_per_delivered", &RunReport::replicas_per_delivered},
  };
  return m;
}

struct SweepPointResult {
  ScenarioConfig config;           // fully resolved for this point
  std::vector<RunReport> reports;  // run_index order; empty on error
  std::string error;               // nonempty marks a failed point

  std::string protocol() const { return to_string(config.protocol.variant); }
  double density() const { return config.effective_density_per_km(); }
  int sources() const {
    return config.sources.ids.empty() ? config.sources.count
                                      : static_cast<int>(config.sources.ids.size());
  }
};

namespace detail {

inline std::optional<double> count_metric(const RunReport& r, const std::string& name) {
  if (name == "total_transmissions") return static_cast<double>(r.total_transmissions);
  if (name == "mac_drops") return static_cast<double>(r.mac_drops);
  return std::nullopt;
}

inline std::vector<std::pair<std::string, MetricAggregate>> aggregate_point(
    const SweepPointResult& pt) {
  std::vector<std::pair<std::string, MetricAggregate>> rows;
  for (const auto& [name, member] : result_metrics()) {
    std::vector<std::optional<double>> vals;
    vals.reserve(pt.reports.size());
    for (const auto& r : pt.reports) vals.push_back(r.*member);
    rows.emplace_back(name, aggregate_metric(vals));
  }
  for (const char* name : {"total_transmissions", "mac_drops"}) {
    std::vector<std::optional<double>> vals;
    vals.reserve(pt.reports.size());
    for (const auto& r : pt.reports) vals.push_back(count_metric(r, name));
    rows.emplace_back(name, aggregate_metric(vals));
  }
  return rows;
}

}  // namespace detail

// CSV: provenance comment lines, a fixed header, then one row per
// (point, metric). Identical inputs yield identical bytes.
inline std::string results_to_csv(const std::vector<SweepPointResult>& points,
                                  const ScenarioConfig& echo_config) {
  std::string out;
  out += "# ";
  out += kVersion;
  out += "\n";
  for (const auto& [key, value] : config_entries(echo_config))
    out += "# " + key + " = " + value + "\n";
  out += "protocol,density_nodes_per_km,sources,metric,mean,ci95_halfwidth,runs\n";
  for (const auto& pt : points) {
    const std::string prefix = pt.protocol() + "," + format_double(pt.density()) + "," +
                               std::to_string(pt.sources()) + ",";
    if (!pt.error.empty()) {
      out += prefix + "error,,,0\n";
      continue;
    }
    for (const auto& [name, agg] : detail::aggregate_point(pt)) {
      out += prefix + name + ",";
      if (agg.n > 0) out += format_double(agg.mean);
      out += ",";
      if (agg.ci95_halfwidth) out += format_double(*agg.ci95_halfwidth);
      out += "," + std::to_string(agg.n) + "\n";
    }
  }
  return out;
}

inline nlohmann::ordered_json config_to_json(const ScenarioConfig& cfg) {
  nlohmann::ordered_json j;
  for (const auto& [key, value] : config_entries(cfg)) j[key] = value;
  return j;
}

inline nlohmann::ordered_json run_report_to_json(const RunReport& r) {
  nlohmann::ordered_json j;
  j["run_index"] = r.run_index;
  j["generated"] = r.generated;
  j["delivered"] = r.delivered;
  j["replicas"] = r.replicas;
  j["total_transmissions"] = r.total_transmissions;
  j["mac_drops"] = r.mac_drops;
  auto opt = [](const std::optional<double>& v) {
    return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
  };
  j["pdr_percent"] = opt(r.pdr_percent);
  j["mean_delay_s"] = opt(r.mean_delay_s);
  j["mean_hops"] = opt(r.mean_hops);
  j["replicas_per_delivered"] = opt(r.replicas_per_delivered);
  return j;
}

// JSON: full per-run detail plus the same aggregates the CSV carries
inline nlohmann::ordered_json results_to_json(const std::vector<SweepPointResult>& points,
                                              const ScenarioConfig& echo_config) {
  nlohmann::ordered_json doc;
  doc["version"] = kVersion;
  doc["config"] = config_to_json(echo_config);
  doc["results"] = nlohmann::ordered_json::array();
  for (const auto& pt : points) {
    nlohmann::ordered_json p;
    p["protocol"] = pt.protocol();
    p["density_nodes_per_km"] = pt.density();
    p["sources"] = pt.sources();
    p["config"] = config_to_json(pt.config);
    if (!pt.error.empty()) {
      p["error"] = pt.error;
    } else {
      nlohmann::ordered_json aggs;
      for (const auto& [name, agg] : detail::aggregate_point(pt)) {
        nlohmann::ordered_json a;
        a["mean"] = agg.n > 0 ? nlohmann::ordered_json(agg.mean) : nlohmann::ordered_json(nullptr);
        a["ci95_halfwidth"] = agg.ci95_halfwidth ? nlohmann::ordered_json(*agg.ci95_halfwidth)
                                                 : nlohmann::ordered_json(nullptr);
        a["runs"] = agg.n;
        aggs[name] = std::move(a);
      }
      p["aggregates"] = std::move(aggs);
      p["run_reports"] = nlohmann::ordered_json::array();
      for (const auto& r : pt.reports) p["run_reports"].push_back(run_report_to_json(r));
    }
    doc["results"].push_back(std::move(p));
  }
  return doc;
}

inline void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write output file: " + path);
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path);
}

// format chosen by extension: .json emits the JSON document, anything else CSV
inline void write_results(const std::string& path, const std::vector<SweepPointResult>& points,
                          const ScenarioConfig& echo_config) {
  if (path.size() >= 5 && path.substr(path.size() - 5) == ".json") {
    write_text_file(path, results_to_json(points, echo_config).dump(2) + "\n");
  } else {
    write_text_file(path, results_to_csv(points, echo_config));
  }
}

}  // namespace bpfsim
