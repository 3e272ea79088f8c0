#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "bpfsim/scenario.hpp"

namespace bpfsim {

// shortest round-trip formatting keeps emitted files byte-stable
inline std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return {buf, end};
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline double parse_double(const std::string& key, std::string_view v) {
  double out{};
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || p != v.data() + v.size())
    throw ConfigError("config key " + key + ": expected a number, got '" + std::string(v) + "'");
  return out;
}

template <class Int>
inline Int parse_int(const std::string& key, std::string_view v) {
  Int out{};
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || p != v.data() + v.size())
    throw ConfigError("config key " + key + ": expected an integer, got '" + std::string(v) + "'");
  return out;
}

inline bool parse_bool(const std::string& key, std::string_view v) {
  if (v == "true") return true;
  if (v == "false") return false;
  throw ConfigError("config key " + key + ": expected true or false, got '" + std::string(v) + "'");
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (start <= s.size()) {
    const std::size_t pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      parts.push_back(trim(s.substr(start)));
      break;
    }
    parts.push_back(trim(s.substr(start, pos - start)));
    start = pos + 1;
  }
  if (!parts.empty() && parts.back().empty()) parts.pop_back();
  return parts;
}

}  // namespace detail

// One entry per configurable field; the same table drives parsing and the
// provenance echo written into every output file.
struct ConfigKey {
  std::string name;
  std::function<void(ScenarioConfig&, const std::string&)> set;
  std::function<std::string(const ScenarioConfig&)> get;
  std::function<bool(const ScenarioConfig&)> present = nullptr;  // echo filter
};

inline const std::vector<ConfigKey>& config_keys() {
  auto dbl = [](const char* name, auto accessor) {
    return ConfigKey{
        name,
        [name, accessor](ScenarioConfig& c, const std::string& v) {
          accessor(c) = detail::parse_double(name, v);
        },
        [accessor](const ScenarioConfig& c) {
          return format_double(accessor(const_cast<ScenarioConfig&>(c)));
        }};
  };
  auto integer = [](const char* name, auto accessor) {
    using T = std::remove_reference_t<decltype(accessor(std::declval<ScenarioConfig&>()))>;
    return ConfigKey{
        name,
        [name, accessor](ScenarioConfig& c, const std::string& v) {
          accessor(c) = detail::parse_int<T>(name, v);
        },
        [accessor](const ScenarioConfig& c) {
          return std::to_string(accessor(const_cast<ScenarioConfig&>(c)));
        }};
  };
  auto boolean = [](const char* name, auto accessor) {
    return ConfigKey{
        name,
        [name, accessor](ScenarioConfig& c, const std::string& v) {
          accessor(c) = detail::parse_bool(name, v);
        },
        [accessor](const ScenarioConfig& c) {
          return accessor(const_cast<ScenarioConfig&>(c)) ? "true" : "false";
        }};
  };

  static const std::vector<ConfigKey> keys = [&] {
    std::vector<ConfigKey> k;
    k.push_back(integer("grid.blocks_x", [](ScenarioConfig& c) -> int& { return c.grid.blocks_x; }));
    k.push_back(integer("grid.blocks_y", [](ScenarioConfig& c) -> int& { return c.grid.blocks_y; }));
    k.push_back(dbl("grid.block_m", [](ScenarioConfig& c) -> double& { return c.grid.block_m; }));

    k.push_back(dbl("nodes.density_per_km",
                    [](ScenarioConfig& c) -> double& { return c.nodes.density_per_km; }));
    k.push_back(ConfigKey{
        "nodes.count",
        [](ScenarioConfig& c, const std::string& v) {
          c.nodes.count = detail::parse_int<int>("nodes.count", v);
        },
        [](const ScenarioConfig& c) { return std::to_string(*c.nodes.count); },
        [](const ScenarioConfig& c) { return c.nodes.count.has_value(); }});
    k.push_back(boolean("nodes.static_nodes",
                        [](ScenarioConfig& c) -> bool& { return c.nodes.static_nodes; }));
    k.push_back(ConfigKey{
        "nodes.positions",
        [](ScenarioConfig& c, const std::string& v) {
          c.nodes.positions.clear();
          for (auto part : detail::split(v, ';')) {
            if (part.empty()) continue;
            const auto xy = detail::split(part, ',');
            if (xy.size() != 2)
              throw ConfigError("config key nodes.positions: expected 'x,y; x,y; ...'");
            c.nodes.positions.push_back({detail::parse_double("nodes.positions", xy[0]),
                                         detail::parse_double("nodes.positions", xy[1])});
          }
        },
        [](const ScenarioConfig& c) {
          std::string out;
          for (const auto& p : c.nodes.positions) {
            if (!out.empty()) out += "; ";
            out += format_double(p.x) + "," + format_double(p.y);
          }
          return out;
        },
        [](const ScenarioConfig& c) { return !c.nodes.positions.empty(); }});

    k.push_back(dbl("sink.x", [](ScenarioConfig& c) -> double& { return c.sink.x; }));
    k.push_back(dbl("sink.y", [](ScenarioConfig& c) -> double& { return c.sink.y; }));

    k.push_back(integer("sources.count", [](ScenarioConfig& c) -> int& { return c.sources.count; }));
    k.push_back(ConfigKey{
        "sources.ids",
        [](ScenarioConfig& c, const std::string& v) {
          c.sources.ids.clear();
          for (auto part : detail::split(v, ','))
            if (!part.empty())
              c.sources.ids.push_back(detail::parse_int<std::uint32_t>("sources.ids", part));
        },
        [](const ScenarioConfig& c) {
          std::string out;
          for (auto id : c.sources.ids) {
            if (!out.empty()) out += ",";
            out += std::to_string(id);
          }
          return out;
        },
        [](const ScenarioConfig& c) { return !c.sources.ids.empty(); }});

    k.push_back(dbl("app.rate_pps", [](ScenarioConfig& c) -> double& { return c.app.rate_pps; }));
    k.push_back(integer("app.payload_bytes",
                        [](ScenarioConfig& c) -> int& { return c.app.payload_bytes; }));
    k.push_back(ConfigKey{
        "app.phase",
        [](ScenarioConfig& c, const std::string& v) { c.app.phase = v; },
        [](const ScenarioConfig& c) { return c.app.phase; }});

    k.push_back(dbl("sim.duration_s", [](ScenarioConfig& c) -> double& { return c.sim.duration_s; }));
    k.push_back(dbl("sim.drain_s", [](ScenarioConfig& c) -> double& { return c.sim.drain_s; }));
    k.push_back(dbl("sim.cache_expiry_s",
                    [](ScenarioConfig& c) -> double& { return c.sim.cache_expiry_s; }));

    k.push_back(ConfigKey{
        "protocol.variant",
        [](ScenarioConfig& c, const std::string& v) {
          try {
            c.protocol.variant = parse_variant(v);
          } catch (const std::invalid_argument& e) {
            throw ConfigError(std::string("config key protocol.variant: ") + e.what());
          }
        },
        [](const ScenarioConfig& c) { return to_string(c.protocol.variant); }});
    k.push_back(dbl("protocol.c1_weight",
                    [](ScenarioConfig& c) -> double& { return c.protocol.c1_weight; }));
    k.push_back(dbl("protocol.p", [](ScenarioConfig& c) -> double& { return c.protocol.p; }));
    k.push_back(dbl("protocol.range_m",
                    [](ScenarioConfig& c) -> double& { return c.protocol.range_m; }));
    k.push_back(integer("protocol.wait_time_us",
                        [](ScenarioConfig& c) -> SimTime& { return c.protocol.wait_time_us; }));
    k.push_back(integer("protocol.backoff_scale_us",
                        [](ScenarioConfig& c) -> SimTime& { return c.protocol.backoff_scale_us; }));
    k.push_back(integer("protocol.slots", [](ScenarioConfig& c) -> int& { return c.protocol.slots; }));
    k.push_back(integer("protocol.tau_us",
                        [](ScenarioConfig& c) -> SimTime& { return c.protocol.tau_us; }));
    k.push_back(boolean("protocol.wp_uses_wait_time",
                        [](ScenarioConfig& c) -> bool& { return c.protocol.wp_uses_wait_time; }));
    k.push_back(boolean("protocol.slotted_uses_wait_time",
                        [](ScenarioConfig& c) -> bool& { return c.protocol.slotted_uses_wait_time; }));

    k.push_back(dbl("channel.nakagami_m",
                    [](ScenarioConfig& c) -> double& { return c.channel.nakagami_m; }));
    k.push_back(dbl("channel.pathloss_exponent",
                    [](ScenarioConfig& c) -> double& { return c.channel.pathloss_exponent; }));
    k.push_back(dbl("channel.reference_distance_m",
                    [](ScenarioConfig& c) -> double& { return c.channel.reference_distance_m; }));
    k.push_back(integer("channel.data_rate_bps",
                        [](ScenarioConfig& c) -> std::int64_t& { return c.channel.data_rate_bps; }));
    k.push_back(dbl("channel.range_m",
                    [](ScenarioConfig& c) -> double& { return c.channel.range_m; }));
    k.push_back(dbl("channel.sense_margin_db",
                    [](ScenarioConfig& c) -> double& { return c.channel.sense_margin_db; }));
    k.push_back(integer("channel.phy_overhead_us",
                        [](ScenarioConfig& c) -> SimTime& { return c.channel.phy_overhead_us; }));
    k.push_back(boolean("channel.deterministic",
                        [](ScenarioConfig& c) -> bool& { return c.channel.deterministic; }));

    k.push_back(integer("mac.cw_slots", [](ScenarioConfig& c) -> int& { return c.mac.cw_slots; }));
    k.push_back(integer("mac.slot_us", [](ScenarioConfig& c) -> SimTime& { return c.mac.slot_us; }));
    k.push_back(integer("mac.queue_limit",
                        [](ScenarioConfig& c) -> int& { return c.mac.queue_limit; }));

    k.push_back(integer("master_seed",
                        [](ScenarioConfig& c) -> std::uint64_t& { return c.master_seed; }));
    k.push_back(integer("runs", [](ScenarioConfig& c) -> int& { return c.runs; }));
    return k;
  }();
  return keys;
}

inline void apply_config_value(ScenarioConfig& cfg, const std::string& key,
                               const std::string& value) {
  for (const auto& k : config_keys()) {
    if (k.name == key) {
      k.set(cfg, value);
      return;
    }
  }
  throw ConfigError("unknown config key: " + key);
}

// canonical (key, value) listing for provenance echo; optional fields appear
// only when set
inline std::vector<std::pair<std::string, std::string>> config_entries(const ScenarioConfig& cfg) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& k : config_keys()) {
    if (k.present && !k.present(cfg)) continue;
    out.emplace_back(k.name, k.get(cfg));
  }
  return out;
}

inline ScenarioConfig parse_config_text(const std::string& text) {
  ScenarioConfig cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view s = line;
    if (const auto hash = s.find('#'); hash != std::string_view::npos) s = s.substr(0, hash);
    s = detail::trim(s);
    if (s.empty()) continue;
    const auto eq = s.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError("config line " + std::to_string(lineno) + ": expected 'key = value'");
    const std::string key{detail::trim(s.substr(0, eq))};
    const std::string value{detail::trim(s.substr(eq + 1))};
    if (key.empty())
      throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
    apply_config_value(cfg, key, value);
  }
  return cfg;
}

inline ScenarioConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

}  // namespace bpfsim
