#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "bpfsim/packet.hpp"
#include "bpfsim/sim_time.hpp"
#include "bpfsim/stats.hpp"

namespace bpfsim {

struct PacketRecord {
  SimTime created_at = 0;
  std::optional<SimTime> first_delivery_at;
  std::optional<std::uint32_t> hops_at_first_delivery;
  std::uint32_t replica_count = 0;
  std::uint32_t transmissions = 0;
};

struct RunReport {
  std::uint32_t run_index = 0;
  std::uint64_t generated = 0;
  std::uint64_t delivered = 0;  // unique packets reaching the sink
  std::uint64_t replicas = 0;
  std::uint64_t total_transmissions = 0;
  std::uint64_t mac_drops = 0;
  std::optional<double> pdr_percent;            // null when nothing generated
  std::optional<double> mean_delay_s;           // over first copies; null when none delivered
  std::optional<double> mean_hops;
  std::optional<double> replicas_per_delivered;
};

// Per-run measurement sink. The sink node's delivery history lives here, so
// first-copy vs. replica classification survives for the whole run.
class MetricsCollector {
 public:
  void record_generation(PacketKey key, SimTime t) {
    auto [it, inserted] = packets_.try_emplace(key);
    if (!inserted) throw std::logic_error("duplicate packet generation");
    it->second.created_at = t;
  }

  void record_transmission(PacketKey key) {
    ++total_transmissions_;
    auto it = packets_.find(key);
    if (it == packets_.end()) throw std::logic_error("transmission for unknown packet");
    ++it->second.transmissions;
  }

  // returns true for the first copy of a packet at the sink
  bool record_delivery(PacketKey key, SimTime t, std::uint32_t hops) {
    auto it = packets_.find(key);
    if (it == packets_.end()) throw std::logic_error("delivery for unknown packet");
    PacketRecord& rec = it->second;
    if (!rec.first_delivery_at) {
      rec.first_delivery_at = t;
      rec.hops_at_first_delivery = hops;
      return true;
    }
    ++rec.replica_count;
    return false;
  }

  void record_mac_drop() { ++mac_drops_; }

  const std::unordered_map<PacketKey, PacketRecord, PacketKeyHash>& packets() const {
    return packets_;
  }

  RunReport report(std::uint32_t run_index) const {
    RunReport r;
    r.run_index = run_index;
    r.generated = packets_.size();
    r.total_transmissions = total_transmissions_;
    r.mac_drops = mac_drops_;
    double delay_sum = 0;
    double hops_sum = 0;
    for (const auto& [key, rec] : packets_) {
      if (!rec.first_delivery_at) continue;
      ++r.delivered;
      r.replicas += rec.replica_count;
      delay_sum += seconds(*rec.first_delivery_at - rec.created_at);
      hops_sum += *rec.hops_at_first_delivery;
    }
    if (r.generated > 0)
      r.pdr_percent = 100.0 * static_cast<double>(r.delivered) / static_cast<double>(r.generated);
    if (r.delivered > 0) {
      const auto n = static_cast<double>(r.delivered);
      r.mean_delay_s = delay_sum / n;
      r.mean_hops = hops_sum / n;
      r.replicas_per_delivered = static_cast<double>(r.replicas) / n;
    }
    return r;
  }

 private:
  std::unordered_map<PacketKey, PacketRecord, PacketKeyHash> packets_;
  std::uint64_t total_transmissions_ = 0;
  std::uint64_t mac_drops_ = 0;
};

// Cross-run aggregation of one metric: mean and 95% half-width over the runs
// where the metric was defined.
struct MetricAggregate {
  double mean = 0;
  std::optional<double> ci95_halfwidth;
  int n = 0;  // runs contributing a value
};

inline MetricAggregate aggregate_metric(const std::vector<std::optional<double>>& values) {
  std::vector<double> xs;
  xs.reserve(values.size());
  for (const auto& v : values)
    if (v) xs.push_back(*v);
  MetricAggregate out;
  out.n = static_cast<int>(xs.size());
  if (xs.empty()) return out;
  const CiStats ci = mean_ci95(xs);
  out.mean = ci.mean;
  out.ci95_halfwidth = ci.ci95_halfwidth;
  return out;
}

}  // namespace bpfsim
