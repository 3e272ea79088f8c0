#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

#include "bpfsim/packet.hpp"
#include "bpfsim/sim_time.hpp"
#include "bpfsim/vec2.hpp"

namespace bpfsim {

enum class Variant : std::uint8_t { Bpf, WeightedP, Slotted1, SlottedP };

inline const char* to_string(Variant v) {
  switch (v) {
    case Variant::Bpf: return "bpf";
    case Variant::WeightedP: return "weighted-p";
    case Variant::Slotted1: return "slotted-1";
    default: return "slotted-p";
  }
}

inline Variant parse_variant(const std::string& s) {
  if (s == "bpf") return Variant::Bpf;
  if (s == "weighted-p") return Variant::WeightedP;
  if (s == "slotted-1") return Variant::Slotted1;
  if (s == "slotted-p") return Variant::SlottedP;
  throw std::invalid_argument("unknown protocol variant: " + s +
                              " (expected bpf | weighted-p | slotted-1 | slotted-p)");
}

struct ProtocolConfig {
  Variant variant = Variant::Bpf;
  double c1_weight = 0.0;        // weight on the link-distance component; the
                                 // evaluated variant uses the destination
                                 // component alone
  double p = 0.5;                // slotted-p rebroadcast probability
  double range_m = 500.0;        // R in the forwarding formulas
  SimTime wait_time_us = 5000;   // duplicate-collection window of the baselines
  SimTime backoff_scale_us = 5000;
  int slots = 5;                 // Ns of the slotted baselines
  SimTime tau_us = 0;            // slot width; 0 means wait_time_us / slots
  bool wp_uses_wait_time = true;       // weighted-p buffers duplicates for WAIT_TIME
  bool slotted_uses_wait_time = true;  // slotted variants delay by WAIT_TIME + slot

  SimTime tau() const { return tau_us > 0 ? tau_us : wait_time_us / slots; }

  void validate() const {
    if (c1_weight < 0 || c1_weight > 1) throw std::invalid_argument("protocol.c1_weight must be in [0,1]");
    if (p < 0 || p > 1) throw std::invalid_argument("protocol.p must be in [0,1]");
    if (range_m <= 0) throw std::invalid_argument("protocol.range_m must be > 0");
    if (slots < 1) throw std::invalid_argument("protocol.slots must be >= 1");
    if (backoff_scale_us <= 0) throw std::invalid_argument("protocol.backoff_scale_us must be > 0");
    if (wait_time_us < 0) throw std::invalid_argument("protocol.wait_time_us must be >= 0");
  }
};

inline double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

// link-distance component: farther receivers back off less
inline double compute_c1(double d_ij_m, double range_m) {
  return 1.0 - std::min(d_ij_m, range_m) / range_m;
}

// destination-progress component: receivers closer to the destination than the
// previous hop back off less; 0.5 at equal distance, 0 at full-range progress
inline double compute_c2(double d_j_m, double d_i_m, double range_m) {
  return clamp01(1.0 + (d_j_m - d_i_m - range_m) / (2.0 * range_m));
}

// weighted combination of the two components, scaled onto the backoff range
inline SimTime scaled_backoff(double c1, double c2, const ProtocolConfig& cfg) {
  const double v = clamp01(cfg.c1_weight * c1 + (1.0 - cfg.c1_weight) * c2);
  return static_cast<SimTime>(std::llround(v * static_cast<double>(cfg.backoff_scale_us)));
}

inline SimTime bpf_backoff(const PacketHeader& hdr, const Vec2& my_position,
                           const ProtocolConfig& cfg) {
  const double d_ij = distance(my_position, hdr.prev_hop_position);
  const double d_i = distance(hdr.prev_hop_position, hdr.dest_position);
  const double d_j = distance(my_position, hdr.dest_position);
  return scaled_backoff(compute_c1(d_ij, cfg.range_m), compute_c2(d_j, d_i, cfg.range_m), cfg);
}

// rebroadcast probability grows with distance from the previous hop
inline double wp_forward_probability(double d_ij_m, double range_m) {
  return std::min(d_ij_m / range_m, 1.0);
}

// farther receivers get earlier slots; out-of-range receptions map to slot 0
inline int slot_number(double d_ij_m, double range_m, int slots) {
  if (d_ij_m > range_m) return 0;
  // nudge against floor so exact slot boundaries land in the intended slot
  return static_cast<int>(std::floor(slots * (1.0 - d_ij_m / range_m) + 1e-9));
}

inline SimTime slot_delay(int slot, SimTime tau_us) { return slot * tau_us; }

}  // namespace bpfsim
