#pragma once

#include <cstdint>
#include <functional>

#include "bpfsim/sim_time.hpp"
#include "bpfsim/vec2.hpp"

namespace bpfsim {

// (origin, sequence) uniquely identifies a packet network-wide
struct PacketKey {
  std::uint32_t origin = 0;
  std::uint32_t sequence = 0;

  friend bool operator==(const PacketKey&, const PacketKey&) = default;
  friend auto operator<=>(const PacketKey&, const PacketKey&) = default;

  std::uint64_t packed() const {
    return (static_cast<std::uint64_t>(origin) << 32) | sequence;
  }
  static PacketKey unpack(std::uint64_t v) {
    return {static_cast<std::uint32_t>(v >> 32), static_cast<std::uint32_t>(v)};
  }
};

struct PacketKeyHash {
  std::size_t operator()(const PacketKey& k) const {
    return std::hash<std::uint64_t>{}(k.packed());
  }
};

// The entire routing state a packet carries. prev_hop_position is rewritten by
// every forwarder; dest_position never changes after generation.
struct PacketHeader {
  PacketKey key;
  Vec2 prev_hop_position{0, 0};
  Vec2 dest_position{0, 0};
  std::uint32_t hop_count = 0;
  SimTime created_at = 0;
};

}  // namespace bpfsim
