#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <functional>
#include <limits>
#include <string>
#include <unordered_map>
#include <vector>

#include "bpfsim/channel.hpp"
#include "bpfsim/event_queue.hpp"
#include "bpfsim/metrics.hpp"
#include "bpfsim/mobility.hpp"
#include "bpfsim/packet.hpp"
#include "bpfsim/protocol.hpp"
#include "bpfsim/rng.hpp"
#include "bpfsim/scenario.hpp"

namespace bpfsim {

// One broadcast in flight. Receiver bookkeeping lives on the frame so a later
// overlapping transmission can retroactively spoil receptions in progress.
struct Frame {
  std::uint64_t id = 0;
  std::uint32_t tx_node = 0;
  Vec2 tx_position{0, 0};   // at TxStart; fading distance is measured here
  PacketHeader header;
  int payload_bytes = 0;

  struct Reception {
    std::uint32_t node;
    double distance_m;
    bool clean;  // false once any second frame (or own tx) overlaps the window
  };
  std::vector<Reception> receptions;
};

// Per-node CSMA broadcast MAC: FIFO bounded queue, one uniform contention
// window (no doubling — broadcast has no retransmission), backoff frozen while
// any audible frame is in the air, half-duplex.
struct MacState {
  enum class Phase : std::uint8_t { Idle, Contend, Tx };

  std::deque<PacketHeader> queue;   // head entry is the one contending
  Phase phase = Phase::Idle;
  bool frozen = false;
  SimTime backoff_left_us = 0;
  SimTime contend_since_us = 0;
  EventHandle backoff_ev;

  struct Audible {
    Frame* frame;
    std::size_t rx_index;  // this node's slot in frame->receptions
  };
  std::vector<Audible> audible;  // frames currently in the air at this node
};

struct TraceEvent {
  SimTime t_us = 0;
  std::string kind;
  std::uint32_t node = 0;
  std::uint64_t packet = 0;  // packed key, or frame id for tx events
  std::string detail;
};

// the run's node population: vehicles first, sink last
inline Mobility make_scenario_mobility(const ScenarioConfig& cfg, std::uint32_t run_index) {
  const SpeedModel speeds;
  if (!cfg.nodes.positions.empty())
    return {cfg.make_grid(), cfg.nodes.positions, speeds, cfg.master_seed, run_index,
            cfg.nodes.static_nodes};
  return {cfg.make_grid(), cfg.node_count(), cfg.sink, speeds, cfg.master_seed, run_index,
          cfg.nodes.static_nodes};
}

// A single deterministic run: builds mobility, wires the protocol kernel to
// the MAC/channel, executes the generation window plus drain tail, and leaves
// metrics plus a complete transmission log behind for inspection.
class Simulation {
 public:
  using TraceFn = std::function<void(const TraceEvent&)>;

  struct TxRecord {
    SimTime t_us;
    std::uint32_t node;
    PacketKey key;
    std::uint32_t hop_count;
    friend bool operator==(const TxRecord&, const TxRecord&) = default;
  };

  Simulation(const ScenarioConfig& cfg, std::uint32_t run_index)
      : cfg_(cfg),
        run_index_(run_index),
        channel_(cfg.channel),
        mobility_(make_scenario_mobility(cfg, run_index)),
        mac_rng_(cfg.master_seed, run_index, "mac"),
        proto_rng_(cfg.master_seed, run_index, "protocol"),
        fading_rng_(cfg.master_seed, run_index, "fading"),
        app_rng_(cfg.master_seed, run_index, "app") {
    cfg_.validate();
    n_ = mobility_.node_count();
    sink_ = mobility_.sink_id();
    sink_pos_ = mobility_.position_at(sink_, 0);
    macs_.resize(n_);
    caches_.resize(n_);
    sense_sq_ = channel_.sense_range_m() * channel_.sense_range_m();
    gen_end_us_ = us_from_seconds(cfg_.sim.duration_s);
    end_us_ = us_from_seconds(cfg_.sim.duration_s + cfg_.sim.drain_s);
    period_us_ = us_from_seconds(1.0 / cfg_.app.rate_pps);
    sources_ = resolve_sources();
    engine_.set_handler([this](const Event& e) { dispatch(e); });
    for (std::uint32_t src : sources_) {
      const SimTime offset = cfg_.app.phase == "random"
                                 ? us_from_seconds(app_rng_.uniform01() / cfg_.app.rate_pps)
                                 : 0;
      engine_.schedule({offset, EventKind::AppGenerate, src, 0, 0});
    }
    sweep_period_us_ = std::max<SimTime>(kMicrosPerSecond,
                                         us_from_seconds(cfg_.sim.cache_expiry_s) / 2);
    if (end_us_ >= sweep_period_us_)
      engine_.schedule({sweep_period_us_, EventKind::StatsSample, 0, 0, 0});
  }

  // the engine handler captures `this`, so the object must stay put
  Simulation(const Simulation&) = delete;
  Simulation& operator=(const Simulation&) = delete;

  void set_trace(TraceFn fn) { trace_fn_ = std::move(fn); }

  RunReport run() {
    engine_.run_until(end_us_);
    return metrics_.report(run_index_);
  }

  const MetricsCollector& metrics() const { return metrics_; }
  const std::vector<TxRecord>& transmissions() const { return tx_log_; }
  const std::vector<std::uint32_t>& source_ids() const { return sources_; }
  std::uint32_t sink_id() const { return sink_; }
  Mobility& mobility() { return mobility_; }
  const Channel& channel() const { return channel_; }

 private:
  // ---- forwarding state ----------------------------------------------------

  struct CacheEntry {
    enum class Phase : std::uint8_t { Window, Pending, Done };
    Phase phase = Phase::Done;
    SimTime first_rx_us = 0;
    SimTime fire_at_us = 0;
    EventHandle ev;
    double best_d_m = std::numeric_limits<double>::infinity();
    PacketHeader header;
  };
  using Cache = std::unordered_map<PacketKey, CacheEntry, PacketKeyHash>;

  std::vector<std::uint32_t> resolve_sources() {
    std::vector<std::uint32_t> ids = cfg_.sources.ids;
    if (ids.empty() && cfg_.sources.count > 0) {
      std::vector<Vec2> vehicle_pos(n_ - 1);
      for (int i = 0; i + 1 < n_; ++i)
        vehicle_pos[i] = mobility_.position_at(static_cast<std::uint32_t>(i), 0);
      ids = select_sources_max_spread(vehicle_pos, sink_pos_, cfg_.sources.count);
    }
    std::sort(ids.begin(), ids.end());
    return ids;
  }

  void trace(SimTime t, const char* kind, std::uint32_t node, std::uint64_t packet,
             std::string detail = {}) {
    if (trace_fn_) trace_fn_({t, kind, node, packet, std::move(detail)});
  }

  void dispatch(const Event& e) {
    switch (e.kind) {
      case EventKind::AppGenerate: on_generate(e); break;
      case EventKind::TxEnd: on_tx_end(e); break;
      case EventKind::BackoffExpire:
        if (e.aux == kAuxMacBackoff) on_mac_backoff(e);
        else on_protocol_timer(e);
        break;
      case EventKind::StatsSample: on_stats_sample(e); break;
      default: break;
    }
  }

  // ---- application ---------------------------------------------------------

  void on_generate(const Event& e) {
    const SimTime now = engine_.now();
    if (now >= gen_end_us_) return;  // generation window closed; chain ends
    const auto seq = static_cast<std::uint32_t>(e.packet);
    const PacketKey key{e.node, seq};
    PacketHeader hdr;
    hdr.key = key;
    hdr.prev_hop_position = mobility_.position_at(e.node, now);
    hdr.dest_position = sink_pos_;
    hdr.hop_count = 0;
    hdr.created_at = now;
    metrics_.record_generation(key, now);
    caches_[e.node][key] = CacheEntry{};  // origin ignores echoes of its own packet
    trace(now, "generate", e.node, key.packed());
    mac_enqueue(e.node, hdr);
    engine_.schedule({now + period_us_, EventKind::AppGenerate, e.node, seq + 1ULL, 0});
  }

  // ---- MAC -----------------------------------------------------------------

  void mac_enqueue(std::uint32_t node, const PacketHeader& hdr) {
    MacState& m = macs_[node];
    if (static_cast<int>(m.queue.size()) >= cfg_.mac.queue_limit) {
      metrics_.record_mac_drop();
      trace(engine_.now(), "mac-drop", node, hdr.key.packed());
      return;
    }
    m.queue.push_back(hdr);
    if (m.phase == MacState::Phase::Idle) start_contention(node);
  }

  void start_contention(std::uint32_t node) {
    MacState& m = macs_[node];
    m.phase = MacState::Phase::Contend;
    m.backoff_left_us =
        static_cast<SimTime>(mac_rng_.uniform_int(static_cast<std::uint64_t>(cfg_.mac.cw_slots))) *
        cfg_.mac.slot_us;
    if (!m.audible.empty()) {
      m.frozen = true;  // medium busy: wait for it to clear before counting down
      return;
    }
    m.frozen = false;
    m.contend_since_us = engine_.now();
    m.backoff_ev = engine_.schedule({engine_.now() + m.backoff_left_us, EventKind::BackoffExpire,
                                     node, 0, kAuxMacBackoff});
  }

  void freeze(std::uint32_t node) {
    MacState& m = macs_[node];
    if (m.backoff_ev) {
      engine_.cancel(m.backoff_ev);
      m.backoff_ev = EventHandle{};
    }
    const SimTime elapsed = engine_.now() - m.contend_since_us;
    m.backoff_left_us = std::max<SimTime>(0, m.backoff_left_us - elapsed);
    m.frozen = true;
  }

  void resume(std::uint32_t node) {
    MacState& m = macs_[node];
    m.frozen = false;
    m.contend_since_us = engine_.now();
    m.backoff_ev = engine_.schedule({engine_.now() + m.backoff_left_us, EventKind::BackoffExpire,
                                     node, 0, kAuxMacBackoff});
  }

  void on_mac_backoff(const Event& e) {
    MacState& m = macs_[e.node];
    m.backoff_ev = EventHandle{};
    begin_tx(e.node);
  }

  void begin_tx(std::uint32_t node) {
    const SimTime now = engine_.now();
    MacState& m = macs_[node];
    PacketHeader hdr = m.queue.front();
    m.queue.pop_front();
    m.phase = MacState::Phase::Tx;

    // half-duplex: anything this node was hearing is lost
    for (const auto& a : m.audible) a.frame->receptions[a.rx_index].clean = false;

    const std::uint64_t fid = next_frame_id_++;
    Frame& f = frames_[fid];
    f.id = fid;
    f.tx_node = node;
    f.tx_position = mobility_.position_at(node, now);
    f.header = hdr;
    f.payload_bytes = cfg_.app.payload_bytes;

    for (std::uint32_t r = 0; r < static_cast<std::uint32_t>(n_); ++r) {
      if (r == node) continue;
      const Vec2 rpos = mobility_.position_at(r, now);
      const double dsq = distance_sq(f.tx_position, rpos);
      if (dsq > sense_sq_) continue;
      MacState& rm = macs_[r];
      bool clean = rm.phase != MacState::Phase::Tx;
      if (!rm.audible.empty()) {
        clean = false;  // overlap spoils the newcomer and everything in the air
        for (const auto& a : rm.audible) a.frame->receptions[a.rx_index].clean = false;
      }
      f.receptions.push_back({r, std::sqrt(dsq), clean});
      rm.audible.push_back({&f, f.receptions.size() - 1});
      if (rm.phase == MacState::Phase::Contend && !rm.frozen) freeze(r);
    }

    metrics_.record_transmission(hdr.key);
    tx_log_.push_back({now, node, hdr.key, hdr.hop_count});
    trace(now, "tx-start", node, hdr.key.packed(),
          "hops=" + std::to_string(hdr.hop_count));
    engine_.schedule({now + channel_.airtime_us(f.payload_bytes), EventKind::TxEnd, node, fid, 0});
  }

  void on_tx_end(const Event& e) {
    const SimTime now = engine_.now();
    Frame& f = frames_.at(e.packet);

    // release the medium everywhere first, so receivers whose backoff resumes
    // this microsecond see a consistent idle state
    for (const auto& rx : f.receptions) {
      MacState& rm = macs_[rx.node];
      std::erase_if(rm.audible, [&](const MacState::Audible& a) { return a.frame == &f; });
      if (rm.audible.empty() && rm.phase == MacState::Phase::Contend && rm.frozen)
        resume(rx.node);
    }

    for (const auto& rx : f.receptions) {
      if (!rx.clean) {
        trace(now, "rx-collision", rx.node, f.header.key.packed());
        continue;
      }
      if (!fading_rng_.bernoulli(channel_.reception_probability(rx.distance_m))) {
        trace(now, "rx-fade", rx.node, f.header.key.packed());
        continue;
      }
      on_decode(rx.node, f.header);
    }

    MacState& m = macs_[e.node];
    m.phase = MacState::Phase::Idle;
    frames_.erase(e.packet);
    if (!m.queue.empty()) start_contention(e.node);
  }

  // ---- protocol kernel -----------------------------------------------------

  void on_decode(std::uint32_t node, const PacketHeader& hdr) {
    const SimTime now = engine_.now();
    if (node == sink_) {
      const bool first = metrics_.record_delivery(hdr.key, now, hdr.hop_count + 1);
      trace(now, first ? "deliver" : "replica", node, hdr.key.packed(),
            "hops=" + std::to_string(hdr.hop_count + 1));
      return;  // the collection point never forwards
    }
    Cache& cache = caches_[node];
    auto it = cache.find(hdr.key);
    if (it == cache.end()) {
      first_reception(node, hdr, cache);
    } else {
      duplicate_reception(node, hdr, it->second);
    }
  }

  void first_reception(std::uint32_t node, const PacketHeader& hdr, Cache& cache) {
    const SimTime now = engine_.now();
    const Vec2 my_pos = mobility_.position_at(node, now);
    const double d_ij = distance(my_pos, hdr.prev_hop_position);
    const ProtocolConfig& p = cfg_.protocol;
    CacheEntry entry;
    entry.first_rx_us = now;
    entry.header = hdr;
    entry.best_d_m = d_ij;

    switch (p.variant) {
      case Variant::Bpf: {
        const SimTime backoff = bpf_backoff(hdr, my_pos, p);
        entry.phase = CacheEntry::Phase::Pending;
        entry.fire_at_us = now + backoff;
        entry.ev = engine_.schedule({entry.fire_at_us, EventKind::BackoffExpire, node,
                                     hdr.key.packed(), kAuxProtocolForward});
        trace(now, "forward-scheduled", node, hdr.key.packed(),
              "backoff_us=" + std::to_string(backoff));
        break;
      }
      case Variant::WeightedP: {
        if (p.wp_uses_wait_time) {
          // buffer the first copy and collect duplicates for the wait window;
          // the forwarding draw happens at window close, against the nearest
          // transmitter heard
          entry.phase = CacheEntry::Phase::Window;
          entry.fire_at_us = now + p.wait_time_us;
          entry.ev = engine_.schedule({entry.fire_at_us, EventKind::BackoffExpire, node,
                                       hdr.key.packed(), kAuxProtocolWindow});
          trace(now, "window-open", node, hdr.key.packed());
        } else {
          entry.phase = CacheEntry::Phase::Done;
          if (proto_rng_.bernoulli(wp_forward_probability(d_ij, p.range_m)))
            forward_now(node, hdr);
        }
        break;
      }
      case Variant::Slotted1:
      case Variant::SlottedP: {
        if (p.variant == Variant::SlottedP && !proto_rng_.bernoulli(p.p)) {
          entry.phase = CacheEntry::Phase::Done;  // lost the draw: stay silent
          break;
        }
        const int slot = slot_number(d_ij, p.range_m, p.slots);
        const SimTime delay = slot_delay(slot, p.tau()) +
                              (p.slotted_uses_wait_time ? p.wait_time_us : 0);
        entry.phase = CacheEntry::Phase::Pending;
        entry.fire_at_us = now + delay;
        entry.ev = engine_.schedule({entry.fire_at_us, EventKind::BackoffExpire, node,
                                     hdr.key.packed(), kAuxProtocolForward});
        trace(now, "forward-scheduled", node, hdr.key.packed(),
              "slot=" + std::to_string(slot));
        break;
      }
    }
    cache.emplace(hdr.key, std::move(entry));
  }

  void duplicate_reception(std::uint32_t node, const PacketHeader& hdr, CacheEntry& entry) {
    const SimTime now = engine_.now();
    switch (entry.phase) {
      case CacheEntry::Phase::Window: {
        // weighted-p wait window: duplicates refine the distance estimate
        // toward the nearest heard transmitter instead of suppressing
        const Vec2 my_pos = mobility_.position_at(node, now);
        const double d = distance(my_pos, hdr.prev_hop_position);
        if (d < entry.best_d_m) {
          entry.best_d_m = d;
          entry.header = hdr;
        }
        break;
      }
      case CacheEntry::Phase::Pending: {
        // a duplicate strictly before the scheduled forward suppresses it; at
        // or after the fire time the forward stands (it may already sit in the
        // MAC queue, which a duplicate does not un-queue)
        if (now < entry.fire_at_us) {
          engine_.cancel(entry.ev);
          entry.ev = EventHandle{};
          entry.phase = CacheEntry::Phase::Done;
          trace(now, "suppressed", node, hdr.key.packed());
        }
        break;
      }
      case CacheEntry::Phase::Done:
        break;
    }
  }

  void on_protocol_timer(const Event& e) {
    const PacketKey key = PacketKey::unpack(e.packet);
    Cache& cache = caches_[e.node];
    auto it = cache.find(key);
    if (it == cache.end()) return;
    CacheEntry& entry = it->second;
    entry.ev = EventHandle{};
    if (e.aux == kAuxProtocolWindow) {
      entry.phase = CacheEntry::Phase::Done;
      const double prob = wp_forward_probability(entry.best_d_m, cfg_.protocol.range_m);
      trace(engine_.now(), "window-close", e.node, key.packed(),
            "d=" + std::to_string(entry.best_d_m) + " p=" + std::to_string(prob));
      if (proto_rng_.bernoulli(prob)) forward_now(e.node, entry.header);
      return;
    }
    if (entry.phase != CacheEntry::Phase::Pending) return;
    entry.phase = CacheEntry::Phase::Done;
    forward_now(e.node, entry.header);
  }

  void forward_now(std::uint32_t node, PacketHeader hdr) {
    const SimTime now = engine_.now();
    hdr.prev_hop_position = mobility_.position_at(node, now);
    hdr.hop_count += 1;
    trace(now, "forward", node, hdr.key.packed(), "hops=" + std::to_string(hdr.hop_count));
    mac_enqueue(node, hdr);
  }

  // ---- housekeeping --------------------------------------------------------

  void on_stats_sample(const Event&) {
    const SimTime now = engine_.now();
    const SimTime expiry = us_from_seconds(cfg_.sim.cache_expiry_s);
    for (Cache& cache : caches_) {
      std::erase_if(cache, [&](const auto& kv) {
        return kv.second.phase == CacheEntry::Phase::Done &&
               kv.second.first_rx_us + expiry <= now;
      });
    }
    const SimTime next = now + sweep_period_us_;
    if (next <= end_us_)
      engine_.schedule({next, EventKind::StatsSample, 0, 0, 0});
  }

  ScenarioConfig cfg_;
  std::uint32_t run_index_;
  Channel channel_;
  Mobility mobility_;
  RngStream mac_rng_;
  RngStream proto_rng_;
  RngStream fading_rng_;
  RngStream app_rng_;
  Engine engine_;
  MetricsCollector metrics_;

  int n_ = 0;
  std::uint32_t sink_ = 0;
  Vec2 sink_pos_{0, 0};
  double sense_sq_ = 0;
  SimTime gen_end_us_ = 0;
  SimTime end_us_ = 0;
  SimTime period_us_ = 0;
  SimTime sweep_period_us_ = kMicrosPerSecond;
  std::vector<std::uint32_t> sources_;
  std::vector<MacState> macs_;
  std::vector<Cache> caches_;
  std::unordered_map<std::uint64_t, Frame> frames_;
  std::uint64_t next_frame_id_ = 1;
  std::vector<TxRecord> tx_log_;
  TraceFn trace_fn_;
};

}  // namespace bpfsim
