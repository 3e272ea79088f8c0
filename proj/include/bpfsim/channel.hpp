#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

#include <boost/math/distributions/gamma.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "bpfsim/sim_time.hpp"

namespace bpfsim {

struct ChannelConfig {
  double nakagami_m = 1.55;          // fading shape, urban recommendation
  double pathloss_exponent = 2.8;    // log-distance exponent, urban default
  double reference_distance_m = 1.0;
  std::int64_t data_rate_bps = 6'000'000;
  double range_m = 500.0;            // nominal range R; threshold calibrated so p(R) = 0.5
  double sense_margin_db = 10.0;     // carrier-sense threshold below decode threshold
  SimTime phy_overhead_us = 68;      // preamble + PHY header
  bool deterministic = false;        // unit-disk channel: p(d)=1 iff d<=R (test topologies)
};

inline SimTime frame_airtime_us(int payload_bytes, std::int64_t data_rate_bps,
                                SimTime phy_overhead_us) {
  // ceil(8*bytes/rate) in whole microseconds, plus fixed PHY overhead
  const std::int64_t bits = 8LL * payload_bytes;
  const std::int64_t us = (bits * 1'000'000 + data_rate_bps - 1) / data_rate_bps;
  return us + phy_overhead_us;
}

// Broadcast reception model. Instantaneous received power under Nakagami-m
// fading is gamma distributed with shape m around the log-distance path-loss
// mean, so decode success at distance d is Q(m, m*theta/mean_power(d)) with Q
// the regularized upper incomplete gamma. The decode threshold theta is
// calibrated at construction so that p(R) = 0.5 exactly.
class Channel {
 public:
  explicit Channel(const ChannelConfig& cfg) : cfg_(cfg) {
    if (cfg.nakagami_m <= 0.5) throw std::invalid_argument("channel.nakagami_m must be > 0.5");
    if (cfg.range_m <= 0) throw std::invalid_argument("channel.range_m must be > 0");
    if (cfg.data_rate_bps <= 0) throw std::invalid_argument("channel.data_rate_bps must be > 0");
    if (cfg.reference_distance_m <= 0) throw std::invalid_argument("channel.reference_distance_m must be > 0");
    boost::math::gamma_distribution<double> g(cfg.nakagami_m, 1.0);
    gamma_median_ = boost::math::quantile(g, 0.5);
    if (cfg.deterministic) {
      sense_range_m_ = cfg.range_m;
    } else {
      const double margin = std::pow(10.0, cfg.sense_margin_db / 10.0);
      sense_range_m_ = cfg.range_m *
          std::pow(margin * cfg.nakagami_m / gamma_median_, 1.0 / cfg.pathloss_exponent);
    }
  }

  double reception_probability(double distance_m) const {
    if (cfg_.deterministic) return distance_m <= cfg_.range_m ? 1.0 : 0.0;
    if (distance_m <= 0.0) return 1.0;
    const double x =
        gamma_median_ * std::pow(distance_m / cfg_.range_m, cfg_.pathloss_exponent);
    return boost::math::gamma_q(cfg_.nakagami_m, x);
  }

  // mean received power at d, normalized to 1 at the reference distance
  double mean_power(double distance_m) const {
    return std::pow(distance_m / cfg_.reference_distance_m, -cfg_.pathloss_exponent);
  }

  // calibrated decode threshold in the same normalized power units
  double decode_threshold() const {
    return mean_power(cfg_.range_m) * gamma_median_ / cfg_.nakagami_m;
  }

  // beyond this distance a frame neither blocks the medium nor collides
  double sense_range_m() const { return sense_range_m_; }

  SimTime airtime_us(int payload_bytes) const {
    return frame_airtime_us(payload_bytes, cfg_.data_rate_bps, cfg_.phy_overhead_us);
  }

  const ChannelConfig& config() const { return cfg_; }

 private:
  ChannelConfig cfg_;
  double gamma_median_ = 0.0;  // x with Q(m, x) = 0.5
  double sense_range_m_ = 0.0;
};

}  // namespace bpfsim
