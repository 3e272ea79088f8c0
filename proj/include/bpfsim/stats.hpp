#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <vector>

#include <boost/math/distributions/students_t.hpp>

namespace bpfsim {

inline double mean_of(const std::vector<double>& xs) {
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

inline double sample_stddev(const std::vector<double>& xs) {
  const double m = mean_of(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

inline double student_t_975(int dof) {
  boost::math::students_t_distribution<double> dist(dof);
  return boost::math::quantile(dist, 0.975);
}

struct CiStats {
  double mean = 0.0;
  std::optional<double> ci95_halfwidth;  // absent when n < 2
  int n = 0;
};

// Mean with a 95% Student-t confidence half-width (n-1 degrees of freedom).
inline CiStats mean_ci95(const std::vector<double>& xs) {
  CiStats out;
  out.n = static_cast<int>(xs.size());
  if (xs.empty()) return out;
  out.mean = mean_of(xs);
  if (xs.size() >= 2) {
    const double s = sample_stddev(xs);
    out.ci95_halfwidth =
        student_t_975(out.n - 1) * s / std::sqrt(static_cast<double>(out.n));
  }
  return out;
}

}  // namespace bpfsim
