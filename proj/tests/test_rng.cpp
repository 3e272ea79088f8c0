#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "bpfsim/rng.hpp"

using bpfsim::RngStream;

TEST_CASE("identical stream identity reproduces the sequence") {
  RngStream a(42, 3, "mac");
  RngStream b(42, 3, "mac");
  for (int i = 0; i < 1000; ++i) REQUIRE(a.next_u64() == b.next_u64());
}

TEST_CASE("any coordinate change yields a different stream") {
  RngStream base(42, 3, "mac");
  RngStream other_seed(43, 3, "mac");
  RngStream other_run(42, 4, "mac");
  RngStream other_name(42, 3, "protocol");
  const auto v = base.next_u64();
  // one draw differing is enough; equality of a 64-bit draw by chance is ~2^-64
  CHECK(v != other_seed.next_u64());
  CHECK(v != other_run.next_u64());
  CHECK(v != other_name.next_u64());
}

TEST_CASE("stream consumption is isolated by name") {
  // draws taken from one stream must not shift another stream's sequence
  RngStream mac1(7, 0, "mac");
  RngStream app(7, 0, "app");
  for (int i = 0; i < 100; ++i) app.next_u64();
  RngStream mac2(7, 0, "mac");
  for (int i = 0; i < 100; ++i) REQUIRE(mac1.next_u64() == mac2.next_u64());
}

TEST_CASE("uniform01 stays in [0,1) with the expected mean") {
  RngStream r(1, 0, "u");
  double sum = 0;
  const int n = 1'000'000;
  for (int i = 0; i < n; ++i) {
    const double v = r.uniform01();
    REQUIRE(v >= 0.0);
    REQUIRE(v < 1.0);
    sum += v;
  }
  CHECK(std::abs(sum / n - 0.5) < 0.005);
}

TEST_CASE("uniform(lo,hi) respects its bounds") {
  RngStream r(1, 0, "u");
  for (int i = 0; i < 10000; ++i) {
    const double v = r.uniform(3.0, 25.0);
    REQUIRE(v >= 3.0);
    REQUIRE(v < 25.0);
  }
}

TEST_CASE("uniform_int is in range and roughly uniform") {
  RngStream r(9, 0, "slots");
  const int bins = 4;
  const int n = 100'000;
  std::vector<int> count(bins, 0);
  for (int i = 0; i < n; ++i) {
    const auto v = r.uniform_int(bins);
    REQUIRE(v < static_cast<std::uint32_t>(bins));
    ++count[v];
  }
  const double expected = static_cast<double>(n) / bins;
  double chi2 = 0;
  for (int c : count) chi2 += (c - expected) * (c - expected) / expected;
  // chi-square 0.999 quantile at 3 degrees of freedom
  CHECK(chi2 < 16.26623619623813);
}

TEST_CASE("bernoulli edge probabilities are exact") {
  RngStream r(5, 0, "b");
  for (int i = 0; i < 10000; ++i) REQUIRE_FALSE(r.bernoulli(0.0));
  for (int i = 0; i < 10000; ++i) REQUIRE(r.bernoulli(1.0));
}

TEST_CASE("bernoulli tracks its probability") {
  RngStream r(5, 0, "b");
  const int n = 200'000;
  int hits = 0;
  for (int i = 0; i < n; ++i) hits += r.bernoulli(0.3) ? 1 : 0;
  CHECK(std::abs(static_cast<double>(hits) / n - 0.3) < 0.01);
}

TEST_CASE("normal has the requested moments") {
  RngStream r(11, 0, "n");
  const int n = 200'000;
  double sum = 0, sum2 = 0;
  for (int i = 0; i < n; ++i) {
    const double v = r.normal(2.0, 3.0);
    sum += v;
    sum2 += v * v;
  }
  const double mean = sum / n;
  const double var = sum2 / n - mean * mean;
  CHECK(std::abs(mean - 2.0) < 0.05);
  CHECK(std::abs(std::sqrt(var) - 3.0) < 0.05);
}

TEST_CASE("substream derivation is pinned") {
  // frozen outputs: any change to the seed-mixing or stream-naming scheme
  // silently repartitions every experiment, so it must fail loudly here
  RngStream s(42, 7, "golden");
  CHECK(s.next_u64() == 8598343733993156620ULL);
  CHECK(s.next_u64() == 11522615100325478650ULL);
  CHECK(s.next_u64() == 11512224810118583502ULL);
  CHECK(s.next_u64() == 8935554869512522925ULL);
  RngStream m(1, 0, "mobility.3");
  CHECK(m.next_u64() == 5957673062923654982ULL);
}
