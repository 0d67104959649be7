#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "deepsched/kpi/kpi.hpp"

using namespace deepsched;

TEST_CASE("geomean") {
  const std::vector<double> a{2.0, 8.0};
  CHECK(geomean(a) == doctest::Approx(4.0).epsilon(1e-12));
  const std::vector<double> b{0.0, 4.0};
  CHECK(geomean(b) == doctest::Approx(2.0).epsilon(1e-12)); // zero -> 1, sqrt(4)
  const std::vector<double> c{7.25, 7.25, 7.25, 7.25};
  CHECK(geomean(c) == doctest::Approx(7.25).epsilon(1e-12));
  CHECK_THROWS_AS(geomean(std::vector<double>{}), std::invalid_argument);
  CHECK_THROWS_AS(geomean(std::vector<double>{-1.0}), std::invalid_argument);

  SUBCASE("AM-GM after zero replacement") {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> unif(0.0, 100.0);
    std::uniform_int_distribution<int> zero(0, 3);
    for (int trial = 0; trial < 2000; ++trial) {
      std::vector<double> v(8);
      for (auto& x : v) x = zero(rng) == 0 ? 0.0 : unif(rng);
      std::vector<double> replaced = v;
      for (auto& x : replaced)
        if (x == 0.0) x = 1.0;
      double am = 0.0;
      for (double x : replaced) am += x;
      am /= replaced.size();
      CHECK(geomean(v) <= am + 1e-9);
    }
  }
  SUBCASE("scale equivariance without zeros") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> unif(0.1, 50.0);
    for (int trial = 0; trial < 500; ++trial) {
      std::vector<double> v(6), scaled(6);
      const double c = unif(rng);
      for (int i = 0; i < 6; ++i) {
        v[i] = unif(rng);
        scaled[i] = c * v[i];
      }
      CHECK(geomean(scaled) == doctest::Approx(c * geomean(v)).epsilon(1e-9));
    }
  }
}

TEST_CASE("percentile") {
  const std::vector<double> two{1.0, 3.0};
  CHECK(percentile(two, 50.0) == doctest::Approx(2.0));

  std::vector<double> hundred(100);
  for (int i = 0; i < 100; ++i) hundred[i] = i + 1.0;
  CHECK(percentile(hundred, 5.0) == doctest::Approx(5.95).epsilon(1e-12));
  CHECK(percentile(hundred, 100.0) == doctest::Approx(100.0));
  CHECK(percentile(hundred, 0.0) == doctest::Approx(1.0));

  SUBCASE("monotone in q") {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> unif(-5.0, 5.0);
    std::vector<double> v(17);
    for (auto& x : v) x = unif(rng);
    double prev = percentile(v, 0.0);
    for (double q = 1.0; q <= 100.0; q += 1.0) {
      const double now = percentile(v, q);
      CHECK(now >= prev - 1e-12);
      prev = now;
    }
  }
  CHECK_THROWS_AS(percentile(std::vector<double>{}, 50.0), std::invalid_argument);
  CHECK_THROWS_AS(percentile(two, 101.0), std::invalid_argument);
}

TEST_CASE("upt") {
  const double tti = 5e-4;
  SUBCASE("always busy equals the plain average") {
    const auto v = upt(1e6, 2000, tti); // 2000 TTIs busy, 1e6 bits
    REQUIRE(v.has_value());
    CHECK(*v == doctest::Approx(1e6 / (2000 * tti)));
  }
  SUBCASE("busy half the time doubles the value") {
    const auto full = upt(1e6, 2000, tti);
    const auto half = upt(1e6, 1000, tti);
    REQUIRE(full.has_value());
    REQUIRE(half.has_value());
    CHECK(*half == doctest::Approx(2.0 * *full));
  }
  SUBCASE("never busy is excluded") { CHECK(!upt(0.0, 0, tti).has_value()); }
}

TEST_CASE("co-scheduling efficiency") {
  SUBCASE("SU-MIMO only gives 1.0") {
    CoschedAccumulator acc;
    for (int i = 0; i < 100; ++i) acc.add(1);
    CHECK(acc.efficiency() == doctest::Approx(1.0));
  }
  SUBCASE("fully paired at 8 layers gives 8.0") {
    CoschedAccumulator acc;
    for (int i = 0; i < 100; ++i) acc.add(8);
    CHECK(acc.efficiency() == doctest::Approx(8.0));
  }
  SUBCASE("half at 2 layers, half at 1 gives 1.5") {
    CoschedAccumulator acc;
    for (int i = 0; i < 50; ++i) acc.add(2);
    for (int i = 0; i < 50; ++i) acc.add(1);
    CHECK(acc.efficiency() == doctest::Approx(1.5));
  }
  SUBCASE("empty RBGs do not count") {
    CoschedAccumulator acc;
    acc.add(0);
    acc.add(2);
    CHECK(acc.efficiency() == doctest::Approx(2.0));
  }
}

TEST_CASE("gain_table") {
  std::vector<double> base(100);
  for (int i = 0; i < 100; ++i) base[i] = i + 1.0;
  SUBCASE("identical runs gain zero") {
    const GainRow row = gain_table(base, base);
    CHECK(row.defined);
    CHECK(row.p5 == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(row.median == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(row.geomean == doctest::Approx(0.0).epsilon(1e-9));
  }
  SUBCASE("a 1.156x geomean shows as +15.6%") {
    std::vector<double> cand = base;
    for (auto& v : cand) v *= 1.156;
    const GainRow row = gain_table(cand, base);
    CHECK(row.geomean == doctest::Approx(15.6).epsilon(1e-9));
  }
  SUBCASE("zero baseline statistic is undefined, not infinite") {
    std::vector<double> zeros(10, 0.0);
    zeros[9] = 5.0;
    const GainRow row = gain_table(base, zeros); // baseline p5 = 0
    CHECK(!row.defined);
  }
}
