#include <doctest.h>

#include <cmath>

#include "homlab/errors.hpp"
#include "homlab/rng.hpp"

using namespace homlab;

TEST_CASE("random streams are deterministic per (seed, id)") {
  RandomStream a(42, 7), b(42, 7);
  for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("different stream ids decorrelate") {
  RandomStream a(42, 0), b(42, 1);
  int same = 0;
  for (int i = 0; i < 1000; ++i) same += (a.next_u64() == b.next_u64());
  CHECK(same == 0);
}

TEST_CASE("uniform01 stays in [0, 1) with the right mean") {
  RandomStream rs(1, 0);
  double sum = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double u = rs.uniform01();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    sum += u;
  }
  CHECK(std::abs(sum / n - 0.5) < 0.005);
}

TEST_CASE("normal has unit variance") {
  RandomStream rs(2, 0);
  double sum = 0.0, ss = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double z = rs.normal();
    sum += z;
    ss += z * z;
  }
  const double mean = sum / n;
  CHECK(std::abs(mean) < 0.01);
  CHECK(std::abs(ss / n - mean * mean - 1.0) < 0.02);
}

TEST_CASE("poisson sampling matches mean and dispersion") {
  RandomStream rs(3, 0);
  const double lambda = 7.3;
  const int n = 50000;
  double sum = 0.0, ss = 0.0;
  for (int i = 0; i < n; ++i) {
    const double k = static_cast<double>(rs.poisson(lambda));
    sum += k;
    ss += k * k;
  }
  const double mean = sum / n;
  const double var = ss / n - mean * mean;
  CHECK(std::abs(mean - lambda) < 0.1);
  CHECK(var / mean == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("poisson edge cases") {
  RandomStream rs(4, 0);
  CHECK(rs.poisson(0.0) == 0);
  CHECK_THROWS_AS((void)rs.poisson(-1.0), ValidationError);
  CHECK_THROWS_AS((void)rs.poisson(std::nan("")), ValidationError);
}
