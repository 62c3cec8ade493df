#include <cmath>
#include <vector>

#include "doctest.h"
#include "rrag/random.hpp"

using rrag::GaussianStream;
using rrag::Philox4x32;

TEST_CASE("philox4x32-10 known-answer vectors") {
  // Reference vectors published with Random123.
  CHECK(Philox4x32::block({0, 0, 0, 0}, {0, 0}) ==
        Philox4x32::Counter{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
  CHECK(Philox4x32::block({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu}) ==
        Philox4x32::Counter{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
  CHECK(Philox4x32::block({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u}) ==
        Philox4x32::Counter{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("same seed and stream reproduce the sequence") {
  GaussianStream a(42, 7), b(42, 7);
  for (int i = 0; i < 1000; ++i) REQUIRE(a.next_normal() == b.next_normal());
}

TEST_CASE("distinct streams differ") {
  GaussianStream a(42, 0), b(42, 1);
  int equal = 0;
  for (int i = 0; i < 100; ++i) equal += (a.next_u64() == b.next_u64());
  CHECK(equal == 0);
}

TEST_CASE("uniforms stay inside the open unit interval") {
  GaussianStream s(1, 1);
  for (int i = 0; i < 100000; ++i) {
    const double u = s.next_uniform();
    REQUIRE(u > 0.0);
    REQUIRE(u < 1.0);
  }
}

TEST_CASE("polar method returns the first of each pair first") {
  GaussianStream s(9, 3), raw(9, 3);
  double u, v, q;
  do {
    u = 2.0 * raw.next_uniform() - 1.0;
    v = 2.0 * raw.next_uniform() - 1.0;
    q = u * u + v * v;
  } while (q >= 1.0 || q == 0.0);
  const double f = std::sqrt(-2.0 * std::log(q) / q);
  CHECK(s.next_normal() == u * f);
  CHECK(s.next_normal() == v * f);
  CHECK(s.next_normal(3.0, 2.0) != 0.0);
}

TEST_CASE("standard normal moments over 10^6 deviates") {
  GaussianStream s(2024, 0);
  const int n = 1'000'000;
  double sum = 0.0, sumsq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = s.next_normal();
    sum += z;
    sumsq += z * z;
  }
  const double mean = sum / n;
  const double var = (sumsq - n * mean * mean) / (n - 1);
  CHECK(std::abs(mean) < 4.0 / std::sqrt(static_cast<double>(n)));
  CHECK(std::abs(var - 1.0) < 0.01);
}

TEST_CASE("streams 0 and 1 are uncorrelated") {
  GaussianStream a(77, 0), b(77, 1);
  const int n = 100'000;
  double sa = 0, sb = 0, saa = 0, sbb = 0, sab = 0;
  for (int i = 0; i < n; ++i) {
    const double x = a.next_normal(), y = b.next_normal();
    sa += x;
    sb += y;
    saa += x * x;
    sbb += y * y;
    sab += x * y;
  }
  const double cov = sab / n - (sa / n) * (sb / n);
  const double corr = cov / std::sqrt((saa / n - (sa / n) * (sa / n)) * (sbb / n - (sb / n) * (sb / n)));
  CHECK(std::abs(corr) < 0.01);
}
