#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "doctest.h"
#include "rrag/errors.hpp"
#include "rrag/random.hpp"
#include "rrag/stats.hpp"

using namespace rrag;

namespace {

StreamingMoments moments_of(std::initializer_list<double> xs) {
  StreamingMoments m;
  for (double x : xs) m.update(x);
  return m;
}

}  // namespace

TEST_CASE("finalize on small samples") {
  const MCEstimate e = finalize(moments_of({1, 2, 3}));
  CHECK(e.mean == doctest::Approx(2.0).epsilon(1e-15));
  REQUIRE(e.std_error.has_value());
  CHECK(*e.std_error == doctest::Approx(std::sqrt(1.0 / 3.0)).epsilon(1e-15));

  const MCEstimate single = finalize(moments_of({4.5}));
  CHECK(single.mean == 4.5);
  CHECK_FALSE(single.std_error.has_value());
}

TEST_CASE("merge equals the combined stream") {
  StreamingMoments a = moments_of({1, 2});
  a.merge(moments_of({3}));
  const StreamingMoments all = moments_of({1, 2, 3});
  CHECK(std::abs(a.mean() - all.mean()) < 1e-14);
  CHECK(std::abs(a.m2() - all.m2()) < 1e-14);
  CHECK(a.count() == 3);

  StreamingMoments empty;
  empty.merge(all);
  CHECK(empty.mean() == all.mean());
}

TEST_CASE("Welford merge agrees with batch moments on random inputs") {
  GaussianStream s(8, 0);
  for (std::size_t len : {10u, 1000u, 1000000u}) {
    std::vector<double> xs(len);
    for (double& x : xs) x = 3.0 + 2.0 * s.next_normal();
    // Batch two-pass reference in long double.
    long double mean = 0;
    for (double x : xs) mean += x;
    mean /= len;
    long double m2 = 0;
    for (double x : xs) m2 += (x - mean) * (x - mean);

    StreamingMoments merged;
    const std::size_t chunk = std::max<std::size_t>(1, len / 7);
    for (std::size_t begin = 0; begin < len; begin += chunk) {
      StreamingMoments part;
      for (std::size_t i = begin; i < std::min(len, begin + chunk); ++i) part.update(xs[i]);
      merged.merge(part);
    }
    CHECK(std::abs(merged.mean() - static_cast<double>(mean)) <= 1e-13 * std::abs(static_cast<double>(mean)));
    CHECK(std::abs(merged.m2() - static_cast<double>(m2)) <= 1e-13 * static_cast<double>(m2));
  }
}

TEST_CASE("within_z") {
  MCEstimate e;
  e.mean = 2.0;
  e.std_error = 0.1;
  CHECK(within_z(e, 2.15, 3.0));
  CHECK_FALSE(within_z(e, 2.5, 3.0));

  MCEstimate exact;
  exact.mean = 1.0;
  exact.std_error = 0.0;
  CHECK(within_z(exact, 1.0, 3.0));
  CHECK_THROWS_AS(within_z(exact, 1.5, 3.0), ZeroStderr);
  CHECK(z_score(exact, 1.0) == 0.0);
}

TEST_CASE("chi_square_uniform against the closed-form one-dof tail") {
  // For one degree of freedom P(X > x) = erfc(sqrt(x / 2)).
  const std::vector<std::uint64_t> flat{10, 10, 10, 10};
  const auto r0 = chi_square_uniform(flat);
  CHECK(r0.statistic == 0.0);
  CHECK(r0.p_value == 1.0);
  CHECK(r0.degrees_of_freedom == 3);

  const std::vector<std::uint64_t> lopsided{20, 0};
  const auto r1 = chi_square_uniform(lopsided);
  CHECK(r1.statistic == doctest::Approx(20.0));
  CHECK(std::abs(r1.p_value - std::erfc(std::sqrt(10.0))) < 1e-10);
  CHECK(r1.p_value == doctest::Approx(7.7e-6).epsilon(0.01));

  const std::vector<std::uint64_t> mild{12, 8};
  const auto r2 = chi_square_uniform(mild);
  CHECK(r2.statistic == doctest::Approx(0.8));
  CHECK(std::abs(r2.p_value - std::erfc(std::sqrt(0.4))) < 1e-10);
  CHECK(r2.p_value == doctest::Approx(0.371).epsilon(0.002));
}

TEST_CASE("chi-square survival against two-dof closed form") {
  // Two degrees of freedom: P(X > x) = exp(-x / 2).
  for (double x : {0.1, 1.0, 5.0, 30.0}) CHECK(std::abs(chi_square_survival(x, 2) - std::exp(-x / 2)) < 1e-10);
}

TEST_CASE("chi_square_uniform rejects sparse bins") {
  const std::vector<std::uint64_t> sparse{3, 4, 2};
  CHECK_THROWS_AS(chi_square_uniform(sparse), SparseBins);
  const std::vector<std::uint64_t> one{100};
  CHECK_THROWS_AS(chi_square_uniform(one), SparseBins);
}

TEST_CASE("chi-square is permutation invariant and monotone") {
  std::vector<std::uint64_t> bins{31, 17, 25, 40, 12, 29, 22, 33, 19, 28};
  const auto base = chi_square_uniform(bins);
  std::mt19937 rng(1);
  for (int k = 0; k < 20; ++k) {
    std::shuffle(bins.begin(), bins.end(), rng);
    const auto r = chi_square_uniform(bins);
    CHECK(r.statistic == base.statistic);
    CHECK(r.p_value == base.p_value);
  }
  double previous = 1.0;
  for (double x = 0.5; x < 60.0; x += 0.5) {
    const double p = chi_square_survival(x, 9);
    CHECK(p <= previous);
    CHECK(p >= 0.0);
    previous = p;
  }
}
