#include <cmath>
#include <numbers>

#include "doctest.h"
#include "rrag/closed_forms.hpp"
#include "rrag/errors.hpp"
#include "rrag/rmt_montecarlo.hpp"

using namespace rrag;

namespace {

MCConfig config(unsigned n, std::uint64_t samples, std::uint64_t seed = 20240611, unsigned workers = 1) {
  MCConfig c;
  c.n = n;
  c.samples = samples;
  c.master_seed = seed;
  c.workers = workers;
  return c;
}

}  // namespace

TEST_CASE("real sampler variances") {
  GaussianStream s(1, 0);
  StreamingMoments diag, off, abs11;
  for (int k = 0; k < 1'000'000; ++k) {
    const RealSymMatrix a = sample_real_sym(2, s);
    diag.update(a(0, 0));
    off.update(a(0, 1));
  }
  CHECK(std::abs(*diag.variance() - 1.0) < 0.01);
  CHECK(std::abs(*off.variance() - 0.5) < 0.01 * 0.5);
}

TEST_CASE("complex sampler second moments") {
  GaussianStream s(2, 0);
  StreamingMoments d2, o2, re;
  for (int k = 0; k < 1'000'000; ++k) {
    const ComplexSymMatrix a = sample_complex_sym(2, s);
    d2.update(std::norm(a(0, 0)));
    o2.update(std::norm(a(0, 1)));
    re.update(a(0, 0).real());
  }
  CHECK(within_z(finalize(d2), 2.0, 3.0));
  CHECK(std::abs(o2.mean() - 1.0) < 0.01);
  CHECK(within_z(finalize(re), 0.0, 3.0));
}

TEST_CASE("mc_e_real against closed forms") {
  for (unsigned n : {1u, 2u, 5u}) {
    CAPTURE(n);
    const MCEstimate e = mc_e_real(config(n, 1'000'000));
    CHECK(e.samples == 1'000'000);
    CHECK(within_z(e, e_real(n), 3.0));
  }
  for (std::uint64_t seed : {1ull, 2ull, 3ull}) CHECK(within_z(mc_e_real(config(1, 100'000, seed)), e_real(1), 3.0));
}

TEST_CASE("mc_e_complex against (n + 1)!") {
  CHECK(within_z(mc_e_complex(config(1, 100'000)), static_cast<double>(e_complex(1)), 3.0));
  CHECK(within_z(mc_e_complex(config(2, 100'000)), static_cast<double>(e_complex(2)), 3.0));
  CHECK(within_z(mc_e_complex(config(3, 1'000'000)), static_cast<double>(e_complex(3)), 3.0));
}

TEST_CASE("signature tally at n = 2 and n = 3") {
  const SignatureTally t2 = mc_e_real_by_signature(config(2, 1'000'000));
  CHECK(within_z(t2.at(2, 0).estimate, e_real_signed_small(2, 0), 3.0));
  CHECK(within_z(t2.at(1, 1).estimate, e_real_signed_small(1, 1), 3.0));
  CHECK(within_z(t2.at(0, 2).estimate, e_real_signed_small(0, 2), 3.0));

  const SignatureTally t3 = mc_e_real_by_signature(config(3, 1'000'000));
  for (unsigned p = 0; p <= 3; ++p) {
    CAPTURE(p);
    CHECK(within_z(t3.at(p, 3 - p).estimate, e_real_signed_small(p, 3 - p), 3.0));
  }

  for (const SignatureTally* t : {&t2, &t3}) {
    std::uint64_t counted = 0;
    double sum = 0.0;
    for (const auto& c : t->classes) {
      counted += c.count;
      sum += c.sum_abs_det;
    }
    CHECK(counted == t->samples - t->degenerate_count);
    CHECK(sum == t->total_sum_abs_det);
    // -Id symmetry.
    for (unsigned p = 0; p <= t->n; ++p) {
      const auto& a = t->at(p, t->n - p).estimate;
      const auto& b = t->at(t->n - p, p).estimate;
      CHECK(std::abs(a.mean - b.mean) <= 3.0 * (*a.std_error + *b.std_error));
    }
  }
}

TEST_CASE("signature totals agree with mc_e_real on the same draws") {
  const MCConfig c = config(4, 50'000, 5);
  const SignatureTally t = mc_e_real_by_signature(c);
  const MCEstimate e = mc_e_real(c);
  CHECK(t.degenerate_count == 0);
  CHECK(std::abs(t.total.mean - e.mean) <= 1e-12 * e.mean);
}

TEST_CASE("excess degenerate draws are reported") {
  MCConfig c = config(3, 2000);
  c.zero_tol = 1e6;
  CHECK_THROWS_AS(mc_e_real_by_signature(c), DegenerateExcess);
}

TEST_CASE("signature distribution at n = 2") {
  const SignatureDistribution d = mc_signature_distribution(config(2, 200'000));
  CHECK(d.by_class[1].mean > d.by_class[0].mean);
  CHECK(std::abs(d.by_class[0].mean - d.by_class[2].mean) <= 3.0 * (*d.by_class[0].std_error + *d.by_class[2].std_error));
  CHECK(d.by_index.size() == 2);
  CHECK(d.by_index[0].mean + d.by_index[1].mean == doctest::Approx(1.0));
}

TEST_CASE("signature distribution at n = 10 separates indices 0, 2 and 5") {
  const SignatureDistribution d = mc_signature_distribution(config(10, 1'000'000));
  REQUIRE(d.by_index.size() == 6);
  const auto gap = [&](unsigned lo, unsigned hi) {
    const auto& a = d.by_index[lo];
    const auto& b = d.by_index[hi];
    return (b.mean - a.mean) / (a.std_error.value_or(0.0) + b.std_error.value_or(0.0));
  };
  CHECK(gap(0, 2) > 5.0);
  CHECK(gap(2, 5) > 5.0);
  for (unsigned i = 0; i + 1 < 6; ++i) CHECK(d.by_index[i + 1].mean >= d.by_index[i].mean);
  CHECK(std::abs(d.by_class[3].mean - d.by_class[7].mean) <= 3.0 * (*d.by_class[3].std_error + *d.by_class[7].std_error));
}

TEST_CASE("Selberg") {
  CHECK(within_z(mc_selberg(2, 1'000'000, 17), 2.0 / std::sqrt(std::numbers::pi), 3.0));
  CHECK(within_z(mc_selberg(2, 1'000'000, 17), selberg_target(2), 3.0));
  CHECK(within_z(mc_selberg(6, 1'000'000, 17), selberg_target(6), 3.0));
  CHECK_THROWS_AS(mc_selberg(1, 10, 1), std::invalid_argument);
  CHECK_THROWS_AS(mc_selberg(9, 10, 1), std::invalid_argument);
}

TEST_CASE("estimates do not depend on the worker count") {
  const MCEstimate a = mc_e_real(config(3, 50'000, 9, 1));
  const MCEstimate b = mc_e_real(config(3, 50'000, 9, 1));
  const MCEstimate c = mc_e_real(config(3, 50'000, 9, 8));
  CHECK(a.mean == b.mean);
  CHECK(*a.std_error == *b.std_error);
  CHECK(a.mean == c.mean);
  CHECK(*a.std_error == *c.std_error);
  const SignatureTally t1 = mc_e_real_by_signature(config(3, 30'000, 9, 1));
  const SignatureTally t4 = mc_e_real_by_signature(config(3, 30'000, 9, 4));
  CHECK(t1.total_sum_abs_det == t4.total_sum_abs_det);
  CHECK(mc_selberg(4, 30'000, 3, 1).mean == mc_selberg(4, 30'000, 3, 3).mean);
}

TEST_CASE("config validation") {
  CHECK_THROWS_AS(mc_e_real(config(0, 10)), std::invalid_argument);
  CHECK_THROWS_AS(mc_e_real(config(2, 0)), std::invalid_argument);
  CHECK_THROWS_AS(mc_e_real(config(2, 10, 1, 0)), std::invalid_argument);
}
