#include <cmath>
#include <numbers>

#include "doctest.h"
#include "rrag/closed_forms.hpp"
#include "rrag/errors.hpp"

using namespace rrag;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kSqrt2 = std::numbers::sqrt2;
const double kSqrtPi = std::sqrt(kPi);

bool rel_close(double a, double b, double tol) { return std::abs(a - b) <= tol * std::abs(b); }

}  // namespace

TEST_CASE("BigRational normalizes") {
  const BigRational r(BigRational::Integer(6), BigRational::Integer(-4));
  CHECK(r.numerator() == -3);
  CHECK(r.denominator() == 2);
  CHECK(r.to_string() == "-3/2");
  CHECK(BigRational(1) / BigRational(3) + BigRational(2) / BigRational(3) == BigRational(1));
  CHECK_THROWS_AS(BigRational(BigRational::Integer(1), BigRational::Integer(0)), std::invalid_argument);
}

TEST_CASE("HalfGamma recursion") {
  const HalfGamma half(1);
  CHECK(half.has_sqrt_pi());
  CHECK(half.rational_factor() == BigRational(1));
  CHECK(rel_close(half.value(), kSqrtPi, 1e-15));
  HalfGamma g = half;
  for (int k = 0; k < 30; ++k) {
    const HalfGamma h = g.next();
    CHECK(h.rational_factor() == BigRational(g.twice_argument()) / BigRational(2) * g.rational_factor());
    CHECK(rel_close(h.value(), std::tgamma(h.twice_argument() / 2.0), 1e-13));
    CHECK(rel_close(h.log_value(), std::lgamma(h.twice_argument() / 2.0), 1e-13));
    g = h;
  }
  CHECK(HalfGamma(2).value() == 1.0);
  CHECK(HalfGamma(10).rational_factor() == BigRational(24));
}

TEST_CASE("e_complex") {
  CHECK(e_complex(0) == 1);
  CHECK(e_complex(1) == 2);
  CHECK(e_complex(3) == 24);
  CHECK(e_complex(19) == 2432902008176640000ull);
  CHECK_THROWS_AS(e_complex(20), Overflow);
  CHECK(rel_close(e_complex_float(20), 51090942171709440000.0, 1e-15));
}

TEST_CASE("cycle sums equal (n + 1)!") {
  CHECK(cycle_sum_bruteforce(1) == 2);
  CHECK(cycle_sum_bruteforce(2) == 6);
  CHECK(cycle_sum_bruteforce(8) == 362880);
  for (unsigned n = 1; n <= 9; ++n) CHECK(cycle_sum_bruteforce(n) == e_complex(n));
}

TEST_CASE("e_real examples") {
  CHECK(e_real(0) == 1.0);
  CHECK(rel_close(e_real(1), std::sqrt(2.0 / kPi), 1e-15));
  CHECK(rel_close(e_real(2), kSqrt2 - 0.5, 1e-14));
  CHECK(rel_close(e_real(3), 1.1968268412042982, 1e-14));
  CHECK(rel_close(e_real(5), 15.0 / (2.0 * std::sqrt(2.0 * kPi)), 1e-14));
  CHECK(rel_close(e_real(6), 165.0 * kSqrt2 / 32.0 - 15.0 / 8.0, 1e-14));
  CHECK(rel_close(e_real(8), 105.0 / 16.0 * (13.0 * kSqrt2 / 8.0 + 1.0), 1e-14));
}

TEST_CASE("e_real exact path in Q[sqrt 2]") {
  CHECK(e_real_exact(2) == QuadraticValue{BigRational(-1) / BigRational(2), BigRational(1)});
  CHECK(e_real_exact(4) == QuadraticValue{BigRational(3) / BigRational(4), BigRational(3) / BigRational(4)});
  CHECK(e_real_exact(6) == QuadraticValue{BigRational(-15) / BigRational(8), BigRational(165) / BigRational(32)});
  for (unsigned n = 2; n <= 40; n += 2) {
    CAPTURE(n);
    CHECK(rel_close(e_real_exact(n).to_double(), e_real(n), 1e-14));
  }
  CHECK_THROWS_AS(e_real_exact(3), std::invalid_argument);
  CHECK_THROWS_AS(e_real_exact(42), std::invalid_argument);
}

TEST_CASE("two even-n routes agree") {
  CHECK(rel_close(e_real_even_bm(2), e_real(2), 1e-12));
  CHECK(rel_close(e_real_even_bm(4), 0.75 * (kSqrt2 + 1.0), 1e-12));
  CHECK(rel_close(e_real_even_bm(8), 105.0 / 16.0 * (13.0 * kSqrt2 / 8.0 + 1.0), 1e-12));
  for (unsigned n = 2; n <= 40; n += 2) {
    CAPTURE(n);
    CHECK(rel_close(e_real_even_bm(n), e_real(n), 1e-10));
  }
  // Both gamma regimes at the crossover.
  CHECK(rel_close(e_real_even_bm(20, GammaRegime::direct), e_real_even_bm(20, GammaRegime::logarithmic), 1e-10));
  CHECK_THROWS_AS(e_real_even_bm(3), std::invalid_argument);
  CHECK_THROWS_AS(e_real_even_bm(0), std::invalid_argument);
}

TEST_CASE("a_j and b_m") {
  CHECK(rel_close(a_seq(0), (8.0 * kSqrt2 - 7.0) / 3.0, 1e-15));
  CHECK(rel_close(a_seq(1), 1.2 * a_seq(0) + 1.0, 1e-15));
  CHECK(rel_close(a_seq(1), 2.7254834, 1e-7));
  CHECK(rel_close(b_seq(1), 4.0 * (2.0 * kSqrt2 - 1.0) / 3.0, 1e-15));
  for (unsigned j = 0; j <= 64; ++j) {
    CAPTURE(j);
    CHECK(a_seq_exact(j) == a_seq_closed_form(j));
    CHECK(rel_close(a_seq(j), a_seq_closed_form(j).to_double(), 1e-12));
  }
  for (unsigned m = 1; m <= 20; ++m) {
    CAPTURE(m);
    CHECK(rel_close(b_seq(m), b_seq_exact(m).to_double(), 1e-13));
  }
}

TEST_CASE("signature-restricted table") {
  CHECK(e_real_signed_small(0, 0) == 1.0);
  CHECK(rel_close(e_real_signed_small(1, 0), 1.0 / std::sqrt(2.0 * kPi), 1e-15));
  CHECK(rel_close(e_real_signed_small(2, 0), (kSqrt2 - 1.0) / 4.0, 1e-15));
  CHECK(rel_close(e_real_signed_small(1, 1), 1.0 / kSqrt2, 1e-15));
  CHECK(rel_close(e_real_signed_small(3, 0), 3.0 / (4.0 * std::sqrt(2.0 * kPi)) - 1.0 / (2.0 * kSqrtPi), 1e-14));
  CHECK(rel_close(e_real_signed_small(2, 1), 3.0 / (4.0 * std::sqrt(2.0 * kPi)) + 1.0 / (2.0 * kSqrtPi), 1e-14));
  CHECK(rel_close(e_real_signed_small(3, 0), 0.0171119, 1e-5));
  CHECK_THROWS_AS(e_real_signed_small(2, 2), OutOfTable);
  CHECK_THROWS_AS(e_real_signed_small(4, 0), OutOfTable);
}

TEST_CASE("signature table sums to the totals") {
  CHECK(std::abs(2.0 * e_real_signed_small(2, 0) + e_real_signed_small(1, 1) - e_real(2)) <= 1e-12);
  CHECK(std::abs(2.0 * (e_real_signed_small(3, 0) + e_real_signed_small(2, 1)) - e_real(3)) <= 1e-12);
  CHECK(2.0 * e_real_signed_small(1, 0) == doctest::Approx(e_real(1)).epsilon(1e-15));
  for (unsigned p = 0; p <= 3; ++p)
    for (unsigned q = 0; p + q <= 3; ++q) CHECK(e_real_signed_small(p, q) == e_real_signed_small(q, p));
}

TEST_CASE("orthogonal group volumes") {
  CHECK(rel_close(vol_orthogonal(1), 2.0, 1e-15));
  CHECK(rel_close(vol_orthogonal(2), 4.0 * kPi * kSqrt2, 1e-14));
  CHECK(rel_close(vol_orthogonal(3), 32.0 * kSqrt2 * kPi * kPi, 1e-14));
  for (unsigned n = 1; n <= 64; ++n) {
    CAPTURE(n);
    CHECK(std::abs(log_vol_orthogonal(n) - std::log(vol_orthogonal(n))) <= 1e-12 * (1.0 + std::abs(log_vol_orthogonal(n))));
  }
  for (unsigned n = 3; n <= 63; n += 2) {
    CAPTURE(n);
    CHECK(std::abs(log_vol_orthogonal_odd(n) - log_vol_orthogonal(n)) <= 1e-10 * std::abs(log_vol_orthogonal(n)));
  }
}

TEST_CASE("volume asymptotic residual is O(n)") {
  CHECK(std::isfinite(vol_log_asymptotic_residual(4)));
  CHECK(std::abs(vol_log_asymptotic_residual(8) / 8.0) < 2.0);
  CHECK(std::abs(vol_log_asymptotic_residual(64) / 64.0) < 2.0);
  double lo = 1e300, hi = -1e300;
  for (unsigned n = 8; n <= 64; ++n) {
    const double r = vol_log_asymptotic_residual(n) / n;
    lo = std::min(lo, r);
    hi = std::max(hi, r);
  }
  CHECK(hi - lo < 1.0);
  CHECK_THROWS_AS(vol_log_asymptotic_residual(3), std::invalid_argument);
}

TEST_CASE("asymptotic ratio") {
  CHECK(e_real_asymptotic_ratio(7) == 1.0);
  CHECK(rel_close(e_real_asymptotic_ratio(2), kPi * (kSqrt2 - 0.5) / (2.0 * kSqrt2), 1e-14));
  CHECK(rel_close(e_real_asymptotic_ratio(2), 1.0154, 1e-4));
  CHECK(std::abs(e_real_asymptotic_ratio(40) - 1.0) < std::abs(e_real_asymptotic_ratio(10) - 1.0));
  CHECK(rel_close(e_real_asymptote(5), e_real(5), 1e-15));
}

TEST_CASE("Selberg targets") {
  CHECK(rel_close(selberg_target(2), 2.0 / kSqrtPi, 1e-14));
  CHECK(rel_close(selberg_target(4), 3.8197186342054880, 1e-12));
  CHECK(rel_close(selberg_target(6), 96.977046, 1e-7));
}

TEST_CASE("eta and psi") {
  CHECK(eta(1) == 0.25);
  CHECK(rel_close(eta(0), 1.0 / (2.0 * kSqrtPi), 1e-15));
  CHECK(rel_close(eta(4), 1.0 / kSqrtPi, 1e-15));
  CHECK(rel_close(psi(0, 0), (kSqrt2 - 1.0) / (8.0 * std::sqrt(2.0 * kPi)), 1e-15));
  CHECK(rel_close(psi(0, 0), 0.0206559, 1e-5));
  CHECK(rel_close(psi(1, 0), 1.0 / (8.0 * kSqrtPi) - 7.0 * kSqrt2 / (64.0 * kSqrtPi), 1e-13));
  // High-precision double quadrature of the defining integral.
  CHECK(rel_close(psi(1, 0), -0.016744925894343862, 1e-13));
  CHECK(rel_close(psi(0, 1), 0.068384708127569990, 1e-13));
  CHECK(rel_close(psi(2, 3), 0.81322769763270892, 1e-12));
}

TEST_CASE("psi path independence") {
  for (unsigned i = 0; i <= 32; ++i)
    for (unsigned j = 0; j <= 32; ++j) {
      CAPTURE(i);
      CAPTURE(j);
      const double a = psi(i, j, PsiPath::rows_first);
      const double b = psi(i, j, PsiPath::columns_first);
      CHECK(std::abs(a - b) <= 1e-12 * std::abs(b));
    }
}

TEST_CASE("geometry constants") {
  CHECK(rel_close(vol_fs_real_projective(1), kSqrtPi, 1e-15));
  CHECK(rel_close(vol_fs_real_projective(2), 2.0, 1e-15));
  CHECK(rel_close(kostlan_expected_roots(9), 3.0, 1e-15));
  CHECK(rel_close(critical_density_constant(), kSqrt2 / kPi, 1e-14));
}
