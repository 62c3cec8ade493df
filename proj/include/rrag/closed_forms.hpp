#pragma once

#include <compare>
#include <cstdint>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

namespace rrag {

/// Reduced fraction of arbitrary-precision integers; the denominator is positive.
class BigRational {
 public:
  using Integer = boost::multiprecision::cpp_int;

  BigRational() = default;
  BigRational(long long value) : num_(value) {}  // NOLINT: implicit by design of arithmetic
  explicit BigRational(Integer value) : num_(std::move(value)) {}
  BigRational(Integer num, Integer den);

  const Integer& numerator() const noexcept { return num_; }
  const Integer& denominator() const noexcept { return den_; }
  int sign() const noexcept { return num_.sign(); }

  double to_double() const;
  std::string to_string() const;

  BigRational operator-() const { return BigRational(-num_, den_); }
  friend BigRational operator+(const BigRational& a, const BigRational& b);
  friend BigRational operator-(const BigRational& a, const BigRational& b);
  friend BigRational operator*(const BigRational& a, const BigRational& b);
  friend BigRational operator/(const BigRational& a, const BigRational& b);
  BigRational& operator+=(const BigRational& b) { return *this = *this + b; }
  BigRational& operator*=(const BigRational& b) { return *this = *this * b; }

  friend bool operator==(const BigRational&, const BigRational&) = default;

 private:
  void normalize();
  Integer num_{0};
  Integer den_{1};
};

/// u + v * sqrt(2) with rational u, v.
struct QuadraticValue {
  BigRational u;
  BigRational v;

  /// Float image; uses the conjugate (u^2 - 2 v^2) / (u - v sqrt 2) when the
  /// two parts have opposite signs, so no cancellation occurs.
  double to_double() const;
  std::string to_string() const;

  friend QuadraticValue operator+(const QuadraticValue& a, const QuadraticValue& b) {
    return {a.u + b.u, a.v + b.v};
  }
  friend QuadraticValue operator-(const QuadraticValue& a, const QuadraticValue& b) {
    return {a.u - b.u, a.v - b.v};
  }
  friend QuadraticValue operator*(const QuadraticValue& a, const QuadraticValue& b) {
    return {a.u * b.u + BigRational(2) * a.v * b.v, a.u * b.v + a.v * b.u};
  }
  friend QuadraticValue operator*(const BigRational& s, const QuadraticValue& a) {
    return {s * a.u, s * a.v};
  }
  friend bool operator==(const QuadraticValue&, const QuadraticValue&) = default;
};

/// Gamma at a positive integer or half-integer x = twice_argument / 2, held as
/// an exact rational multiple of 1 (integer x) or of sqrt(pi) (half-integer x).
class HalfGamma {
 public:
  explicit HalfGamma(int twice_argument);

  int twice_argument() const noexcept { return twice_arg_; }
  const BigRational& rational_factor() const noexcept { return factor_; }
  bool has_sqrt_pi() const noexcept { return twice_arg_ % 2 == 1; }

  double value() const;
  double log_value() const;
  /// Gamma(x + 1) = x Gamma(x).
  HalfGamma next() const;

 private:
  HalfGamma(int twice_argument, BigRational factor) : twice_arg_(twice_argument), factor_(std::move(factor)) {}
  int twice_arg_;
  BigRational factor_;
};

// ---- expected determinants -------------------------------------------------

/// (n + 1)!, exact for n <= 19; throws Overflow beyond.
std::uint64_t e_complex(unsigned n);
/// (n + 1)! in floating point, any n.
double e_complex_float(unsigned n);

/// Sum over all permutations of {1..n} of 2^(number of cycles), n in 1..9.
std::uint64_t cycle_sum_bruteforce(unsigned n);

/// Expected |det| of the real symmetric Gaussian ensemble; e_real(0) = 1.
double e_real(unsigned n);
/// Exact value in Q[sqrt 2] for even n <= 40 (and n = 0).
QuadraticValue e_real_exact(unsigned n);

enum class GammaRegime { automatic, direct, logarithmic };

/// Even n only. Evaluates through the b_m sequence, independently of e_real.
/// The automatic regime uses direct products for n <= 20 and log-gamma above.
double e_real_even_bm(unsigned n, GammaRegime regime = GammaRegime::automatic);

/// (2 sqrt 2 / pi) Gamma((n + 2) / 2): exact for odd n, the large-n equivalent for even n.
double e_real_asymptote(unsigned n);
double e_real_asymptotic_ratio(unsigned n);

/// a_0 = (8 sqrt 2 - 7) / 3, a_j = (4j + 2) / (2j + 3) a_{j-1} + 1.
double a_seq(unsigned j);
QuadraticValue a_seq_exact(unsigned j);
/// a_j = 8 sqrt 2 2^j / (2j + 3) - 4 / (2j + 3) - 1.
QuadraticValue a_seq_closed_form(unsigned j);
/// b_1 = a_0 + 1; b_m = sum_j (-1)^(m-1-j) C(m-1, j) a_j for m > 1.
double b_seq(unsigned m);
QuadraticValue b_seq_exact(unsigned m);

/// Signature-restricted expectation e_R(p, q) for p + q <= 3; throws OutOfTable above.
double e_real_signed_small(unsigned p, unsigned q);

// ---- orthogonal group and Selberg ------------------------------------------

double vol_orthogonal(unsigned n);
double log_vol_orthogonal(unsigned n);
/// Odd n only: the alternative product over j! Gamma(3/2 + j), n = 2m + 1.
double log_vol_orthogonal_odd(unsigned n);
/// ln(Vol(O_n) / (sqrt2^n sqrtpi^(n(n-1)/2))) minus its three leading terms, 4 <= n <= 64.
double vol_log_asymptotic_residual(unsigned n);

/// E|prod_{i<j} (l_j - l_i)| for n i.i.d. standard normals.
double selberg_target(unsigned n);

// ---- moment integrals -------------------------------------------------------

/// int_0^inf x^(k+1) dmu(x) = Gamma((k + 2) / 2) / (2 sqrt pi).
double eta(unsigned k);

enum class PsiPath { rows_first, columns_first };

/// psi_ij = int_{0<=x<y} |xy| (x^(2i) y^(2j+1) - y^(2i) x^(2j+1)) dmu(x) dmu(y),
/// grown from psi_00 by the i- and j-recurrences along the requested path.
double psi(unsigned i, unsigned j, PsiPath path = PsiPath::rows_first);

// ---- projective geometry constants -----------------------------------------

/// Fubini-Study volume of RP^n: sqrt(pi) / Gamma((n + 1) / 2).
double vol_fs_real_projective(unsigned n);
/// Expected number of real roots of a degree-d Kostlan binary form: sqrt(d).
double kostlan_expected_roots(unsigned d);
/// Limit of E(#Crit_i) / d on a random plane curve of degree d:
/// e_R(0, 1) Vol_FS(RP^2) / sqrt(pi) = sqrt(2) / pi.
double critical_density_constant();

}  // namespace rrag
