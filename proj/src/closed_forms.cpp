#include "rrag/closed_forms.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "rrag/errors.hpp"

namespace rrag {
namespace {

using boost::multiprecision::cpp_bin_float_50;
using Integer = BigRational::Integer;

constexpr double kPi = std::numbers::pi;
constexpr double kSqrt2 = std::numbers::sqrt2;
const double kSqrtPi = std::sqrt(kPi);

Integer factorial(unsigned n) {
  Integer f = 1;
  for (unsigned k = 2; k <= n; ++k) f *= k;
  return f;
}

Integer binomial(unsigned n, unsigned k) {
  Integer c = 1;
  for (unsigned i = 0; i < k; ++i) {
    c *= (n - i);
    c /= (i + 1);
  }
  return c;
}

cpp_bin_float_50 to_float50(const BigRational& r) {
  return cpp_bin_float_50(r.numerator()) / cpp_bin_float_50(r.denominator());
}

void require_even(unsigned n, const char* what) {
  if (n == 0 || n % 2 != 0) throw std::invalid_argument(std::string(what) + ": n must be even and positive");
}

}  // namespace

// ---- BigRational -------------------------------------------------------------

BigRational::BigRational(Integer num, Integer den) : num_(std::move(num)), den_(std::move(den)) {
  if (den_ == 0) throw std::invalid_argument("BigRational: zero denominator");
  normalize();
}

void BigRational::normalize() {
  if (den_.sign() < 0) {
    num_ = -num_;
    den_ = -den_;
  }
  const Integer g = boost::multiprecision::gcd(num_, den_);
  if (g > 1) {
    num_ /= g;
    den_ /= g;
  }
  if (num_ == 0) den_ = 1;
}

double BigRational::to_double() const { return to_float50(*this).convert_to<double>(); }

std::string BigRational::to_string() const {
  if (den_ == 1) return num_.str();
  return num_.str() + "/" + den_.str();
}

BigRational operator+(const BigRational& a, const BigRational& b) {
  return BigRational(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
}
BigRational operator-(const BigRational& a, const BigRational& b) {
  return BigRational(a.num_ * b.den_ - b.num_ * a.den_, a.den_ * b.den_);
}
BigRational operator*(const BigRational& a, const BigRational& b) {
  return BigRational(a.num_ * b.num_, a.den_ * b.den_);
}
BigRational operator/(const BigRational& a, const BigRational& b) {
  if (b.num_ == 0) throw std::domain_error("BigRational: division by zero");
  return BigRational(a.num_ * b.den_, a.den_ * b.num_);
}

// ---- QuadraticValue ----------------------------------------------------------

double QuadraticValue::to_double() const {
  const cpp_bin_float_50 root2 = boost::multiprecision::sqrt(cpp_bin_float_50(2));
  const int su = u.sign(), sv = v.sign();
  if (su * sv >= 0) return (to_float50(u) + to_float50(v) * root2).convert_to<double>();
  const BigRational norm = u * u - BigRational(2) * v * v;
  return (to_float50(norm) / (to_float50(u) - to_float50(v) * root2)).convert_to<double>();
}

std::string QuadraticValue::to_string() const { return u.to_string() + " + (" + v.to_string() + ")*sqrt(2)"; }

// ---- HalfGamma -----------------------------------------------------------------

HalfGamma::HalfGamma(int twice_argument) : twice_arg_(twice_argument), factor_(1) {
  if (twice_argument < 1) throw std::invalid_argument("HalfGamma: argument must be positive");
  // Walk up from Gamma(1) = 1 or Gamma(1/2) = sqrt(pi).
  int t = (twice_argument % 2 == 0) ? 2 : 1;
  for (; t < twice_argument; t += 2) factor_ *= BigRational(t, 2);
}

double HalfGamma::value() const {
  const double f = factor_.to_double();
  return has_sqrt_pi() ? f * kSqrtPi : f;
}

double HalfGamma::log_value() const {
  double lf = boost::multiprecision::log(to_float50(factor_)).convert_to<double>();
  return has_sqrt_pi() ? lf + 0.5 * std::log(kPi) : lf;
}

HalfGamma HalfGamma::next() const {
  return HalfGamma(twice_arg_ + 2, factor_ * BigRational(twice_arg_, 2));
}

// ---- complex determinants ------------------------------------------------------

std::uint64_t e_complex(unsigned n) {
  if (n > 19) throw Overflow("e_complex: (n+1)! exceeds 64 bits for n = " + std::to_string(n));
  std::uint64_t f = 1;
  for (std::uint64_t k = 2; k <= n + 1; ++k) f *= k;
  return f;
}

double e_complex_float(unsigned n) { return std::tgamma(static_cast<double>(n) + 2.0); }

std::uint64_t cycle_sum_bruteforce(unsigned n) {
  if (n < 1 || n > 9) throw std::invalid_argument("cycle_sum_bruteforce: n must be in 1..9");
  std::array<unsigned, 9> perm{};
  for (unsigned i = 0; i < n; ++i) perm[i] = i;
  std::uint64_t total = 0;
  do {
    unsigned seen = 0;
    unsigned cycles = 0;
    for (unsigned start = 0; start < n; ++start) {
      if (seen & (1u << start)) continue;
      ++cycles;
      for (unsigned k = start; !(seen & (1u << k)); k = perm[k]) seen |= 1u << k;
    }
    total += std::uint64_t{1} << cycles;
  } while (std::next_permutation(perm.begin(), perm.begin() + n));
  return total;
}

// ---- real determinants ----------------------------------------------------------

double e_real_asymptote(unsigned n) {
  return 2.0 * kSqrt2 / kPi * HalfGamma(static_cast<int>(n) + 2).value();
}

double e_real(unsigned n) {
  if (n == 0) return 1.0;
  if (n % 2 == 1) return e_real_asymptote(n);
  const unsigned m = n / 2;
  // n! / (m! 2^n) accumulated as a product of small ratios.
  double prefactor = 1.0;
  for (unsigned k = m + 1; k <= n; ++k) prefactor *= static_cast<double>(k) / 2.0;
  prefactor = std::ldexp(prefactor, -static_cast<int>(m));
  // sum_{k<m} (-1)^k Gamma(k+3/2)/k!, divided by sqrt(pi), with adjacent terms
  // paired: each pair (2j, 2j+1) collapses to -Gamma(2j+3/2) / (2 (2j+1)!).
  double paired = 0.0;
  double term = 0.5;  // Gamma(3/2) / (1! sqrt pi)
  for (unsigned j = 0; 2 * j + 1 < m; ++j) {
    paired += term;
    const double a = 2.0 * j;
    term *= (a + 1.5) * (a + 2.5) / ((a + 2.0) * (a + 3.0));
  }
  double sum = -0.5 * paired;
  if (m % 2 == 1) {
    // Unpaired last term Gamma(m + 1/2) / ((m-1)! sqrt pi).
    double last = 0.5;
    for (unsigned k = 1; k < m; ++k) last *= (k + 0.5) / k;
    sum += last;
  }
  const double sign_m = (m % 2 == 0) ? 1.0 : -1.0;
  return prefactor * (sign_m - sign_m * 4.0 * kSqrt2 * sum);
}

QuadraticValue e_real_exact(unsigned n) {
  if (n == 0) return {BigRational(1), BigRational(0)};
  require_even(n, "e_real_exact");
  if (n > 40) throw std::invalid_argument("e_real_exact: exact path limited to n <= 40");
  const unsigned m = n / 2;
  const BigRational base(factorial(n), factorial(m) * (Integer(1) << n));
  // Gamma(k + 3/2) / sqrt(pi) = (2k+1)!! / 2^(k+1).
  BigRational sum(0);
  Integer double_fact = 1;
  for (unsigned k = 0; k < m; ++k) {
    double_fact *= (2 * k + 1);
    const BigRational term(double_fact, (Integer(1) << (k + 1)) * factorial(k));
    sum = (k % 2 == 0) ? sum + term : sum - term;
  }
  const BigRational sign_m = (m % 2 == 0) ? BigRational(1) : BigRational(-1);
  return {sign_m * base, -sign_m * BigRational(4) * base * sum};
}

double e_real_asymptotic_ratio(unsigned n) { return e_real(n) / e_real_asymptote(n); }

QuadraticValue a_seq_exact(unsigned j) {
  QuadraticValue a{BigRational(-7, 3), BigRational(8, 3)};
  for (unsigned k = 1; k <= j; ++k) {
    a = BigRational(4 * k + 2, 2 * k + 3) * a;
    a.u += BigRational(1);
  }
  return a;
}

QuadraticValue a_seq_closed_form(unsigned j) {
  const BigRational denom(2 * j + 3);
  return {BigRational(-4) / denom - BigRational(1), BigRational(Integer(8) << j) / denom};
}

double a_seq(unsigned j) {
  double a = (8.0 * kSqrt2 - 7.0) / 3.0;
  for (unsigned k = 1; k <= j; ++k) a = (4.0 * k + 2.0) / (2.0 * k + 3.0) * a + 1.0;
  return a;
}

QuadraticValue b_seq_exact(unsigned m) {
  if (m == 0) throw std::invalid_argument("b_seq: m must be positive");
  if (m == 1) {
    QuadraticValue b = a_seq_exact(0);
    b.u += BigRational(1);
    return b;
  }
  QuadraticValue b{BigRational(0), BigRational(0)};
  QuadraticValue a = a_seq_exact(0);
  for (unsigned j = 0; j < m; ++j) {
    if (j > 0) {
      a = BigRational(4 * j + 2, 2 * j + 3) * a;
      a.u += BigRational(1);
    }
    const BigRational c(binomial(m - 1, j));
    const QuadraticValue term = ((m - 1 - j) % 2 == 0 ? c : -c) * a;
    b = b + term;
  }
  return b;
}

double b_seq(unsigned m) { return b_seq_exact(m).to_double(); }

double e_real_even_bm(unsigned n, GammaRegime regime) {
  require_even(n, "e_real_even_bm");
  const unsigned m = n / 2;
  const double b = b_seq(m);
  const HalfGamma g(static_cast<int>(n) + 3);  // Gamma((n+3)/2)
  const bool use_log = regime == GammaRegime::logarithmic || (regime == GammaRegime::automatic && n > 20);
  if (!use_log) {
    const double num = std::tgamma(n + 1.0) * g.value();
    const double den = std::tgamma(m + 1.0) * std::tgamma(static_cast<double>(m)) * std::ldexp(1.0, static_cast<int>(n)) *
                       kSqrtPi;
    return num / den * b;
  }
  const double log_prefactor = std::lgamma(n + 1.0) + g.log_value() - std::lgamma(m + 1.0) -
                               std::lgamma(static_cast<double>(m)) - n * std::log(2.0) - 0.5 * std::log(kPi);
  return std::exp(log_prefactor) * b;
}

double e_real_signed_small(unsigned p, unsigned q) {
  const double s2pi = std::sqrt(2.0 * kPi);
  switch (p + q) {
    case 0:
      return 1.0;
    case 1:
      return 1.0 / s2pi;
    case 2:
      return (p == 1) ? 1.0 / kSqrt2 : (kSqrt2 - 1.0) / 4.0;
    case 3: {
      // Definite classes (min(p, q) = 0) are the small ones; -Id swaps p and q.
      const double sign = (std::min(p, q) == 0) ? 1.0 : -1.0;
      return 3.0 / (4.0 * s2pi) - sign / (2.0 * kSqrtPi);
    }
    default:
      throw OutOfTable("e_real_signed_small: no closed form for p + q = " + std::to_string(p + q) +
                       "; use Monte Carlo");
  }
}

// ---- orthogonal group --------------------------------------------------------

double log_vol_orthogonal(unsigned n) {
  if (n == 0) throw std::invalid_argument("vol_orthogonal: n must be positive");
  const double nn = n;
  double log_gammas = 0.0;
  for (unsigned j = 1; j <= n; ++j) log_gammas += HalfGamma(static_cast<int>(j) + 2).log_value();
  return std::lgamma(nn + 1.0) + nn * (nn + 1.0) / 4.0 * std::log(kPi) + nn * (nn - 1.0) / 4.0 * std::log(2.0) -
         log_gammas;
}

double vol_orthogonal(unsigned n) { return std::exp(log_vol_orthogonal(n)); }

double log_vol_orthogonal_odd(unsigned n) {
  if (n % 2 == 0) throw std::invalid_argument("log_vol_orthogonal_odd: n must be odd");
  const double m = (n - 1) / 2;
  const double nn = n;
  double log_prod = 0.0;
  for (unsigned j = 0; j < (n - 1) / 2; ++j) {
    log_prod += std::lgamma(j + 1.0) + HalfGamma(2 * static_cast<int>(j) + 3).log_value();
  }
  return m * (nn + 2.0) * 0.5 * std::log(kPi) + (0.5 * m + m * m + nn) * std::log(2.0) - log_prod;
}

double vol_log_asymptotic_residual(unsigned n) {
  if (n < 4 || n > 64) throw std::invalid_argument("vol_log_asymptotic_residual: n must be in 4..64");
  const double nn = n;
  const double lhs = log_vol_orthogonal(n) - nn * 0.5 * std::log(2.0) - nn * (nn - 1.0) / 4.0 * std::log(kPi);
  const double main_terms =
      -nn * nn * std::log(nn) / 4.0 + nn * nn * (3.0 / 8.0 + std::log(2.0) / 2.0) + nn * std::log(nn) / 4.0;
  return lhs - main_terms;
}

double selberg_target(unsigned n) {
  // 2^n sqrt2^n prod Gamma(1 + j/2) / sqrt(2 pi)^n = prod Gamma(1 + j/2) / Gamma(3/2)^n.
  double log_value = 0.0;
  for (unsigned j = 1; j <= n; ++j) log_value += HalfGamma(static_cast<int>(j) + 2).log_value();
  log_value += n * (1.5 * std::log(2.0) - 0.5 * std::log(2.0 * kPi));
  return std::exp(log_value);
}

// ---- moment integrals -----------------------------------------------------------

double eta(unsigned k) {
  const HalfGamma g(static_cast<int>(k) + 2);
  if (g.has_sqrt_pi()) return g.rational_factor().to_double() / 2.0;
  return g.rational_factor().to_double() / (2.0 * kSqrtPi);
}

namespace {

// Gamma(i + j + 5/2) / (pi 2^(i + j + 7/2)): the inhomogeneous term of both steps.
double psi_increment(unsigned i, unsigned j) {
  const int s = static_cast<int>(i + j);
  return HalfGamma(2 * s + 5).value() / (kPi * std::ldexp(kSqrt2, s + 3));
}

}  // namespace

double psi(unsigned i, unsigned j, PsiPath path) {
  double value = (kSqrt2 - 1.0) / (8.0 * std::sqrt(2.0 * kPi));
  unsigned ci = 0, cj = 0;
  auto step_i = [&] {
    value = (ci + 1.0) * value - psi_increment(ci, cj);
    ++ci;
  };
  auto step_j = [&] {
    value = (cj + 1.5) * value + psi_increment(ci, cj);
    ++cj;
  };
  if (path == PsiPath::rows_first) {
    while (ci < i) step_i();
    while (cj < j) step_j();
  } else {
    while (cj < j) step_j();
    while (ci < i) step_i();
  }
  return value;
}

// ---- projective geometry ------------------------------------------------------

double vol_fs_real_projective(unsigned n) { return kSqrtPi / HalfGamma(static_cast<int>(n) + 1).value(); }

double kostlan_expected_roots(unsigned d) {
  return vol_fs_real_projective(1) / kSqrtPi * std::sqrt(static_cast<double>(d));
}

double critical_density_constant() {
  return e_real_signed_small(0, 1) * vol_fs_real_projective(2) / kSqrtPi;
}

}  // namespace rrag
