#include "rrag/kostlan.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "rrag/errors.hpp"
#include "rrag/parallel.hpp"

namespace rrag {

namespace {

constexpr std::uint64_t kTrialsPerBlock = 64;

bool positive(double v) noexcept { return v >= 0.0; }

struct Screen {
  const UnivariateKostlan& p;
  double offset;
  double slope_bound;  // d * S * margin
  unsigned max_depth;
  unsigned unresolved = 0;

  // Zeros hidden in a same-sign interval.
  unsigned hidden(double a, double fa, double b, double fb, unsigned depth) {
    if (std::min(std::abs(fa), std::abs(fb)) >= slope_bound * (b - a)) return 0;
    if (depth >= max_depth) {
      ++unresolved;
      return 0;
    }
    const double m = 0.5 * (a + b);
    const double fm = p.evaluate(m + offset);
    if (positive(fm) != positive(fa)) return 2;
    return hidden(a, fa, m, fm, depth + 1) + hidden(m, fm, b, fb, depth + 1);
  }
};

}  // namespace

double UnivariateKostlan::evaluate(double t) const noexcept {
  const double c = std::cos(t), s = std::sin(t);
  // Horner in the ratio of the larger coordinate, scaled back by its d-th power.
  if (std::abs(c) >= std::abs(s)) {
    const double r = s / c;
    double acc = 0.0;
    for (unsigned k = 0; k <= d; ++k) acc = acc * r + coeffs[k];
    return acc * std::pow(c, static_cast<int>(d));
  }
  const double r = c / s;
  double acc = 0.0;
  for (unsigned k = d + 1; k-- > 0;) acc = acc * r + coeffs[k];
  return acc * std::pow(s, static_cast<int>(d));
}

void RootCountPolicy::validate() const {
  if (base_grid_factor < 16) throw std::invalid_argument("RootCountPolicy: base_grid_factor must be >= 16");
  if (refine_depth < 20) throw std::invalid_argument("RootCountPolicy: refine_depth must be >= 20");
  if (!(bernstein_margin >= 1.0)) throw std::invalid_argument("RootCountPolicy: bernstein_margin must be >= 1");
}

std::vector<double> kostlan_weights(unsigned d) {
  std::vector<double> w(d + 1);
  const double lf = std::lgamma(d + 1.0);
  for (unsigned k = 0; k <= d; ++k) w[k] = std::exp(0.5 * (lf - std::lgamma(k + 1.0) - std::lgamma(d - k + 1.0)));
  return w;
}

UnivariateKostlan sample_univariate(unsigned d, GaussianStream& stream) {
  if (d == 0) throw std::invalid_argument("sample_univariate: degree must be positive");
  UnivariateKostlan p{d, kostlan_weights(d)};
  for (double& c : p.coeffs) c *= stream.next_normal();
  return p;
}

RootCount count_circle_zeros_detailed(const UnivariateKostlan& p, const RootCountPolicy& policy) {
  policy.validate();
  if (p.d == 0 || p.coeffs.size() != p.d + 1) throw std::invalid_argument("count_circle_zeros: malformed form");
  const unsigned n = policy.base_grid_factor * p.d;
  const double h = std::numbers::pi / n;
  std::vector<double> f(n + 1);
  double sup = 0.0;
  for (unsigned k = 0; k < n; ++k) {
    f[k] = p.evaluate(k * h + policy.frame_rotation);
    sup = std::max(sup, std::abs(f[k]));
  }
  if (!(sup > 0.0)) throw IdenticallyZero("count_circle_zeros: form vanishes on every grid node");
  // P(-x) = (-1)^d P(x) closes the half-circle exactly.
  f[n] = (p.d % 2 == 0) ? f[0] : -f[0];

  Screen screen{p, policy.frame_rotation, p.d * sup * policy.bernstein_margin, policy.refine_depth};
  RootCount out;
  for (unsigned k = 0; k < n; ++k) {
    const double a = k * h, b = (k + 1) * h;
    // A node that is exactly a root counts once; its two intervals carry no sign information.
    if (f[k] == 0.0) {
      ++out.count;
    } else if (f[k + 1] == 0.0) {
      continue;
    } else if (positive(f[k]) != positive(f[k + 1])) {
      ++out.count;
    } else {
      out.count += screen.hidden(a, f[k], b, f[k + 1], 0);
    }
  }
  out.unresolved = screen.unresolved;
  return out;
}

unsigned count_circle_zeros(const UnivariateKostlan& p, const RootCountPolicy& policy) {
  return count_circle_zeros_detailed(p, policy).count;
}

RootsEstimate mc_expected_roots_detailed(unsigned d, std::uint64_t trials, std::uint64_t master_seed,
                                         const RootCountPolicy& policy, unsigned workers) {
  if (d == 0) throw std::invalid_argument("mc_expected_roots: degree must be positive");
  if (trials == 0) throw std::invalid_argument("mc_expected_roots: trials must be positive");
  if (workers == 0) throw std::invalid_argument("mc_expected_roots: workers must be positive");
  policy.validate();
  struct Block {
    StreamingMoments m;
    std::uint64_t unresolved = 0;
    std::uint64_t parity = 0;
  };
  const auto blocks = run_blocks(trials, kTrialsPerBlock, workers, [&](const BlockRange& r) {
    GaussianStream stream(master_seed, r.index);
    Block b;
    for (std::uint64_t t = r.begin; t < r.end; ++t) {
      const RootCount c = count_circle_zeros_detailed(sample_univariate(d, stream), policy);
      b.m.update(c.count);
      b.unresolved += (c.unresolved > 0);
      b.parity += (c.count % 2 != d % 2);
    }
    return b;
  });
  RootsEstimate out;
  StreamingMoments all;
  for (const Block& b : blocks) {
    all.merge(b.m);
    out.unresolved_trials += b.unresolved;
    out.parity_violations += b.parity;
  }
  out.estimate = finalize(all);
  out.estimate.master_seed = master_seed;
  out.estimate.workers = workers;
  return out;
}

MCEstimate mc_expected_roots(unsigned d, std::uint64_t trials, std::uint64_t master_seed,
                             const RootCountPolicy& policy, unsigned workers) {
  return mc_expected_roots_detailed(d, trials, master_seed, policy, workers).estimate;
}

// ---- ternary forms ------------------------------------------------------------

TernaryKostlan::TernaryKostlan(unsigned d) : d_(d), coeffs_(static_cast<std::size_t>(d + 1) * (d + 2) / 2, 0.0) {}

TernaryKostlan TernaryKostlan::from_terms(unsigned d, const std::vector<Term>& terms) {
  TernaryKostlan s(d);
  for (const auto& [e, c] : terms) {
    if (e[0] + e[1] + e[2] != d) throw std::invalid_argument("TernaryKostlan::from_terms: exponents must sum to d");
    s.coefficient(e[0], e[1]) += c;
  }
  return s;
}

TernaryKostlan TernaryKostlan::scaled(double lambda) const {
  TernaryKostlan s = *this;
  for (double& c : s.coeffs_) c *= lambda;
  return s;
}

TernaryKostlan sample_ternary(unsigned d, GaussianStream& stream) {
  if (d == 0) throw std::invalid_argument("sample_ternary: degree must be positive");
  TernaryKostlan s(d);
  const double lf = std::lgamma(d + 1.0);
  for (unsigned a = 0; a <= d; ++a)
    for (unsigned b = 0; a + b <= d; ++b) {
      const unsigned c = d - a - b;
      const double w = std::exp(0.5 * (lf - std::lgamma(a + 1.0) - std::lgamma(b + 1.0) - std::lgamma(c + 1.0)));
      s.coefficient(a, b) = w * stream.next_normal();
    }
  return s;
}

namespace {

// Power tables up to degree d on the stack for the usual sizes.
struct Powers {
  static constexpr unsigned kInline = 65;
  double inline_storage[3][kInline];
  std::vector<double> heap;
  double* p[3];

  Powers(const Vec3& x, unsigned d) {
    if (d + 1 <= kInline) {
      for (int i = 0; i < 3; ++i) p[i] = inline_storage[i];
    } else {
      heap.resize(3 * (d + 1));
      for (int i = 0; i < 3; ++i) p[i] = heap.data() + i * (d + 1);
    }
    for (int i = 0; i < 3; ++i) {
      p[i][0] = 1.0;
      for (unsigned k = 1; k <= d; ++k) p[i][k] = p[i][k - 1] * x[i];
    }
  }
};

}  // namespace

double evaluate(const TernaryKostlan& s, const Vec3& x) noexcept {
  const unsigned d = s.degree();
  const Powers pw(x, d);
  const double* c = s.coefficients().data();
  double total = 0.0;
  for (unsigned a = 0; a <= d; ++a) {
    double row = 0.0;
    for (unsigned b = 0; a + b <= d; ++b) row += *c++ * pw.p[1][b] * pw.p[2][d - a - b];
    total += pw.p[0][a] * row;
  }
  return total;
}

double evaluate_with_gradient(const TernaryKostlan& s, const Vec3& x, Vec3& grad) noexcept {
  const unsigned d = s.degree();
  const Powers pw(x, d);
  const double* c = s.coefficients().data();
  double value = 0.0, g0 = 0.0, g1 = 0.0, g2 = 0.0;
  for (unsigned a = 0; a <= d; ++a) {
    double row = 0.0, row1 = 0.0, row2 = 0.0;
    for (unsigned b = 0; a + b <= d; ++b) {
      const unsigned e = d - a - b;
      const double ci = *c++;
      row += ci * pw.p[1][b] * pw.p[2][e];
      if (b > 0) row1 += ci * b * pw.p[1][b - 1] * pw.p[2][e];
      if (e > 0) row2 += ci * e * pw.p[1][b] * pw.p[2][e - 1];
    }
    value += pw.p[0][a] * row;
    if (a > 0) g0 += a * pw.p[0][a - 1] * row;
    g1 += pw.p[0][a] * row1;
    g2 += pw.p[0][a] * row2;
  }
  grad = {g0, g1, g2};
  return value;
}

Vec3 gradient(const TernaryKostlan& s, const Vec3& x) noexcept {
  Vec3 g;
  evaluate_with_gradient(s, x, g);
  return g;
}

}  // namespace rrag
