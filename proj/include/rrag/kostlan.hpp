#pragma once

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include "rrag/random.hpp"
#include "rrag/stats.hpp"

namespace rrag {

using Vec3 = std::array<double, 3>;

/// P(x, y) = sum_k coeffs[k] x^k y^(d - k).
struct UnivariateKostlan {
  unsigned d = 0;
  std::vector<double> coeffs;

  /// P(cos t, sin t).
  double evaluate(double t) const noexcept;
};

struct RootCountPolicy {
  unsigned base_grid_factor = 64;
  unsigned refine_depth = 40;
  double bernstein_margin = 2.0;
  /// Offset added to the circle parameter; counts are invariant under it.
  double frame_rotation = 0.0;

  void validate() const;
};

struct RootCount {
  unsigned count = 0;
  /// Intervals that still looked suspicious at refine_depth (tangential near-misses).
  unsigned unresolved = 0;
};

/// sqrt(C(d, k)) for k = 0..d, computed through log-gamma.
std::vector<double> kostlan_weights(unsigned d);

UnivariateKostlan sample_univariate(unsigned d, GaussianStream& stream);

/// Zeros of t -> P(cos t, sin t) on [0, pi), i.e. on RP^1. Sign changes on a
/// uniform grid are counted; a same-sign interval [a, b] is bisected while
/// min(|P(a)|, |P(b)|) < d * S * margin * (b - a), where S is the largest
/// sampled |P| (Bernstein: |P'| <= d sup|P|). A sign flip at a midpoint adds
/// two zeros; a node where P is exactly 0 counts as one zero. Throws
/// IdenticallyZero when every grid value vanishes.
RootCount count_circle_zeros_detailed(const UnivariateKostlan& p, const RootCountPolicy& policy = {});
unsigned count_circle_zeros(const UnivariateKostlan& p, const RootCountPolicy& policy = {});

struct RootsEstimate {
  MCEstimate estimate;
  std::uint64_t unresolved_trials = 0;
  /// Trials whose count had the wrong parity (count != d mod 2).
  std::uint64_t parity_violations = 0;
};

RootsEstimate mc_expected_roots_detailed(unsigned d, std::uint64_t trials, std::uint64_t master_seed,
                                         const RootCountPolicy& policy = {}, unsigned workers = 1);
MCEstimate mc_expected_roots(unsigned d, std::uint64_t trials, std::uint64_t master_seed,
                             const RootCountPolicy& policy = {}, unsigned workers = 1);

/// Ternary form sum_{a+b+c=d} coeff(a, b) x0^a x1^b x2^c.
class TernaryKostlan {
 public:
  using Term = std::pair<std::array<unsigned, 3>, double>;

  TernaryKostlan() = default;
  explicit TernaryKostlan(unsigned d);
  /// Explicit form; exponents in each term must sum to d.
  static TernaryKostlan from_terms(unsigned d, const std::vector<Term>& terms);

  unsigned degree() const noexcept { return d_; }
  std::size_t size() const noexcept { return coeffs_.size(); }
  static std::size_t index(unsigned d, unsigned a, unsigned b) noexcept {
    return static_cast<std::size_t>(a) * (2 * d + 3 - a) / 2 + b;
  }
  double coefficient(unsigned a, unsigned b) const { return coeffs_.at(index(d_, a, b)); }
  double& coefficient(unsigned a, unsigned b) { return coeffs_.at(index(d_, a, b)); }
  const std::vector<double>& coefficients() const noexcept { return coeffs_; }

  TernaryKostlan scaled(double lambda) const;

 private:
  unsigned d_ = 0;
  std::vector<double> coeffs_;
};

/// sqrt(d! / (a! b! c!)) weights on i.i.d. standard normals.
TernaryKostlan sample_ternary(unsigned d, GaussianStream& stream);

double evaluate(const TernaryKostlan& s, const Vec3& x) noexcept;
Vec3 gradient(const TernaryKostlan& s, const Vec3& x) noexcept;
/// Value and gradient in one pass.
double evaluate_with_gradient(const TernaryKostlan& s, const Vec3& x, Vec3& grad) noexcept;

}  // namespace rrag
