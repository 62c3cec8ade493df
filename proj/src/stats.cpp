#include "rrag/stats.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>

#include "rrag/errors.hpp"

namespace rrag {

void StreamingMoments::update(double x) noexcept {
  ++count_;
  const double delta = x - mean_;
  mean_ += delta / static_cast<double>(count_);
  m2_ += delta * (x - mean_);
}

void StreamingMoments::merge(const StreamingMoments& other) noexcept {
  if (other.count_ == 0) return;
  if (count_ == 0) {
    *this = other;
    return;
  }
  const double na = static_cast<double>(count_);
  const double nb = static_cast<double>(other.count_);
  const double n = na + nb;
  const double delta = other.mean_ - mean_;
  mean_ += delta * (nb / n);
  m2_ += other.m2_ + delta * delta * (na * nb / n);
  count_ += other.count_;
}

std::optional<double> StreamingMoments::variance() const noexcept {
  if (count_ < 2) return std::nullopt;
  return m2_ / static_cast<double>(count_ - 1);
}

MCEstimate finalize(const StreamingMoments& m) {
  MCEstimate e;
  e.mean = m.mean();
  e.samples = m.count();
  if (m.count() >= 2) {
    const double n = static_cast<double>(m.count());
    e.std_error = std::sqrt(m.m2() / (n * (n - 1.0)));
  }
  return e;
}

MCEstimate estimate_from_sums(double sum, double sum_sq, std::uint64_t count) {
  MCEstimate e;
  e.samples = count;
  if (count == 0) return e;
  const double n = static_cast<double>(count);
  e.mean = sum / n;
  if (count >= 2) e.std_error = std::sqrt(std::max(0.0, sum_sq - sum * e.mean) / (n * (n - 1.0)));
  return e;
}

bool within_z(const MCEstimate& estimate, double target, double z) {
  const double se = estimate.std_error.value_or(0.0);
  if (se > 0.0) return std::abs(estimate.mean - target) <= z * se;
  if (estimate.mean == target) return true;
  throw ZeroStderr("within_z: zero standard error with mean " + std::to_string(estimate.mean) +
                   " != target " + std::to_string(target));
}

double z_score(const MCEstimate& estimate, double target) {
  const double se = estimate.std_error.value_or(0.0);
  if (se > 0.0) return (estimate.mean - target) / se;
  return estimate.mean == target ? 0.0 : std::copysign(INFINITY, estimate.mean - target);
}

double chi_square_survival(double x, int dof) {
  if (x <= 0.0) return 1.0;
  return boost::math::gamma_q(0.5 * dof, 0.5 * x);
}

ChiSquareResult chi_square_uniform(std::span<const std::uint64_t> bin_counts) {
  if (bin_counts.size() < 2) throw SparseBins("chi_square_uniform: need at least 2 bins");
  double total = 0.0;
  for (auto c : bin_counts) total += static_cast<double>(c);
  const double expected = total / static_cast<double>(bin_counts.size());
  if (expected < 5.0) {
    throw SparseBins("chi_square_uniform: expected count per bin " + std::to_string(expected) +
                     " < 5");
  }
  // Sorted summation makes the statistic exactly invariant under bin permutations.
  std::vector<std::uint64_t> sorted(bin_counts.begin(), bin_counts.end());
  std::sort(sorted.begin(), sorted.end());
  ChiSquareResult r;
  for (auto c : sorted) {
    const double diff = static_cast<double>(c) - expected;
    r.statistic += diff * diff / expected;
  }
  r.degrees_of_freedom = static_cast<int>(bin_counts.size()) - 1;
  r.p_value = chi_square_survival(r.statistic, r.degrees_of_freedom);
  return r;
}

}  // namespace rrag
