#pragma once

#include <cstdint>
#include <optional>
#include <span>

namespace rrag {

/// Monte Carlo result. stderr is absent when fewer than two samples were seen.
struct MCEstimate {
  double mean = 0.0;
  std::optional<double> std_error;
  std::uint64_t samples = 0;
  std::uint64_t degenerate_count = 0;
  std::uint64_t master_seed = 0;
  unsigned workers = 1;
};

/// Welford running mean and sum of squared deviations.
class StreamingMoments {
 public:
  void update(double x) noexcept;
  /// Chan et al. pairwise combination; deterministic for a fixed merge order.
  void merge(const StreamingMoments& other) noexcept;

  std::uint64_t count() const noexcept { return count_; }
  double mean() const noexcept { return mean_; }
  double m2() const noexcept { return m2_; }
  /// Unbiased sample variance, absent for count < 2.
  std::optional<double> variance() const noexcept;

 private:
  std::uint64_t count_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

/// Mean and standard error sqrt(M2 / (count (count - 1))).
MCEstimate finalize(const StreamingMoments& m);

/// Estimate from a raw sum and sum of squares over count samples.
MCEstimate estimate_from_sums(double sum, double sum_sq, std::uint64_t count);

/// |mean - target| <= z * stderr. An exact estimator (stderr zero) passes only
/// when mean == target; otherwise a zero or absent stderr throws ZeroStderr.
bool within_z(const MCEstimate& estimate, double target, double z);

/// (mean - target) / stderr, or 0 for an exact match.
double z_score(const MCEstimate& estimate, double target);

struct ChiSquareResult {
  double statistic = 0.0;
  int degrees_of_freedom = 0;
  double p_value = 1.0;
};

/// Goodness of fit against equal expected counts in every bin.
/// Throws SparseBins when fewer than 2 bins or expected count < 5.
ChiSquareResult chi_square_uniform(std::span<const std::uint64_t> bin_counts);

/// Upper tail P(X > x) of a chi-square variable with dof degrees of freedom.
double chi_square_survival(double x, int dof);

}  // namespace rrag
