#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "rrag/linalg.hpp"
#include "rrag/random.hpp"
#include "rrag/stats.hpp"

namespace rrag {

inline constexpr std::uint64_t kDefaultBlockSize = 8192;

/// Samples are split into blocks of block_size; block b draws from stream b of
/// master_seed, so results do not depend on the worker count.
struct MCConfig {
  unsigned n = 1;
  std::uint64_t samples = 1;
  std::uint64_t master_seed = 0;
  unsigned workers = 1;
  /// Absolute eigenvalue threshold for the zero count; defaults to
  /// 1e-9 * (1 + ||A||_F) per draw.
  std::optional<double> zero_tol;
  std::uint64_t block_size = kDefaultBlockSize;

  void validate() const;
};

/// Diagonal entries N(0, 1), off-diagonal N(0, 1/2), drawn row by row over i <= j.
RealSymMatrix sample_real_sym(unsigned n, GaussianStream& stream);
/// Off-diagonal real and imaginary parts N(0, 1/2) each, diagonal parts N(0, 1) each.
ComplexSymMatrix sample_complex_sym(unsigned n, GaussianStream& stream);

/// Mean |det| of real symmetric draws.
MCEstimate mc_e_real(const MCConfig& config);
/// Mean |det|^2 of complex symmetric draws.
MCEstimate mc_e_complex(const MCConfig& config);

struct SignatureClass {
  unsigned p = 0;
  unsigned q = 0;
  std::uint64_t count = 0;
  double sum_abs_det = 0.0;
  double sum_sq_abs_det = 0.0;
  /// Indicator-weighted estimate of e_R(p, q): sum_abs_det over all samples.
  MCEstimate estimate;
  /// Empirical probability of the class over all samples.
  MCEstimate probability;
};

struct SignatureTally {
  unsigned n = 0;
  std::uint64_t samples = 0;
  std::uint64_t degenerate_count = 0;
  /// classes[p] holds signature (p, n - p).
  std::vector<SignatureClass> classes;
  /// Sums of the class sums, added in increasing p.
  double total_sum_abs_det = 0.0;
  double total_sum_sq_abs_det = 0.0;
  MCEstimate total;

  const SignatureClass& at(unsigned p, unsigned q) const;
};

/// Classifies every draw by the signature of its spectrum. Draws with a zero
/// eigenvalue at tolerance join no class and are counted as degenerate.
/// Throws DegenerateExcess when degenerate draws reach 1e-3 of the samples.
SignatureTally mc_e_real_by_signature(const MCConfig& config);

struct SignatureDistribution {
  unsigned n = 0;
  /// by_class[p]: probability of signature (p, n - p).
  std::vector<MCEstimate> by_class;
  /// by_index[i]: probability that min(p, q) = i, for i = 0..n/2.
  std::vector<MCEstimate> by_index;
  std::uint64_t degenerate_count = 0;
};

SignatureDistribution mc_signature_distribution(const MCConfig& config);

/// E|prod_{i<j} (l_j - l_i)| for n i.i.d. standard normals, 2 <= n <= 8.
MCEstimate mc_selberg(unsigned n, std::uint64_t samples, std::uint64_t master_seed, unsigned workers = 1,
                      std::uint64_t block_size = kDefaultBlockSize);

}  // namespace rrag
