#include "rrag/rmt_montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "rrag/errors.hpp"
#include "rrag/parallel.hpp"

namespace rrag {

namespace {

constexpr double kDegenerateLimit = 1e-3;
const double kHalfStd = std::sqrt(0.5);

MCEstimate stamp(MCEstimate e, std::uint64_t seed, unsigned workers, std::uint64_t degenerate = 0) {
  e.master_seed = seed;
  e.workers = workers;
  e.degenerate_count = degenerate;
  return e;
}

MCEstimate proportion(std::uint64_t hits, std::uint64_t samples) {
  const double h = static_cast<double>(hits);
  return estimate_from_sums(h, h, samples);
}

struct ClassSums {
  std::uint64_t count = 0;
  double sum = 0.0;
  double sum_sq = 0.0;
};

struct BlockTally {
  std::vector<ClassSums> classes;
  std::uint64_t degenerate = 0;
};

BlockTally tally_block(const MCConfig& config, const BlockRange& r) {
  BlockTally t;
  t.classes.resize(config.n + 1);
  GaussianStream stream(config.master_seed, r.index);
  for (std::uint64_t s = r.begin; s < r.end; ++s) {
    const RealSymMatrix a = sample_real_sym(config.n, stream);
    const Signature sig = signature(jacobi_eigen(a), config.zero_tol.value_or(default_zero_tol(a)));
    if (sig.zero > 0) {
      ++t.degenerate;
      continue;
    }
    const double v = std::abs(lu_det(a));
    ClassSums& c = t.classes[sig.positive];
    ++c.count;
    c.sum += v;
    c.sum_sq += v * v;
  }
  return t;
}

struct MergedTally {
  std::vector<ClassSums> classes;
  std::uint64_t degenerate = 0;
};

MergedTally tally(const MCConfig& config) {
  config.validate();
  const auto blocks = run_blocks(config.samples, config.block_size, config.workers,
                                 [&](const BlockRange& r) { return tally_block(config, r); });
  MergedTally m;
  m.classes.resize(config.n + 1);
  for (const BlockTally& b : blocks) {
    m.degenerate += b.degenerate;
    for (std::size_t p = 0; p < b.classes.size(); ++p) {
      m.classes[p].count += b.classes[p].count;
      m.classes[p].sum += b.classes[p].sum;
      m.classes[p].sum_sq += b.classes[p].sum_sq;
    }
  }
  if (static_cast<double>(m.degenerate) >= kDegenerateLimit * static_cast<double>(config.samples)) {
    throw DegenerateExcess("signature tally: " + std::to_string(m.degenerate) + " of " +
                           std::to_string(config.samples) + " draws have a zero eigenvalue at tolerance");
  }
  return m;
}

}  // namespace

void MCConfig::validate() const {
  if (n == 0) throw std::invalid_argument("MCConfig: n must be positive");
  if (samples == 0) throw std::invalid_argument("MCConfig: samples must be positive");
  if (workers == 0) throw std::invalid_argument("MCConfig: workers must be positive");
  if (block_size == 0) throw std::invalid_argument("MCConfig: block_size must be positive");
  if (zero_tol && !(*zero_tol >= 0.0)) throw std::invalid_argument("MCConfig: zero_tol must be nonnegative");
}

RealSymMatrix sample_real_sym(unsigned n, GaussianStream& stream) {
  RealSymMatrix a(n);
  for (unsigned i = 0; i < n; ++i)
    for (unsigned j = i; j < n; ++j) a(i, j) = (i == j) ? stream.next_normal() : kHalfStd * stream.next_normal();
  return a;
}

ComplexSymMatrix sample_complex_sym(unsigned n, GaussianStream& stream) {
  ComplexSymMatrix a(n);
  for (unsigned i = 0; i < n; ++i)
    for (unsigned j = i; j < n; ++j) {
      const double s = (i == j) ? 1.0 : kHalfStd;
      const double re = stream.next_normal();
      const double im = stream.next_normal();
      a(i, j) = {s * re, s * im};
    }
  return a;
}

MCEstimate mc_e_real(const MCConfig& config) {
  config.validate();
  const auto blocks = run_blocks(config.samples, config.block_size, config.workers, [&](const BlockRange& r) {
    GaussianStream stream(config.master_seed, r.index);
    StreamingMoments m;
    for (std::uint64_t s = r.begin; s < r.end; ++s) m.update(std::abs(lu_det(sample_real_sym(config.n, stream))));
    return m;
  });
  StreamingMoments all;
  for (const auto& m : blocks) all.merge(m);
  return stamp(finalize(all), config.master_seed, config.workers);
}

MCEstimate mc_e_complex(const MCConfig& config) {
  config.validate();
  const auto blocks = run_blocks(config.samples, config.block_size, config.workers, [&](const BlockRange& r) {
    GaussianStream stream(config.master_seed, r.index);
    StreamingMoments m;
    for (std::uint64_t s = r.begin; s < r.end; ++s) m.update(std::norm(lu_det(sample_complex_sym(config.n, stream))));
    return m;
  });
  StreamingMoments all;
  for (const auto& m : blocks) all.merge(m);
  return stamp(finalize(all), config.master_seed, config.workers);
}

const SignatureClass& SignatureTally::at(unsigned p, unsigned q) const {
  if (p + q != n) throw std::invalid_argument("SignatureTally::at: p + q must equal n");
  return classes.at(p);
}

SignatureTally mc_e_real_by_signature(const MCConfig& config) {
  const MergedTally m = tally(config);
  SignatureTally t;
  t.n = config.n;
  t.samples = config.samples;
  t.degenerate_count = m.degenerate;
  t.classes.resize(config.n + 1);
  for (unsigned p = 0; p <= config.n; ++p) {
    const ClassSums& c = m.classes[p];
    SignatureClass& out = t.classes[p];
    out.p = p;
    out.q = config.n - p;
    out.count = c.count;
    out.sum_abs_det = c.sum;
    out.sum_sq_abs_det = c.sum_sq;
    out.estimate = stamp(estimate_from_sums(c.sum, c.sum_sq, config.samples), config.master_seed, config.workers,
                         m.degenerate);
    out.probability = stamp(proportion(c.count, config.samples), config.master_seed, config.workers, m.degenerate);
    t.total_sum_abs_det += c.sum;
    t.total_sum_sq_abs_det += c.sum_sq;
  }
  t.total = stamp(estimate_from_sums(t.total_sum_abs_det, t.total_sum_sq_abs_det, config.samples), config.master_seed,
                  config.workers, m.degenerate);
  return t;
}

SignatureDistribution mc_signature_distribution(const MCConfig& config) {
  const MergedTally m = tally(config);
  SignatureDistribution d;
  d.n = config.n;
  d.degenerate_count = m.degenerate;
  std::vector<std::uint64_t> by_index(config.n / 2 + 1, 0);
  for (unsigned p = 0; p <= config.n; ++p) {
    d.by_class.push_back(stamp(proportion(m.classes[p].count, config.samples), config.master_seed, config.workers,
                               m.degenerate));
    by_index[std::min(p, config.n - p)] += m.classes[p].count;
  }
  for (std::uint64_t hits : by_index)
    d.by_index.push_back(stamp(proportion(hits, config.samples), config.master_seed, config.workers, m.degenerate));
  return d;
}

MCEstimate mc_selberg(unsigned n, std::uint64_t samples, std::uint64_t master_seed, unsigned workers,
                      std::uint64_t block_size) {
  if (n < 2 || n > 8) throw std::invalid_argument("mc_selberg: n must lie in 2..8");
  MCConfig config{n, samples, master_seed, workers, std::nullopt, block_size};
  config.validate();
  const auto blocks = run_blocks(samples, block_size, workers, [&](const BlockRange& r) {
    GaussianStream stream(master_seed, r.index);
    StreamingMoments m;
    std::vector<double> l(n);
    for (std::uint64_t s = r.begin; s < r.end; ++s) {
      for (double& x : l) x = stream.next_normal();
      double v = 1.0;
      for (unsigned i = 0; i < n; ++i)
        for (unsigned j = i + 1; j < n; ++j) v *= std::abs(l[j] - l[i]);
      m.update(v);
    }
    return m;
  });
  StreamingMoments all;
  for (const auto& m : blocks) all.merge(m);
  return stamp(finalize(all), master_seed, workers);
}

}  // namespace rrag
