#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "rrag/stats.hpp"

namespace rrag {

inline constexpr std::uint64_t kDefaultSeed = 20240611;

/// One compared quantity. Exact checks carry no stderr and no z.
struct ResultRow {
  std::string name;
  MCEstimate estimate;
  double target = 0.0;
  std::optional<double> z;
  std::string tolerance;
  bool pass = false;
  /// Reported next to a criterion without deciding it.
  bool informational = false;
};

struct CriterionResult {
  int id = 0;
  std::string key;
  std::string title;
  std::vector<ResultRow> rows;
  double seconds = 0.0;

  bool pass() const noexcept;
};

struct AcceptanceOptions {
  std::uint64_t seed = kDefaultSeed;
  unsigned workers = 1;
  /// Progress hook, called after each criterion.
  std::function<void(const CriterionResult&)> on_done;
};

/// Short names usable with --only: closed-forms, matrix, selberg, signature,
/// roots, curves, complex, determinism.
const std::vector<std::string>& criterion_keys();
/// Accepts a key or the criterion number; nullopt when unknown.
std::optional<int> criterion_id(const std::string& key_or_number);

CriterionResult run_criterion(int id, const AcceptanceOptions& options);
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options, const std::vector<int>& only = {});

}  // namespace rrag
