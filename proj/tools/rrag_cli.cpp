#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "rrag/acceptance.hpp"
#include "rrag/closed_forms.hpp"
#include "rrag/curve_topology.hpp"
#include "rrag/errors.hpp"
#include "rrag/kostlan.hpp"
#include "rrag/rmt_montecarlo.hpp"

namespace {

using nlohmann::ordered_json;
using rrag::MCEstimate;
using rrag::ResultRow;

constexpr int kExitAssert = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::uint64_t default_seed() {
  if (const char* env = std::getenv("RRAG_SEED"); env && *env) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (*end != '\0') throw UsageError("RRAG_SEED must be a nonnegative integer");
    return v;
  }
  return rrag::kDefaultSeed;
}

struct Common {
  std::uint64_t seed = 0;
  unsigned workers = 1;
  std::string format = "json";
  std::string output;
  bool assert_results = false;
};

struct Output {
  ordered_json manifest;
  std::vector<ResultRow> results;
  ordered_json extra = ordered_json::object();
  /// Plot-ready rows for CSV; results are used when empty.
  std::vector<std::vector<std::string>> table;
  std::vector<std::string> table_header;
};

ordered_json to_json(const ResultRow& r) {
  ordered_json j;
  j["name"] = r.name;
  j["estimate"] = {{"mean", r.estimate.mean},
                   {"stderr", r.estimate.std_error ? ordered_json(*r.estimate.std_error) : ordered_json(nullptr)},
                   {"samples", r.estimate.samples}};
  j["target"] = r.target;
  j["z"] = r.z ? ordered_json(*r.z) : ordered_json(nullptr);
  j["pass"] = r.pass;
  if (!r.tolerance.empty()) j["tolerance"] = r.tolerance;
  if (r.informational) j["informational"] = true;
  return j;
}

// Shortest text that round-trips.
std::string number(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

void emit(const Common& c, Output& out) {
  out.manifest["end"] = utc_now();
  std::ostringstream text;
  if (c.format == "json") {
    ordered_json j;
    j["manifest"] = out.manifest;
    j["results"] = ordered_json::array();
    for (const auto& r : out.results) j["results"].push_back(to_json(r));
    for (auto it = out.extra.begin(); it != out.extra.end(); ++it) j[it.key()] = it.value();
    text << j.dump(2) << '\n';
  } else {
    for (auto it = out.manifest.begin(); it != out.manifest.end(); ++it) text << "# " << it.key() << '=' << it.value().dump() << '\n';
    if (!out.table.empty()) {
      for (std::size_t i = 0; i < out.table_header.size(); ++i) text << (i ? "," : "") << out.table_header[i];
      text << '\n';
      for (const auto& row : out.table) {
        for (std::size_t i = 0; i < row.size(); ++i) text << (i ? "," : "") << row[i];
        text << '\n';
      }
    } else {
      text << "name,mean,stderr,samples,target,z,pass\n";
      for (const auto& r : out.results) {
        text << r.name << ',' << number(r.estimate.mean) << ','
             << (r.estimate.std_error ? number(*r.estimate.std_error) : "") << ',' << r.estimate.samples << ','
             << number(r.target) << ',' << (r.z ? number(*r.z) : "") << ',' << (r.pass ? "true" : "false") << '\n';
      }
    }
  }
  if (c.output.empty()) {
    std::cout << text.str();
  } else {
    std::ofstream f(c.output);
    if (!f) throw UsageError("cannot open output file " + c.output);
    f << text.str();
  }
}

ordered_json manifest(const std::string& sub, const Common& c, ordered_json params) {
  ordered_json m;
  m["subcommand"] = sub;
  m["parameters"] = std::move(params);
  m["master_seed"] = c.seed;
  m["workers"] = c.workers;
  m["tool_version"] = RRAG_VERSION;
  m["start"] = utc_now();
  return m;
}

ResultRow z_result(std::string name, const MCEstimate& e, double target, double bound = 3.0) {
  ResultRow r;
  r.name = std::move(name);
  r.estimate = e;
  r.target = target;
  r.tolerance = "|z| <= 3";
  if (e.std_error && *e.std_error > 0.0) {
    r.z = (e.mean - target) / *e.std_error;
    r.pass = std::abs(*r.z) <= bound;
  } else {
    r.z = 0.0;
    r.pass = e.mean == target;
  }
  return r;
}

bool all_pass(const std::vector<ResultRow>& rows) {
  for (const auto& r : rows)
    if (!r.informational && !r.pass) return false;
  return true;
}

rrag::MCConfig matrix_config(unsigned n, std::uint64_t samples, const Common& c) {
  rrag::MCConfig m;
  m.n = n;
  m.samples = samples;
  m.master_seed = c.seed;
  m.workers = c.workers;
  return m;
}

ordered_json vec(const rrag::Vec3& v) { return ordered_json::array({v[0], v[1], v[2]}); }

ordered_json dump_trial(const rrag::CurveDensityConfig& cfg, const rrag::IcoMesh& mesh, std::uint64_t trial) {
  ordered_json j;
  j["trial"] = trial;
  rrag::GaussianStream stream(cfg.master_seed, trial);
  const rrag::TernaryKostlan s = rrag::sample_ternary(cfg.d, stream);
  try {
    const rrag::TracedCurve curve = rrag::trace_zero_set(s, mesh, cfg.trace);
    const rrag::CriticalPoints cp = rrag::extract_critical_points(s, curve, cfg.morse);
    j["loops"] = ordered_json::array();
    for (const auto& loop : curve.loops) {
      ordered_json l = ordered_json::array();
      for (const auto& p : loop) l.push_back(vec(p));
      j["loops"].push_back(l);
    }
    j["critical_points"] = ordered_json::array();
    for (const auto& r : cp.records) {
      j["critical_points"].push_back(
          {{"point", vec(r.point)}, {"index", r.index}, {"p_value", r.p_value}, {"loop", r.loop}, {"near_crit_p", r.near_crit_p}});
    }
    j["counts"] = {{"loops_s2", curve.loops.size()},
                   {"components_rp2", rrag::count_components_rp2(curve)},
                   {"index0_rp2", cp.index0_rp2()},
                   {"index1_rp2", cp.index1_rp2()}};
  } catch (const rrag::Error& e) {
    j["error"] = e.what();
  }
  return j;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"random real algebraic geometry experiments"};
  app.require_subcommand(1);
  Common common;
  try {
    common.seed = default_seed();
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  unsigned n = 0, degree = 0;
  std::uint64_t samples = 0, trials = 0;
  std::optional<unsigned> mesh_level;
  bool complex_ensemble = false;
  std::string dump_path;
  std::uint64_t dump_trials = 1;
  std::vector<std::string> only;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--seed", common.seed, "master seed (default: $RRAG_SEED or 20240611)");
    sub->add_option("--workers", common.workers, "worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--format", common.format, "output format")->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("--output", common.output, "write to PATH instead of stdout");
    sub->add_flag("--assert", common.assert_results, "exit 1 when any result misses its bound");
  };

  auto* closed = app.add_subcommand("closed-form", "closed-form table for n = 1..n_max");
  closed->add_option("--n", n, "n_max (<= 40)")->default_val(10)->check(CLI::Range(1, 40));
  auto* matrix = app.add_subcommand("mc-matrix", "mean |det| of random symmetric matrices");
  matrix->add_option("--n", n, "matrix size")->default_val(2)->check(CLI::PositiveNumber);
  matrix->add_option("--samples", samples)->default_val(1'000'000)->check(CLI::PositiveNumber);
  matrix->add_flag("--complex", complex_ensemble, "complex ensemble, mean |det|^2");
  auto* sig = app.add_subcommand("mc-signature", "|det| and probabilities by signature");
  sig->add_option("--n", n, "matrix size")->default_val(3)->check(CLI::PositiveNumber);
  sig->add_option("--samples", samples)->default_val(1'000'000)->check(CLI::PositiveNumber);
  auto* sel = app.add_subcommand("selberg", "E|Vandermonde| of i.i.d. normals");
  sel->add_option("--n", n, "number of variables (2..8)")->default_val(4)->check(CLI::Range(2, 8));
  sel->add_option("--samples", samples)->default_val(1'000'000)->check(CLI::PositiveNumber);
  auto* roots = app.add_subcommand("roots", "real roots of Kostlan binary forms");
  roots->add_option("--degree", degree)->default_val(25)->check(CLI::PositiveNumber);
  roots->add_option("--trials", trials)->default_val(2000)->check(CLI::PositiveNumber);
  auto* curves = app.add_subcommand("curves", "critical points on random plane curves");
  curves->add_option("--degree", degree)->default_val(10)->check(CLI::Range(1, 48));
  curves->add_option("--trials", trials)->default_val(100)->check(CLI::PositiveNumber);
  curves->add_option("--mesh-level", mesh_level, "icosphere level (default: smallest with edge < 0.5/d)")
      ->check(CLI::Range(0, 9));
  curves->add_option("--dump", dump_path, "write per-trial loops and critical points as JSON");
  curves->add_option("--dump-trials", dump_trials, "number of trials to dump")->default_val(1);
  auto* cplx = app.add_subcommand("complex-crit", "resultant degree of complex sections");
  cplx->add_option("--degree", degree)->default_val(4)->check(CLI::Range(2, 8));
  cplx->add_option("--trials", trials)->default_val(20)->check(CLI::PositiveNumber);
  auto* report = app.add_subcommand("report", "run the acceptance criteria");
  report->add_option("--only", only, "criterion key or number (repeatable): " + [] {
    std::string k;
    for (const auto& s : rrag::criterion_keys()) k += (k.empty() ? "" : ", ") + s;
    return k;
  }());
  for (auto* sub : {closed, matrix, sig, sel, roots, curves, cplx, report}) add_common(sub);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    Output out;
    bool pass = true;
    if (closed->parsed()) {
      out.manifest = manifest("closed-form", common, {{"n", n}});
      out.table_header = {"n", "e_complex", "e_real", "e_real_bm", "route_delta", "asymptotic_ratio", "vol_orthogonal"};
      ordered_json table = ordered_json::array();
      for (unsigned k = 1; k <= n; ++k) {
        const double er = rrag::e_real(k);
        const double ec = rrag::e_complex_float(k);
        const bool even = k % 2 == 0;
        const double bm = even ? rrag::e_real_even_bm(k) : er;
        const double delta = even ? std::abs(bm - er) / er : 0.0;
        const double ratio = rrag::e_real_asymptotic_ratio(k);
        const double vol = rrag::vol_orthogonal(k);
        table.push_back({{"n", k}, {"e_complex", ec}, {"e_real", er}, {"e_real_bm", even ? ordered_json(bm) : ordered_json(nullptr)},
                         {"route_delta", delta}, {"asymptotic_ratio", ratio}, {"vol_orthogonal", vol}});
        out.table.push_back({std::to_string(k), number(ec), number(er), even ? number(bm) : "", number(delta),
                             number(ratio), number(vol)});
        if (even) {
          ResultRow r;
          r.name = "e_real_routes.n=" + std::to_string(k);
          r.estimate.mean = bm;
          r.target = er;
          r.tolerance = "rel 1e-10";
          r.pass = delta <= 1e-10;
          out.results.push_back(r);
        }
      }
      out.extra["table"] = table;
    } else if (matrix->parsed()) {
      out.manifest = manifest("mc-matrix", common, {{"n", n}, {"samples", samples}, {"complex", complex_ensemble}});
      const auto cfg = matrix_config(n, samples, common);
      if (complex_ensemble) {
        out.results.push_back(z_result("mc_e_complex.n=" + std::to_string(n), rrag::mc_e_complex(cfg), rrag::e_complex_float(n)));
      } else {
        out.results.push_back(z_result("mc_e_real.n=" + std::to_string(n), rrag::mc_e_real(cfg), rrag::e_real(n)));
      }
    } else if (sig->parsed()) {
      out.manifest = manifest("mc-signature", common, {{"n", n}, {"samples", samples}});
      const rrag::SignatureTally t = rrag::mc_e_real_by_signature(matrix_config(n, samples, common));
      ordered_json probs = ordered_json::array();
      for (const auto& c : t.classes) {
        const std::string tag = "p=" + std::to_string(c.p) + ".q=" + std::to_string(c.q);
        if (n <= 3) {
          out.results.push_back(z_result("e_real_signed." + tag, c.estimate, rrag::e_real_signed_small(c.p, c.q)));
        }
        probs.push_back({{"p", c.p}, {"q", c.q}, {"count", c.count}, {"probability", c.probability.mean},
                         {"stderr", c.probability.std_error.value_or(0.0)}, {"e_real_signed", c.estimate.mean}});
      }
      out.results.push_back(z_result("total", t.total, rrag::e_real(n)));
      out.extra["classes"] = probs;
      out.extra["degenerate_count"] = t.degenerate_count;
    } else if (sel->parsed()) {
      out.manifest = manifest("selberg", common, {{"n", n}, {"samples", samples}});
      out.results.push_back(z_result("mc_selberg.n=" + std::to_string(n),
                                     rrag::mc_selberg(n, samples, common.seed, common.workers), rrag::selberg_target(n)));
    } else if (roots->parsed()) {
      out.manifest = manifest("roots", common, {{"degree", degree}, {"trials", trials}});
      const auto r = rrag::mc_expected_roots_detailed(degree, trials, common.seed, {}, common.workers);
      out.results.push_back(z_result("mc_expected_roots.d=" + std::to_string(degree), r.estimate,
                                     rrag::kostlan_expected_roots(degree)));
      out.extra["unresolved_trials"] = r.unresolved_trials;
      out.extra["parity_violations"] = r.parity_violations;
    } else if (curves->parsed()) {
      rrag::CurveDensityConfig cfg;
      cfg.d = degree;
      cfg.trials = trials;
      cfg.master_seed = common.seed;
      cfg.workers = common.workers;
      cfg.mesh_level = mesh_level;
      const rrag::CurveDensityResult r = rrag::mc_critical_point_density(cfg);
      out.manifest = manifest("curves", common, {{"degree", degree}, {"trials", trials}, {"mesh_level", r.mesh_level}});
      const double c = rrag::critical_density_constant();
      for (const auto& [name, e] : {std::pair{"index0_density", r.index0}, std::pair{"index1_density", r.index1}})
        out.results.push_back(z_result(name, e, c));
      ResultRow b0;
      b0.name = "components_density";
      b0.estimate = r.components;
      b0.target = 1.2 * c;
      b0.tolerance = "< target";
      b0.pass = r.components.mean < b0.target;
      out.results.push_back(b0);
      ResultRow valid;
      valid.name = "abort_fraction";
      valid.estimate.mean = static_cast<double>(r.aborted) / static_cast<double>(r.trials);
      valid.estimate.samples = r.trials;
      valid.target = 0.02;
      valid.tolerance = "< target";
      valid.pass = r.valid();
      out.results.push_back(valid);
      out.extra["balanced_trials"] = r.balanced_trials;
      out.extra["valid_trials"] = r.valid_trials();
      out.extra["bins_abs_x2"] = r.bins;
      try {
        const auto chi = rrag::chi_square_uniform(r.bins);
        out.extra["chi_square"] = {{"statistic", chi.statistic}, {"dof", chi.degrees_of_freedom}, {"p_value", chi.p_value}};
      } catch (const rrag::SparseBins& e) {
        out.extra["chi_square"] = {{"error", e.what()}};
      }
      out.extra["abort_reasons"] = r.abort_reasons;
      out.table_header = {"band_low", "band_high", "count"};
      for (std::size_t b = 0; b < r.bins.size(); ++b) {
        const double w = 1.0 / static_cast<double>(r.bins.size());
        out.table.push_back({number(b * w), number((b + 1) * w), std::to_string(r.bins[b])});
      }
      if (!dump_path.empty()) {
        const rrag::IcoMesh mesh = rrag::build_icosphere(r.mesh_level);
        ordered_json dump = {{"degree", degree}, {"mesh_level", r.mesh_level}, {"master_seed", common.seed},
                             {"trials", ordered_json::array()}};
        for (std::uint64_t t = 0; t < std::min(dump_trials, trials); ++t) dump["trials"].push_back(dump_trial(cfg, mesh, t));
        std::ofstream f(dump_path);
        if (!f) throw UsageError("cannot open dump file " + dump_path);
        f << dump.dump() << '\n';
      }
    } else if (cplx->parsed()) {
      out.manifest = manifest("complex-crit", common, {{"degree", degree}, {"trials", trials}});
      const unsigned expected = degree * (degree - 1);
      std::uint64_t matches = 0, resamples = 0;
      rrag::StreamingMoments m;
      for (std::uint64_t t = 0; t < trials; ++t) {
        for (unsigned attempt = 0;; ++attempt) {
          rrag::GaussianStream stream(common.seed, (t << 8) | attempt);
          try {
            const unsigned count = rrag::complex_crit_count(degree, stream);
            m.update(count);
            matches += count == expected;
            break;
          } catch (const rrag::DegenerateSample&) {
            ++resamples;
            if (attempt >= 4) break;
          }
        }
      }
      ResultRow r;
      r.name = "complex_crit_count.d=" + std::to_string(degree);
      r.estimate = rrag::finalize(m);
      r.target = expected;
      r.tolerance = "every sample exact";
      r.pass = matches == trials;
      out.results.push_back(r);
      out.extra["resamples"] = resamples;
    } else if (report->parsed()) {
      std::vector<int> ids;
      for (const auto& k : only) {
        const auto id = rrag::criterion_id(k);
        if (!id) throw UsageError("unknown criterion '" + k + "'");
        ids.push_back(*id);
      }
      out.manifest = manifest("report", common, {{"only", only}});
      rrag::AcceptanceOptions opts;
      opts.seed = common.seed;
      opts.workers = common.workers;
      opts.on_done = [](const rrag::CriterionResult& c) {
        std::fprintf(stderr, "criterion %d %-12s %s (%.1f s)\n", c.id, c.key.c_str(), c.pass() ? "PASS" : "FAIL", c.seconds);
      };
      const auto results = rrag::run_acceptance(opts, ids);
      ordered_json summary = ordered_json::array();
      out.table_header = {"criterion", "name", "target", "estimate", "stderr", "tolerance", "status"};
      for (const auto& c : results) {
        summary.push_back({{"criterion", c.id}, {"key", c.key}, {"title", c.title}, {"pass", c.pass()}, {"seconds", c.seconds}});
        pass = pass && c.pass();
        for (ResultRow r : c.rows) {
          out.table.push_back({std::to_string(c.id), r.name, number(r.target), number(r.estimate.mean),
                               r.estimate.std_error ? number(*r.estimate.std_error) : "", r.tolerance,
                               r.informational ? "INFO" : (r.pass ? "PASS" : "FAIL")});
          r.name = std::to_string(c.id) + "." + c.key + "." + r.name;
          out.results.push_back(r);
        }
      }
      out.extra["criteria"] = summary;
      emit(common, out);
      return pass ? 0 : kExitAssert;
    }
    emit(common, out);
    if (common.assert_results && !all_pass(out.results)) return kExitAssert;
    return 0;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitAssert;
  }
}
