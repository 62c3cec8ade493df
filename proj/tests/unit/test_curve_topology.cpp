#include <cmath>
#include <numbers>

#include "doctest.h"
#include "rrag/curve_topology.hpp"
#include "rrag/errors.hpp"

using namespace rrag;

namespace {

double loop_length(const std::vector<Vec3>& loop) {
  double total = 0.0;
  for (std::size_t k = 0; k < loop.size(); ++k) {
    const Vec3& a = loop[k];
    const Vec3& b = loop[(k + 1) % loop.size()];
    total += std::hypot(a[0] - b[0], a[1] - b[1], a[2] - b[2]);
  }
  return total;
}

}  // namespace

TEST_CASE("icosphere combinatorics") {
  for (unsigned level = 0; level <= 4; ++level) {
    const IcoMesh m = build_icosphere(level);
    const std::size_t f = 20u << (2 * level);
    CHECK(m.faces.size() == f);
    CHECK(m.edges.size() == 3 * f / 2);
    CHECK(m.vertices.size() == f / 2 + 2);
    CHECK(static_cast<long>(m.vertices.size()) - static_cast<long>(m.edges.size()) +
              static_cast<long>(m.faces.size()) ==
          2);
    for (std::uint32_t v = 0; v < m.vertices.size(); ++v) {
      REQUIRE(m.antipode[m.antipode[v]] == v);
      CHECK(m.vertices[m.antipode[v]][0] == -m.vertices[v][0]);
      CHECK(std::abs(std::hypot(m.vertices[v][0], m.vertices[v][1], m.vertices[v][2]) - 1.0) < 1e-15);
    }
    for (std::uint32_t e = 0; e < m.edges.size(); ++e) {
      CHECK(m.edge_antipode[m.edge_antipode[e]] == e);
      CHECK(m.edge_faces[e][1] != m.edge_faces[e][0]);
    }
    CHECK(m.min_edge_length > 0.0);
    CHECK(m.max_edge_length < 1.25 * 1.1072 * std::pow(0.5, level));
  }
  CHECK_THROWS_AS(build_icosphere(10), std::invalid_argument);
}

TEST_CASE("mesh level rule") {
  for (unsigned d : {1u, 4u, 10u, 20u, 40u}) {
    const unsigned level = mesh_level_for_degree(d);
    CHECK(build_icosphere(level).max_edge_length < 0.5 / d);
    if (level > 0) CHECK(build_icosphere(level - 1).max_edge_length >= 0.5 / d);
  }
  CHECK(mesh_level_for_degree(40) <= 7);
  CHECK_THROWS_AS(mesh_level_for_degree(0), std::invalid_argument);
}

TEST_CASE("a line is one great circle") {
  const IcoMesh mesh = build_icosphere(mesh_level_for_degree(1));
  const TernaryKostlan s = TernaryKostlan::from_terms(1, {{{1, 0, 0}, 1.0}});
  const TracedCurve c = trace_zero_set(s, mesh);
  REQUIRE(c.loops.size() == 1);
  CHECK(std::abs(loop_length(c.loops[0]) - 2 * std::numbers::pi) < 0.01 * 2 * std::numbers::pi);
  CHECK(count_components_rp2(c) == 1);
  const CriticalPoints cp = extract_critical_points(s, c);
  CHECK(cp.minima_s2 == 2);
  CHECK(cp.maxima_s2 == 2);
  CHECK(cp.index0_rp2() == 1.0);
  CHECK(cp.balanced());
  for (const auto& r : cp.records) {
    // p = x1^2 / 2 + x2^2 on the circle x0 = 0: minima at +-e1, maxima at +-e2.
    CHECK(std::abs(r.point[0]) < 1e-12);
    CHECK(std::abs(std::abs(r.point[r.index == 0 ? 1 : 2]) - 1.0) < 1e-8);
    CHECK(r.near_crit_p);
  }
}

TEST_CASE("a tilted line") {
  const IcoMesh mesh = build_icosphere(4);
  const TernaryKostlan s = TernaryKostlan::from_terms(1, {{{1, 0, 0}, 0.3}, {{0, 1, 0}, -0.7}, {{0, 0, 1}, 0.2}});
  const TracedCurve c = trace_zero_set(s, mesh);
  REQUIRE(c.loops.size() == 1);
  CHECK(loop_length(c.loops[0]) == doctest::Approx(2 * std::numbers::pi).epsilon(0.002));
  const CriticalPoints cp = extract_critical_points(s, c);
  CHECK(cp.minima_s2 == 2);
  CHECK(cp.maxima_s2 == 2);
  for (const auto& r : cp.records) CHECK_FALSE(r.near_crit_p);
}

TEST_CASE("a conic pairs two loops into one component") {
  const IcoMesh mesh = build_icosphere(mesh_level_for_degree(2));
  const TernaryKostlan s =
      TernaryKostlan::from_terms(2, {{{2, 0, 0}, 1.0}, {{0, 2, 0}, 1.0}, {{0, 0, 2}, -1.0}});
  const TracedCurve c = trace_zero_set(s, mesh);
  REQUIRE(c.loops.size() == 2);
  CHECK(count_components_rp2(c) == 1);
  const CriticalPoints cp = extract_critical_points(s, c);
  CHECK(cp.index0_rp2() == 2.0);
  CHECK(cp.index1_rp2() == 2.0);
  CHECK(cp.balanced());
  for (const auto& r : cp.records) CHECK(std::abs(std::abs(r.point[2]) - std::sqrt(0.5)) < 1e-9);

  const TernaryKostlan empty = TernaryKostlan::from_terms(2, {{{2, 0, 0}, 1.0}, {{0, 2, 0}, 1.0}, {{0, 0, 2}, 1.0}});
  const TracedCurve none = trace_zero_set(empty, mesh);
  CHECK(none.loops.empty());
  CHECK(count_components_rp2(none) == 0);
}

TEST_CASE("random sextic: residuals, symmetry and scale invariance") {
  const unsigned d = 6;
  const IcoMesh mesh = build_icosphere(mesh_level_for_degree(d));
  for (std::uint64_t trial = 0; trial < 5; ++trial) {
    GaussianStream stream(77, trial);
    const TernaryKostlan s = sample_ternary(d, stream);
    const TracedCurve c = trace_zero_set(s, mesh);
    for (std::size_t l = 0; l < c.loops.size(); ++l)
      for (std::size_t k = 0; k < c.loops[l].size(); ++k) {
        CHECK(c.residuals[l][k] <= 1e-10 * c.scale);
        CHECK(std::abs(evaluate(s, c.loops[l][k])) <= 1e-10 * c.scale);
      }
    CHECK(c.loops.size() % 2 == 0);  // even degree: no self-antipodal loop
    const unsigned comps = count_components_rp2(c);
    CHECK(comps == c.loops.size() / 2);
    const CriticalPoints cp = extract_critical_points(s, c);
    CHECK(cp.minima_s2 % 2 == 0);
    CHECK(cp.minima_s2 == cp.maxima_s2);

    for (double lambda : {1e-3, 1e3}) {
      const TernaryKostlan t = s.scaled(lambda);
      const TracedCurve ct = trace_zero_set(t, mesh);
      CHECK(ct.loops.size() == c.loops.size());
      CHECK(count_components_rp2(ct) == comps);
      const CriticalPoints cpt = extract_critical_points(t, ct);
      CHECK(cpt.minima_s2 == cp.minima_s2);
      CHECK(cpt.maxima_s2 == cp.maxima_s2);
    }
  }
}

TEST_CASE("odd degree has exactly one self-antipodal loop") {
  const unsigned d = 5;
  const IcoMesh mesh = build_icosphere(mesh_level_for_degree(d));
  for (std::uint64_t trial = 0; trial < 5; ++trial) {
    GaussianStream stream(91, trial);
    const TracedCurve c = trace_zero_set(sample_ternary(d, stream), mesh);
    CHECK(c.loops.size() % 2 == 1);
    CHECK(count_components_rp2(c) == (c.loops.size() + 1) / 2);
  }
}

TEST_CASE("tracing preconditions") {
  const TernaryKostlan s = TernaryKostlan::from_terms(3, {{{3, 0, 0}, 1.0}});
  CHECK_THROWS_AS(trace_zero_set(s, build_icosphere(1)), std::invalid_argument);
  CHECK_THROWS_AS(trace_zero_set(TernaryKostlan(3), build_icosphere(4)), IdenticallyZero);
  MorseFunction bad;
  bad.c = {1.0, 0.5, 0.0};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("complex normalization count") {
  for (unsigned d = 2; d <= 6; ++d) {
    GaussianStream stream(5, d);
    CHECK(complex_crit_count(d, stream) == d * (d - 1));
  }
  GaussianStream stream(5, 0);
  CHECK_THROWS_AS(complex_crit_count(1, stream), std::invalid_argument);
}

TEST_CASE("small critical point density run") {
  CurveDensityConfig config;
  config.d = 4;
  config.trials = 40;
  config.master_seed = 2024;
  const CurveDensityResult r = mc_critical_point_density(config);
  CHECK(r.aborted == 0);
  CHECK(r.valid());
  CHECK(r.balanced_trials == r.valid_trials());
  CHECK(r.index0.mean == doctest::Approx(r.index1.mean));
  CHECK(r.index0.mean > 0.0);
  std::uint64_t binned = 0;
  for (auto b : r.bins) binned += b;
  CHECK(static_cast<double>(binned) == doctest::Approx(r.index0.mean * config.d * 2 * r.valid_trials()));

  config.workers = 3;
  const CurveDensityResult r3 = mc_critical_point_density(config);
  CHECK(r3.index0.mean == r.index0.mean);
  CHECK(r3.components.mean == r.components.mean);
  CHECK(r3.bins == r.bins);
}
