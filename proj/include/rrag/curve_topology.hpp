#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rrag/kostlan.hpp"
#include "rrag/random.hpp"
#include "rrag/stats.hpp"

namespace rrag {

/// Subdivided icosahedron on the unit sphere. Vertex -v is always present and
/// its coordinates are the exact negation of v.
struct IcoMesh {
  unsigned level = 0;
  std::vector<Vec3> vertices;
  std::vector<std::array<std::uint32_t, 3>> faces;
  /// Unique edges (u, v) with u < v.
  std::vector<std::array<std::uint32_t, 2>> edges;
  /// face_edges[f][k] is the edge between faces[f][k] and faces[f][(k + 1) % 3].
  std::vector<std::array<std::uint32_t, 3>> face_edges;
  /// The two faces on each edge.
  std::vector<std::array<std::uint32_t, 2>> edge_faces;
  std::vector<std::uint32_t> antipode;
  std::vector<std::uint32_t> edge_antipode;
  /// Arc lengths in radians.
  double max_edge_length = 0.0;
  double min_edge_length = 0.0;
};

IcoMesh build_icosphere(unsigned level);
/// Smallest level whose longest edge is below 0.5 / d.
unsigned mesh_level_for_degree(unsigned d);

/// p([x]) = (c0 x0^2 + c1 x1^2 + c2 x2^2) / |x|^2 with c0 < c1 < c2.
struct MorseFunction {
  std::array<double, 3> c{0.0, 0.5, 1.0};

  void validate() const;
  double value(const Vec3& x) const noexcept;
};

struct TraceOptions {
  /// Residual bound |sigma| <= newton_tol * S, S the largest vertex |sigma|.
  double newton_tol = 1e-10;
  unsigned max_newton_iterations = 30;
  unsigned max_subdivision = 3;
  /// Safety factor on the second-derivative bound d^2 S used to screen
  /// same-sign edges for hidden crossing pairs.
  double screen_margin = 2.0;
  unsigned screen_depth = 12;
};

struct TracedCurve {
  unsigned degree = 0;
  double scale = 0.0;
  double newton_tol = 0.0;
  std::vector<std::vector<Vec3>> loops;
  std::vector<std::vector<double>> residuals;
  /// Faces that needed local subdivision.
  std::uint64_t subdivided_faces = 0;
};

/// Zero set of s on the sphere as closed polylines through refined crossing
/// points. Crossings on mesh edges are found along the edge arc; a face with
/// four or more crossings is split 4-way, at most max_subdivision times.
/// Throws MeshTooCoarse, NewtonStall or IdenticallyZero.
TracedCurve trace_zero_set(const TernaryKostlan& s, const IcoMesh& mesh, const TraceOptions& options = {});

/// Loops on S^2 paired under x -> -x: a self-antipodal loop or an antipodal
/// pair is one component of the real curve in RP^2. Throws PairingFailure.
unsigned count_components_rp2(const TracedCurve& curve, double hausdorff_tol = 1e-6);

struct CriticalPointRecord {
  Vec3 point{};
  int index = 0;
  double p_value = 0.0;
  std::size_t loop = 0;
  /// Within 1e-6 of a critical point of p itself.
  bool near_crit_p = false;
};

struct CriticalPoints {
  std::vector<CriticalPointRecord> records;
  /// (minima, maxima) per loop.
  std::vector<std::array<unsigned, 2>> per_loop;
  unsigned minima_s2 = 0;
  unsigned maxima_s2 = 0;

  double index0_rp2() const noexcept { return minima_s2 / 2.0; }
  double index1_rp2() const noexcept { return maxima_s2 / 2.0; }
  bool balanced() const noexcept;
};

/// Critical points of p on the traced loops. The derivative of p along the
/// loop is proportional to h(x) = (x cross grad s) . (C x); sign changes of h
/// between loop points are refined by secant search on the curve.
CriticalPoints extract_critical_points(const TernaryKostlan& s, const TracedCurve& curve,
                                       const MorseFunction& morse = {});

struct CurveDensityConfig {
  unsigned d = 10;
  std::uint64_t trials = 100;
  std::uint64_t master_seed = 0;
  unsigned workers = 1;
  std::optional<unsigned> mesh_level;
  MorseFunction morse;
  TraceOptions trace;
  unsigned bins = 10;
};

struct TrialOutcome {
  bool aborted = false;
  std::string error;
  double index0 = 0.0;
  double index1 = 0.0;
  unsigned components = 0;
  bool balanced = true;
  std::vector<double> abs_x2;
};

struct CurveDensityResult {
  unsigned d = 0;
  unsigned mesh_level = 0;
  std::uint64_t trials = 0;
  std::uint64_t aborted = 0;
  /// Valid trials whose loops all had #min == #max.
  std::uint64_t balanced_trials = 0;
  /// Counts per RP^2 component divided by d.
  MCEstimate index0;
  MCEstimate index1;
  MCEstimate components;
  /// Representatives of critical points (one per antipodal pair) by |x2| band.
  std::vector<std::uint64_t> bins;
  std::vector<std::string> abort_reasons;

  std::uint64_t valid_trials() const noexcept { return trials - aborted; }
  bool valid() const noexcept { return static_cast<double>(aborted) < 0.02 * static_cast<double>(trials); }
};

/// One trial draws one ternary section from stream `trial` of the master seed.
TrialOutcome run_curve_trial(const CurveDensityConfig& config, const IcoMesh& mesh, std::uint64_t trial);
CurveDensityResult mc_critical_point_density(const CurveDensityConfig& config);

/// Degree in x of Res_y(f, df/dy) for a complex Kostlan ternary section
/// dehomogenized at x2 = 1. The resultant is sampled at d^2 + 1 roots of unity,
/// interpolated by inverse DFT and stripped of leading coefficients below
/// 1e-8 of the largest. Throws DegenerateSample when more than d are stripped.
unsigned complex_crit_count(unsigned d, GaussianStream& stream);

}  // namespace rrag
