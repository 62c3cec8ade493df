#include "rrag/curve_topology.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <unordered_map>

#include "rrag/errors.hpp"
#include "rrag/linalg.hpp"
#include "rrag/parallel.hpp"

namespace rrag {

namespace {

constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();

double dot(const Vec3& a, const Vec3& b) noexcept { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
Vec3 cross(const Vec3& a, const Vec3& b) noexcept {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}
double norm(const Vec3& a) noexcept { return std::sqrt(dot(a, a)); }
Vec3 add(const Vec3& a, const Vec3& b) noexcept { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
Vec3 sub(const Vec3& a, const Vec3& b) noexcept { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
Vec3 scale(const Vec3& a, double s) noexcept { return {a[0] * s, a[1] * s, a[2] * s}; }
Vec3 normalized(const Vec3& a) noexcept {
  const double n = norm(a);
  return {a[0] / n, a[1] / n, a[2] / n};
}
Vec3 negated(const Vec3& a) noexcept { return {-a[0], -a[1], -a[2]}; }
double arc_length(const Vec3& a, const Vec3& b) noexcept { return std::atan2(norm(cross(a, b)), dot(a, b)); }
bool positive(double v) noexcept { return v >= 0.0; }

std::uint64_t pair_key(std::uint32_t a, std::uint32_t b) noexcept {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(a) << 32) | b;
}

// ---- icosphere ------------------------------------------------------------------

std::vector<std::uint32_t> antipode_map(const std::vector<Vec3>& v) {
  std::vector<std::uint32_t> order(v.size());
  for (std::uint32_t i = 0; i < v.size(); ++i) order[i] = i;
  // +0.0 folds -0.0 into 0.0 so exact negation matches bitwise order.
  auto canon = [&](std::uint32_t i) { return std::array<double, 3>{v[i][0] + 0.0, v[i][1] + 0.0, v[i][2] + 0.0}; };
  std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) { return canon(a) < canon(b); });
  std::vector<std::uint32_t> out(v.size(), kNone);
  for (std::uint32_t i = 0; i < v.size(); ++i) {
    const std::array<double, 3> target{-v[i][0] + 0.0, -v[i][1] + 0.0, -v[i][2] + 0.0};
    auto it = std::lower_bound(order.begin(), order.end(), target,
                               [&](std::uint32_t a, const std::array<double, 3>& t) { return canon(a) < t; });
    if (it == order.end() || canon(*it) != target) throw std::logic_error("build_icosphere: vertex without antipode");
    out[i] = *it;
  }
  return out;
}

}  // namespace

IcoMesh build_icosphere(unsigned level) {
  if (level > 9) throw std::invalid_argument("build_icosphere: level must lie in 0..9");
  const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
  const double r = std::sqrt(1.0 + phi * phi);
  const double a = 1.0 / r, b = phi / r;
  IcoMesh m;
  m.level = level;
  m.vertices = {{-a, b, 0}, {a, b, 0}, {-a, -b, 0}, {a, -b, 0}, {0, -a, b}, {0, a, b},
                {0, -a, -b}, {0, a, -b}, {b, 0, -a}, {b, 0, a}, {-b, 0, -a}, {-b, 0, a}};
  m.faces = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11}, {1, 5, 9}, {5, 11, 4},
             {11, 10, 2}, {10, 7, 6}, {7, 1, 8},  {3, 9, 4},  {3, 4, 2},   {3, 2, 6}, {3, 6, 8},
             {3, 8, 9},  {4, 9, 5},  {2, 4, 11},  {6, 2, 10}, {8, 6, 7},   {9, 8, 1}};

  for (unsigned l = 0; l < level; ++l) {
    std::unordered_map<std::uint64_t, std::uint32_t> cache;
    cache.reserve(m.faces.size() * 2);
    auto midpoint = [&](std::uint32_t i, std::uint32_t j) {
      const auto [it, inserted] = cache.try_emplace(pair_key(i, j), static_cast<std::uint32_t>(m.vertices.size()));
      if (inserted) m.vertices.push_back(normalized(add(m.vertices[i], m.vertices[j])));
      return it->second;
    };
    std::vector<std::array<std::uint32_t, 3>> next;
    next.reserve(m.faces.size() * 4);
    for (const auto& f : m.faces) {
      const std::uint32_t ab = midpoint(f[0], f[1]), bc = midpoint(f[1], f[2]), ca = midpoint(f[2], f[0]);
      next.push_back({f[0], ab, ca});
      next.push_back({f[1], bc, ab});
      next.push_back({f[2], ca, bc});
      next.push_back({ab, bc, ca});
    }
    m.faces = std::move(next);
  }

  std::unordered_map<std::uint64_t, std::uint32_t> edge_index;
  edge_index.reserve(m.faces.size() * 2);
  m.face_edges.resize(m.faces.size());
  for (std::uint32_t fi = 0; fi < m.faces.size(); ++fi) {
    const auto& f = m.faces[fi];
    for (int k = 0; k < 3; ++k) {
      const std::uint32_t u = f[k], v = f[(k + 1) % 3];
      const auto [it, inserted] = edge_index.try_emplace(pair_key(u, v), static_cast<std::uint32_t>(m.edges.size()));
      if (inserted) {
        m.edges.push_back({std::min(u, v), std::max(u, v)});
        m.edge_faces.push_back({fi, kNone});
      } else {
        if (m.edge_faces[it->second][1] != kNone) throw std::logic_error("build_icosphere: edge on three faces");
        m.edge_faces[it->second][1] = fi;
      }
      m.face_edges[fi][k] = it->second;
    }
  }

  m.antipode = antipode_map(m.vertices);
  m.edge_antipode.resize(m.edges.size());
  m.max_edge_length = 0.0;
  m.min_edge_length = std::numeric_limits<double>::infinity();
  for (std::uint32_t e = 0; e < m.edges.size(); ++e) {
    const auto [u, v] = m.edges[e];
    m.edge_antipode[e] = edge_index.at(pair_key(m.antipode[u], m.antipode[v]));
    const double len = arc_length(m.vertices[u], m.vertices[v]);
    m.max_edge_length = std::max(m.max_edge_length, len);
    m.min_edge_length = std::min(m.min_edge_length, len);
  }
  return m;
}

unsigned mesh_level_for_degree(unsigned d) {
  if (d == 0) throw std::invalid_argument("mesh_level_for_degree: degree must be positive");
  static std::mutex mutex;
  static std::array<double, 10> max_edge{};
  std::lock_guard lock(mutex);
  for (unsigned level = 0; level <= 9; ++level) {
    if (max_edge[level] == 0.0) max_edge[level] = build_icosphere(level).max_edge_length;
    if (max_edge[level] < 0.5 / d) return level;
  }
  throw std::invalid_argument("mesh_level_for_degree: degree too large for level 9");
}

void MorseFunction::validate() const {
  if (!(c[0] < c[1] && c[1] < c[2])) throw std::invalid_argument("MorseFunction: need c0 < c1 < c2");
}

double MorseFunction::value(const Vec3& x) const noexcept {
  return (c[0] * x[0] * x[0] + c[1] * x[1] * x[1] + c[2] * x[2] * x[2]) / dot(x, x);
}

// ---- tracing ----------------------------------------------------------------------

namespace {

class Tracer {
 public:
  Tracer(const TernaryKostlan& s, const IcoMesh& mesh, const TraceOptions& opt) : s_(s), mesh_(mesh), opt_(opt) {}

  TracedCurve run() {
    if (!(opt_.newton_tol > 0.0)) throw std::invalid_argument("trace_zero_set: newton_tol must be positive");
    const unsigned d = s_.degree();
    if (d == 0) throw std::invalid_argument("trace_zero_set: degree must be positive");
    if (!(mesh_.max_edge_length < 0.5 / d)) {
      throw std::invalid_argument("trace_zero_set: mesh level " + std::to_string(mesh_.level) +
                                  " is too coarse for degree " + std::to_string(d));
    }
    evaluate_vertices();
    curvature_bound_ = static_cast<double>(d) * d * scale_ * opt_.screen_margin;
    tol_ = opt_.newton_tol * scale_;

    edge_nodes_.resize(mesh_.edges.size());
    for (std::uint32_t e = 0; e < mesh_.edges.size(); ++e) {
      const std::uint32_t mirror = mesh_.edge_antipode[e];
      if (mirror < e) continue;
      const auto [u, v] = mesh_.edges[e];
      std::vector<std::uint32_t> found;
      arc_crossings(mesh_.vertices[u], values_[u], mesh_.vertices[v], values_[v], found);
      edge_nodes_[e] = found;
      for (std::uint32_t n : found) edge_nodes_[mirror].push_back(add_node(negated(pos_[n]), residual_[n]));
    }

    for (std::uint32_t fi = 0; fi < mesh_.faces.size(); ++fi) {
      const auto& f = mesh_.faces[fi];
      const auto& fe = mesh_.face_edges[fi];
      if (edge_nodes_[fe[0]].empty() && edge_nodes_[fe[1]].empty() && edge_nodes_[fe[2]].empty()) continue;
      triangle({mesh_.vertices[f[0]], mesh_.vertices[f[1]], mesh_.vertices[f[2]]},
               {values_[f[0]], values_[f[1]], values_[f[2]]},
               {edge_nodes_[fe[0]], edge_nodes_[fe[1]], edge_nodes_[fe[2]]}, 0);
    }
    return assemble();
  }

 private:
  void evaluate_vertices() {
    const auto& v = mesh_.vertices;
    values_.assign(v.size(), 0.0);
    const bool odd = s_.degree() % 2 == 1;
    constexpr double tiny = std::numeric_limits<double>::denorm_min();
    scale_ = 0.0;
    for (std::uint32_t i = 0; i < v.size(); ++i) {
      const std::uint32_t a = mesh_.antipode[i];
      if (a < i) {
        // s(-x) = (-1)^d s(x) holds exactly in floating point for this evaluation order.
        values_[i] = odd ? -values_[a] : values_[a];
        continue;
      }
      values_[i] = evaluate(s_, v[i]);
      scale_ = std::max(scale_, std::abs(values_[i]));
      // An exact zero gets a symbolic sign that respects the antipodal symmetry.
      if (values_[i] == 0.0) values_[i] = tiny;
    }
    if (!(scale_ > 0.0)) throw IdenticallyZero("trace_zero_set: section vanishes at every mesh vertex");
  }

  std::uint32_t add_node(const Vec3& p, double residual) {
    pos_.push_back(p);
    residual_.push_back(residual);
    links_.push_back({kNone, kNone});
    return static_cast<std::uint32_t>(pos_.size() - 1);
  }

  void link(std::uint32_t a, std::uint32_t b) {
    for (std::uint32_t n : {a, b}) {
      auto& l = links_[n];
      const std::uint32_t other = (n == a) ? b : a;
      if (l[0] == kNone) {
        l[0] = other;
      } else if (l[1] == kNone) {
        l[1] = other;
      } else {
        throw MeshTooCoarse("trace_zero_set: crossing point joined to more than two segments");
      }
    }
  }

  struct Arc {
    Vec3 a, w;
    Vec3 at(double t) const noexcept { return add(scale(a, std::cos(t)), scale(w, std::sin(t))); }
    Vec3 tangent(double t) const noexcept { return add(scale(a, -std::sin(t)), scale(w, std::cos(t))); }
  };

  void arc_crossings(const Vec3& a, double fa, const Vec3& b, double fb, std::vector<std::uint32_t>& out) {
    const double c = dot(a, b);
    const double sn = norm(cross(a, b));
    const Arc arc{a, scale(sub(b, scale(a, c)), 1.0 / sn)};
    search(arc, 0.0, fa, std::atan2(sn, c), fb, 0, out, &a, &b);
  }

  void search(const Arc& arc, double t0, double g0, double t1, double g1, unsigned depth,
              std::vector<std::uint32_t>& out, const Vec3* end0, const Vec3* end1) {
    if (positive(g0) != positive(g1)) {
      out.push_back(locate(arc, t0, g0, t1, g1, end0, end1));
      return;
    }
    // |g''| <= d^2 sup|s| on a great circle, so g keeps its sign when
    // min(|g0|, |g1|) exceeds the parabola depth K h^2 / 8.
    const double h = t1 - t0;
    if (std::min(std::abs(g0), std::abs(g1)) > curvature_bound_ * h * h / 8.0) return;
    if (depth >= opt_.screen_depth) return;
    const double tm = 0.5 * (t0 + t1);
    const double gm = evaluate(s_, arc.at(tm));
    search(arc, t0, g0, tm, gm, depth + 1, out, end0, nullptr);
    search(arc, tm, gm, t1, g1, depth + 1, out, nullptr, end1);
  }

  std::uint32_t locate(const Arc& arc, double a, double ga, double b, double gb, const Vec3* end0,
                       const Vec3* end1) {
    if (std::abs(ga) <= tol_) return add_node(end0 ? *end0 : arc.at(a), std::abs(ga));
    if (std::abs(gb) <= tol_) return add_node(end1 ? *end1 : arc.at(b), std::abs(gb));
    double t = a - ga * (b - a) / (gb - ga);
    for (unsigned it = 0; it < opt_.max_newton_iterations; ++it) {
      const Vec3 x = arc.at(t);
      Vec3 grad;
      const double g = evaluate_with_gradient(s_, x, grad);
      if (std::abs(g) <= tol_) return add_node(x, std::abs(g));
      if (positive(g) == positive(ga)) {
        a = t;
        ga = g;
      } else {
        b = t;
        gb = g;
      }
      const double dg = dot(grad, arc.tangent(t));
      double next = (dg != 0.0) ? t - g / dg : a;
      if (!(next > a && next < b)) next = 0.5 * (a + b);
      t = next;
    }
    throw NewtonStall("trace_zero_set: crossing residual above tolerance after " +
                      std::to_string(opt_.max_newton_iterations) + " iterations");
  }

  void triangle(const std::array<Vec3, 3>& v, const std::array<double, 3>& f,
                const std::array<std::vector<std::uint32_t>, 3>& sides, unsigned depth) {
    const std::size_t total = sides[0].size() + sides[1].size() + sides[2].size();
    if (total == 0) return;
    if (total % 2 == 1) throw MeshTooCoarse("trace_zero_set: odd number of crossings on a face");
    if (total == 2) {
      std::array<std::uint32_t, 2> ends{};
      int k = 0;
      for (const auto& side : sides)
        for (std::uint32_t n : side) ends[k++] = n;
      link(ends[0], ends[1]);
      return;
    }
    if (depth >= opt_.max_subdivision) {
      throw MeshTooCoarse("trace_zero_set: face still has " + std::to_string(total) + " crossings after " +
                          std::to_string(depth) + " subdivisions");
    }
    if (depth == 0) ++subdivided_;

    std::array<Vec3, 3> m;
    std::array<double, 3> fm;
    std::array<std::vector<std::uint32_t>, 3> near_start, near_end;
    for (int k = 0; k < 3; ++k) {
      const Vec3& p = v[k];
      const Vec3& q = v[(k + 1) % 3];
      m[k] = normalized(add(p, q));
      fm[k] = evaluate(s_, m[k]);
      for (std::uint32_t n : sides[k]) (dot(pos_[n], p) >= dot(pos_[n], q) ? near_start[k] : near_end[k]).push_back(n);
      const bool flip0 = positive(f[k]) != positive(fm[k]);
      const bool flip1 = positive(fm[k]) != positive(f[(k + 1) % 3]);
      if ((near_start[k].size() % 2 == 1) != flip0 || (near_end[k].size() % 2 == 1) != flip1)
        throw MeshTooCoarse("trace_zero_set: crossing parity disagrees with signs after subdivision");
    }
    std::vector<std::uint32_t> e01, e12, e20;
    arc_crossings(m[0], fm[0], m[1], fm[1], e01);
    arc_crossings(m[1], fm[1], m[2], fm[2], e12);
    arc_crossings(m[2], fm[2], m[0], fm[0], e20);

    triangle({v[0], m[0], m[2]}, {f[0], fm[0], fm[2]}, {near_start[0], e20, near_end[2]}, depth + 1);
    triangle({m[0], v[1], m[1]}, {fm[0], f[1], fm[1]}, {near_end[0], near_start[1], e01}, depth + 1);
    triangle({m[2], m[1], v[2]}, {fm[2], fm[1], f[2]}, {e12, near_end[1], near_start[2]}, depth + 1);
    triangle({m[0], m[1], m[2]}, {fm[0], fm[1], fm[2]}, {e01, e12, e20}, depth + 1);
  }

  TracedCurve assemble() {
    TracedCurve c;
    c.degree = s_.degree();
    c.scale = scale_;
    c.newton_tol = opt_.newton_tol;
    c.subdivided_faces = subdivided_;
    std::vector<char> seen(pos_.size(), 0);
    for (std::uint32_t start = 0; start < pos_.size(); ++start) {
      if (seen[start]) continue;
      if (links_[start][1] == kNone) throw MeshTooCoarse("trace_zero_set: open curve at a crossing point");
      std::vector<Vec3> loop;
      std::vector<double> res;
      std::uint32_t prev = kNone, cur = start;
      std::size_t steps = 0;
      do {
        if (seen[cur] || ++steps > pos_.size()) throw MeshTooCoarse("trace_zero_set: crossing graph is not a cycle");
        seen[cur] = 1;
        if (loop.empty() || norm(sub(loop.back(), pos_[cur])) > 1e-12) {
          loop.push_back(pos_[cur]);
          res.push_back(residual_[cur]);
        }
        const auto& l = links_[cur];
        if (l[1] == kNone) throw MeshTooCoarse("trace_zero_set: open curve at a crossing point");
        const std::uint32_t next = (prev == kNone || l[0] != prev) ? l[0] : l[1];
        prev = cur;
        cur = next;
      } while (cur != start);
      while (loop.size() > 1 && norm(sub(loop.back(), loop.front())) <= 1e-12) {
        loop.pop_back();
        res.pop_back();
      }
      if (loop.size() < 2) continue;  // an isolated real point, not a curve
      c.loops.push_back(std::move(loop));
      c.residuals.push_back(std::move(res));
    }
    return c;
  }

  const TernaryKostlan& s_;
  const IcoMesh& mesh_;
  TraceOptions opt_;
  std::vector<double> values_;
  double scale_ = 0.0;
  double curvature_bound_ = 0.0;
  double tol_ = 0.0;
  std::vector<Vec3> pos_;
  std::vector<double> residual_;
  std::vector<std::array<std::uint32_t, 2>> links_;
  std::vector<std::vector<std::uint32_t>> edge_nodes_;
  std::uint64_t subdivided_ = 0;
};

}  // namespace

TracedCurve trace_zero_set(const TernaryKostlan& s, const IcoMesh& mesh, const TraceOptions& options) {
  return Tracer(s, mesh, options).run();
}

// ---- components ---------------------------------------------------------------------

namespace {

class PointHash {
 public:
  explicit PointHash(double cell) : cell_(cell) {}

  void insert(const Vec3& p, std::uint32_t id) { cells_[key(cell_of(p))].push_back({p, id}); }

  /// Id of some stored point within tol of p, or kNone.
  std::uint32_t find(const Vec3& p, double tol) const {
    const auto c = cell_of(p);
    for (long dx = -1; dx <= 1; ++dx)
      for (long dy = -1; dy <= 1; ++dy)
        for (long dz = -1; dz <= 1; ++dz) {
          const auto it = cells_.find(key({c[0] + dx, c[1] + dy, c[2] + dz}));
          if (it == cells_.end()) continue;
          for (const auto& [q, id] : it->second)
            if (norm(sub(p, q)) <= tol) return id;
        }
    return kNone;
  }

 private:
  std::array<long, 3> cell_of(const Vec3& p) const {
    return {static_cast<long>(std::floor(p[0] / cell_)), static_cast<long>(std::floor(p[1] / cell_)),
            static_cast<long>(std::floor(p[2] / cell_))};
  }
  static std::uint64_t key(const std::array<long, 3>& c) {
    const auto mix = [](long v) { return static_cast<std::uint64_t>(v) * 0x9E3779B97F4A7C15ull; };
    return mix(c[0]) ^ (mix(c[1]) >> 1) ^ (mix(c[2]) << 1) ^ static_cast<std::uint64_t>(c[2]);
  }

  double cell_;
  std::unordered_map<std::uint64_t, std::vector<std::pair<Vec3, std::uint32_t>>> cells_;
};

}  // namespace

unsigned count_components_rp2(const TracedCurve& curve, double hausdorff_tol) {
  const std::size_t loops = curve.loops.size();
  PointHash hash(std::max(hausdorff_tol, 1e-12));
  for (std::uint32_t l = 0; l < loops; ++l)
    for (const Vec3& p : curve.loops[l]) hash.insert(p, l);

  std::vector<std::uint32_t> partner(loops, kNone);
  for (std::uint32_t l = 0; l < loops; ++l) {
    std::uint32_t match = kNone;
    for (const Vec3& p : curve.loops[l]) {
      const std::uint32_t id = hash.find(negated(p), hausdorff_tol);
      if (id == kNone || (match != kNone && id != match)) {
        throw PairingFailure("count_components_rp2: antipodal image of loop " + std::to_string(l) +
                             " matches no single loop");
      }
      match = id;
    }
    partner[l] = match;
  }
  unsigned components = 0;
  for (std::uint32_t l = 0; l < loops; ++l) {
    if (partner[partner[l]] != l) throw PairingFailure("count_components_rp2: antipodal pairing is not symmetric");
    if (partner[l] >= l) ++components;
  }
  return components;
}

// ---- critical points ----------------------------------------------------------------

bool CriticalPoints::balanced() const noexcept {
  return std::all_of(per_loop.begin(), per_loop.end(), [](const auto& c) { return c[0] == c[1]; });
}

namespace {

class CriticalFinder {
 public:
  CriticalFinder(const TernaryKostlan& s, const TracedCurve& curve, const MorseFunction& morse)
      : s_(s), curve_(curve), morse_(morse), tol_(curve.newton_tol * curve.scale) {}

  CriticalPoints run() {
    morse_.validate();
    CriticalPoints out;
    for (std::size_t l = 0; l < curve_.loops.size(); ++l) loop(l, out);
    return out;
  }

 private:
  // Directional derivative of p along x cross grad s, up to a positive factor.
  double h(const Vec3& x) const {
    const Vec3 g = gradient(s_, x);
    const Vec3 cx{morse_.c[0] * x[0], morse_.c[1] * x[1], morse_.c[2] * x[2]};
    return dot(cross(x, g), cx);
  }

  Vec3 project(Vec3 y) const {
    y = normalized(y);
    for (unsigned it = 0; it < 30; ++it) {
      Vec3 g;
      const double v = evaluate_with_gradient(s_, y, g);
      if (std::abs(v) <= tol_) return y;
      const Vec3 gt = sub(g, scale(y, dot(g, y)));
      const double gg = dot(gt, gt);
      if (!(gg > 0.0)) break;
      y = normalized(sub(y, scale(gt, v / gg)));
    }
    throw NewtonStall("extract_critical_points: projection onto the curve did not converge");
  }

  void loop(std::size_t l, CriticalPoints& out) const {
    const auto& pts = curve_.loops[l];
    const std::size_t m = pts.size();
    std::vector<double> hv(m);
    double orient = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
      const Vec3& x = pts[k];
      hv[k] = h(x);
      const Vec3 t = cross(x, gradient(s_, x));
      orient += (dot(t, sub(pts[(k + 1) % m], x)) >= 0.0) ? 1.0 : -1.0;
    }
    const double sign = orient >= 0.0 ? 1.0 : -1.0;
    std::array<unsigned, 2> counts{0, 0};
    for (std::size_t k = 0; k < m; ++k) {
      const std::size_t k1 = (k + 1) % m;
      if (hv[k] == 0.0 && hv[k1] == 0.0) {
        throw PlateauDetected("extract_critical_points: derivative vanishes at consecutive loop points");
      }
      const double a = sign * hv[k], b = sign * hv[k1];
      if (positive(a) == positive(b)) continue;
      const int index = positive(a) ? 1 : 0;  // rising then falling is a maximum
      const Vec3 x = refine(pts[k], a, pts[k1], b, sign);
      CriticalPointRecord r;
      r.point = x;
      r.index = index;
      r.p_value = morse_.value(x);
      r.loop = l;
      for (int i = 0; i < 3; ++i) r.near_crit_p = r.near_crit_p || std::hypot(x[(i + 1) % 3], x[(i + 2) % 3]) < 1e-6;
      out.records.push_back(r);
      ++counts[index];
    }
    out.per_loop.push_back(counts);
    out.minima_s2 += counts[0];
    out.maxima_s2 += counts[1];
  }

  // Illinois search for the sign change of h on the curve between p and q.
  Vec3 refine(const Vec3& p, double hp, const Vec3& q, double hq, double sign) const {
    double u0 = 0.0, u1 = 1.0, f0 = hp, f1 = hq;
    Vec3 best = hp == 0.0 ? p : q;
    if (hp == 0.0 || hq == 0.0) return best;
    int side = 0;
    for (unsigned it = 0; it < 100 && u1 - u0 > 1e-8; ++it) {
      double u = u0 - f0 * (u1 - u0) / (f1 - f0);
      if (!(u > u0 && u < u1)) u = 0.5 * (u0 + u1);
      const Vec3 x = project(add(scale(p, 1.0 - u), scale(q, u)));
      const double fx = sign * h(x);
      best = x;
      if (fx == 0.0) break;
      if (positive(fx) == positive(f0)) {
        u0 = u;
        f0 = fx;
        if (side == -1) f1 *= 0.5;
        side = -1;
      } else {
        u1 = u;
        f1 = fx;
        if (side == 1) f0 *= 0.5;
        side = 1;
      }
    }
    return best;
  }

  const TernaryKostlan& s_;
  const TracedCurve& curve_;
  const MorseFunction& morse_;
  double tol_;
};

// One representative per antipodal pair.
bool canonical(const Vec3& x) noexcept {
  for (int i = 2; i >= 0; --i)
    if (x[i] != 0.0) return x[i] > 0.0;
  return true;
}

}  // namespace

CriticalPoints extract_critical_points(const TernaryKostlan& s, const TracedCurve& curve, const MorseFunction& morse) {
  return CriticalFinder(s, curve, morse).run();
}

// ---- Monte Carlo ----------------------------------------------------------------------

TrialOutcome run_curve_trial(const CurveDensityConfig& config, const IcoMesh& mesh, std::uint64_t trial) {
  TrialOutcome o;
  GaussianStream stream(config.master_seed, trial);
  const TernaryKostlan s = sample_ternary(config.d, stream);
  try {
    const TracedCurve curve = trace_zero_set(s, mesh, config.trace);
    o.components = count_components_rp2(curve);
    const CriticalPoints cp = extract_critical_points(s, curve, config.morse);
    o.index0 = cp.index0_rp2();
    o.index1 = cp.index1_rp2();
    o.balanced = cp.balanced();
    for (const auto& r : cp.records)
      if (canonical(r.point)) o.abs_x2.push_back(std::abs(r.point[2]));
  } catch (const Error& e) {
    o = TrialOutcome{};
    o.aborted = true;
    o.error = e.what();
  }
  return o;
}

CurveDensityResult mc_critical_point_density(const CurveDensityConfig& config) {
  if (config.d == 0) throw std::invalid_argument("mc_critical_point_density: degree must be positive");
  if (config.trials == 0) throw std::invalid_argument("mc_critical_point_density: trials must be positive");
  if (config.workers == 0) throw std::invalid_argument("mc_critical_point_density: workers must be positive");
  if (config.bins < 2) throw std::invalid_argument("mc_critical_point_density: need at least two bins");
  config.morse.validate();
  const unsigned level = config.mesh_level.value_or(mesh_level_for_degree(config.d));
  const IcoMesh mesh = build_icosphere(level);

  const auto outcomes = run_blocks(config.trials, 1, config.workers,
                                   [&](const BlockRange& r) { return run_curve_trial(config, mesh, r.index); });

  CurveDensityResult out;
  out.d = config.d;
  out.mesh_level = level;
  out.trials = config.trials;
  out.bins.assign(config.bins, 0);
  StreamingMoments i0, i1, b0;
  const double d = config.d;
  for (const TrialOutcome& o : outcomes) {
    if (o.aborted) {
      ++out.aborted;
      out.abort_reasons.push_back(o.error);
      continue;
    }
    i0.update(o.index0 / d);
    i1.update(o.index1 / d);
    b0.update(o.components / d);
    out.balanced_trials += o.balanced;
    for (double z : o.abs_x2)
      ++out.bins[std::min<std::size_t>(static_cast<std::size_t>(z * config.bins), config.bins - 1)];
  }
  for (MCEstimate* e : {&out.index0, &out.index1, &out.components}) {
    const StreamingMoments& m = (e == &out.index0) ? i0 : (e == &out.index1) ? i1 : b0;
    *e = finalize(m);
    e->master_seed = config.master_seed;
    e->workers = config.workers;
    e->degenerate_count = out.aborted;
  }
  return out;
}

// ---- complex normalization ------------------------------------------------------------

unsigned complex_crit_count(unsigned d, GaussianStream& stream) {
  if (d < 2 || d > 8) throw std::invalid_argument("complex_crit_count: degree must lie in 2..8");
  using cd = std::complex<double>;
  // c[a][b]: coefficient of x^a y^b after setting x2 = 1.
  std::vector<std::vector<cd>> c(d + 1, std::vector<cd>(d + 1, 0.0));
  const double lf = std::lgamma(d + 1.0);
  for (unsigned a = 0; a <= d; ++a)
    for (unsigned b = 0; a + b <= d; ++b) {
      const double w = std::exp(0.5 * (lf - std::lgamma(a + 1.0) - std::lgamma(b + 1.0) - std::lgamma(d - a - b + 1.0)));
      const double re = stream.next_normal();
      const double im = stream.next_normal();
      c[a][b] = w * cd(re, im);
    }

  const unsigned size = 2 * d - 1;
  const unsigned samples = d * d + 1;
  std::vector<cd> values(samples);
  std::vector<cd> fj(d + 1), sylvester(static_cast<std::size_t>(size) * size);
  for (unsigned k = 0; k < samples; ++k) {
    const cd x = std::polar(1.0, 2.0 * std::numbers::pi * k / samples);
    // f = sum_j F_j(x) y^j.
    for (unsigned j = 0; j <= d; ++j) {
      cd acc = 0.0;
      for (unsigned a = d - j + 1; a-- > 0;) acc = acc * x + c[a][j];
      fj[j] = acc;
    }
    std::fill(sylvester.begin(), sylvester.end(), cd(0.0));
    // d - 1 shifted rows of f (degree d), then d shifted rows of f_y (degree d - 1),
    // coefficients from the highest power of y down.
    for (unsigned r = 0; r + 1 < d; ++r)
      for (unsigned j = 0; j <= d; ++j) sylvester[r * size + r + j] = fj[d - j];
    for (unsigned r = 0; r < d; ++r)
      for (unsigned j = 0; j < d; ++j)
        sylvester[(d - 1 + r) * size + r + j] = static_cast<double>(d - j) * fj[d - j];
    values[k] = lu_det_inplace<cd>(sylvester, size);
  }

  std::vector<double> magnitude(samples);
  double largest = 0.0;
  for (unsigned m = 0; m < samples; ++m) {
    cd acc = 0.0;
    for (unsigned k = 0; k < samples; ++k)
      acc += values[k] * std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>((static_cast<std::uint64_t>(m) * k) % samples) / samples);
    magnitude[m] = std::abs(acc) / samples;
    largest = std::max(largest, magnitude[m]);
  }
  unsigned stripped = 0;
  while (stripped < samples && magnitude[samples - 1 - stripped] < 1e-8 * largest) ++stripped;
  if (stripped > d) {
    throw DegenerateSample("complex_crit_count: " + std::to_string(stripped) +
                           " leading resultant coefficients vanish; resample");
  }
  return samples - 1 - stripped;
}

}  // namespace rrag
