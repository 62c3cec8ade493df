#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "rrag/acceptance.hpp"
#include "rrag/closed_forms.hpp"
#include "rrag/curve_topology.hpp"
#include "rrag/errors.hpp"
#include "rrag/kostlan.hpp"
#include "rrag/rmt_montecarlo.hpp"
#include "rrag/stats.hpp"

namespace py = pybind11;
using namespace rrag;

namespace {

MCConfig config(unsigned n, std::uint64_t samples, std::uint64_t seed, unsigned workers) {
  MCConfig c;
  c.n = n;
  c.samples = samples;
  c.master_seed = seed;
  c.workers = workers;
  return c;
}

py::dict row_dict(const ResultRow& r) {
  py::dict d;
  d["name"] = r.name;
  d["mean"] = r.estimate.mean;
  d["stderr"] = r.estimate.std_error;
  d["samples"] = r.estimate.samples;
  d["target"] = r.target;
  d["z"] = r.z;
  d["tolerance"] = r.tolerance;
  d["pass"] = r.pass;
  d["informational"] = r.informational;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Expected determinants, random polynomial roots and critical points on random curves";

  static py::exception<Error> error(m, "RragError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      error(e.what());
    }
  });

  py::class_<MCEstimate>(m, "MCEstimate")
      .def_readonly("mean", &MCEstimate::mean)
      .def_readonly("stderr", &MCEstimate::std_error)
      .def_readonly("samples", &MCEstimate::samples)
      .def_readonly("degenerate_count", &MCEstimate::degenerate_count)
      .def_readonly("master_seed", &MCEstimate::master_seed)
      .def_readonly("workers", &MCEstimate::workers)
      .def("__repr__", [](const MCEstimate& e) {
        return "MCEstimate(mean=" + std::to_string(e.mean) +
               ", stderr=" + (e.std_error ? std::to_string(*e.std_error) : std::string("None")) +
               ", samples=" + std::to_string(e.samples) + ")";
      });

  // closed forms
  m.def("e_real", &e_real, py::arg("n"));
  m.def("e_complex", &e_complex, py::arg("n"));
  m.def("e_real_even_bm", [](unsigned n) { return e_real_even_bm(n); }, py::arg("n"));
  m.def("e_real_exact", [](unsigned n) {
    const QuadraticValue q = e_real_exact(n);
    return py::make_tuple(q.u.to_string(), q.v.to_string());
  }, py::arg("n"), "e_R(n) = u + v*sqrt(2) as (u, v) fraction strings, even n");
  m.def("e_real_signed_small", &e_real_signed_small, py::arg("p"), py::arg("q"));
  m.def("cycle_sum_bruteforce", &cycle_sum_bruteforce, py::arg("n"));
  m.def("vol_orthogonal", &vol_orthogonal, py::arg("n"));
  m.def("selberg_target", &selberg_target, py::arg("n"));
  m.def("psi", [](unsigned i, unsigned j) { return psi(i, j); }, py::arg("i"), py::arg("j"));
  m.def("vol_fs_real_projective", &vol_fs_real_projective, py::arg("n"));
  m.def("kostlan_expected_roots", &kostlan_expected_roots, py::arg("d"));
  m.def("critical_density_constant", &critical_density_constant);

  // matrix Monte Carlo
  m.def("mc_e_real", [](unsigned n, std::uint64_t samples, std::uint64_t seed, unsigned workers) {
    return mc_e_real(config(n, samples, seed, workers));
  }, py::arg("n"), py::arg("samples"), py::arg("seed"), py::arg("workers") = 1, py::call_guard<py::gil_scoped_release>());
  m.def("mc_e_complex", [](unsigned n, std::uint64_t samples, std::uint64_t seed, unsigned workers) {
    return mc_e_complex(config(n, samples, seed, workers));
  }, py::arg("n"), py::arg("samples"), py::arg("seed"), py::arg("workers") = 1, py::call_guard<py::gil_scoped_release>());
  m.def("mc_e_real_by_signature", [](unsigned n, std::uint64_t samples, std::uint64_t seed, unsigned workers) {
    SignatureTally t;
    {
      py::gil_scoped_release release;
      t = mc_e_real_by_signature(config(n, samples, seed, workers));
    }
    py::list classes;
    for (const auto& c : t.classes) {
      py::dict d;
      d["p"] = c.p;
      d["q"] = c.q;
      d["count"] = c.count;
      d["estimate"] = c.estimate;
      d["probability"] = c.probability;
      classes.append(d);
    }
    py::dict out;
    out["classes"] = classes;
    out["total"] = t.total;
    out["degenerate_count"] = t.degenerate_count;
    return out;
  }, py::arg("n"), py::arg("samples"), py::arg("seed"), py::arg("workers") = 1);
  m.def("mc_signature_distribution", [](unsigned n, std::uint64_t samples, std::uint64_t seed, unsigned workers) {
    return mc_signature_distribution(config(n, samples, seed, workers)).by_index;
  }, py::arg("n"), py::arg("samples"), py::arg("seed"), py::arg("workers") = 1,
     py::call_guard<py::gil_scoped_release>(), "P(min(p, q) = i) for i = 0..n/2");
  m.def("mc_selberg", [](unsigned n, std::uint64_t samples, std::uint64_t seed, unsigned workers) {
    return mc_selberg(n, samples, seed, workers);
  }, py::arg("n"), py::arg("samples"), py::arg("seed"), py::arg("workers") = 1, py::call_guard<py::gil_scoped_release>());

  // Kostlan
  m.def("count_circle_zeros", [](std::vector<double> coeffs) {
    if (coeffs.size() < 2) throw std::invalid_argument("count_circle_zeros: need at least two coefficients");
    const UnivariateKostlan p{static_cast<unsigned>(coeffs.size() - 1), std::move(coeffs)};
    return count_circle_zeros(p);
  }, py::arg("coeffs"), "zeros on RP^1 of sum_k coeffs[k] x^k y^(d-k)");
  m.def("mc_expected_roots", [](unsigned d, std::uint64_t trials, std::uint64_t seed, unsigned workers) {
    return mc_expected_roots(d, trials, seed, {}, workers);
  }, py::arg("d"), py::arg("trials"), py::arg("seed"), py::arg("workers") = 1, py::call_guard<py::gil_scoped_release>());

  // curves
  m.def("trace_sample", [](unsigned d, std::uint64_t seed, std::uint64_t trial, std::optional<unsigned> level) {
    GaussianStream stream(seed, trial);
    const TernaryKostlan s = sample_ternary(d, stream);
    const IcoMesh mesh = build_icosphere(level.value_or(mesh_level_for_degree(d)));
    const TracedCurve curve = trace_zero_set(s, mesh);
    const CriticalPoints cp = extract_critical_points(s, curve);
    py::dict out;
    out["loops"] = curve.loops;
    out["components"] = count_components_rp2(curve);
    out["index0"] = cp.index0_rp2();
    out["index1"] = cp.index1_rp2();
    out["balanced"] = cp.balanced();
    return out;
  }, py::arg("d"), py::arg("seed"), py::arg("trial") = 0, py::arg("mesh_level") = py::none(),
     "trace one sampled curve; loops are lists of unit 3-vectors on S^2");
  m.def("mc_critical_point_density", [](unsigned d, std::uint64_t trials, std::uint64_t seed, unsigned workers,
                                        std::optional<unsigned> level) {
    CurveDensityConfig c;
    c.d = d;
    c.trials = trials;
    c.master_seed = seed;
    c.workers = workers;
    c.mesh_level = level;
    CurveDensityResult r;
    {
      py::gil_scoped_release release;
      r = mc_critical_point_density(c);
    }
    py::dict out;
    out["mesh_level"] = r.mesh_level;
    out["trials"] = r.trials;
    out["aborted"] = r.aborted;
    out["balanced_trials"] = r.balanced_trials;
    out["index0"] = r.index0;
    out["index1"] = r.index1;
    out["components"] = r.components;
    out["bins"] = r.bins;
    return out;
  }, py::arg("d"), py::arg("trials"), py::arg("seed"), py::arg("workers") = 1, py::arg("mesh_level") = py::none());
  m.def("complex_crit_count", [](unsigned d, std::uint64_t seed, std::uint64_t stream_id) {
    GaussianStream stream(seed, stream_id);
    return complex_crit_count(d, stream);
  }, py::arg("d"), py::arg("seed"), py::arg("stream") = 0);

  // statistics
  m.def("chi_square_uniform", [](const std::vector<std::uint64_t>& bins) {
    const ChiSquareResult r = chi_square_uniform(bins);
    return py::make_tuple(r.statistic, r.degrees_of_freedom, r.p_value);
  }, py::arg("bins"), "(statistic, dof, p_value) against equal expected counts");

  // acceptance
  m.def("criterion_keys", &criterion_keys);
  m.def("run_criterion", [](const std::string& key, std::uint64_t seed, unsigned workers) {
    const auto id = criterion_id(key);
    if (!id) throw std::invalid_argument("unknown criterion: " + key);
    AcceptanceOptions o;
    o.seed = seed;
    o.workers = workers;
    CriterionResult c;
    {
      py::gil_scoped_release release;
      c = run_criterion(*id, o);
    }
    py::list rows;
    for (const auto& r : c.rows) rows.append(row_dict(r));
    py::dict out;
    out["id"] = c.id;
    out["key"] = c.key;
    out["pass"] = c.pass();
    out["seconds"] = c.seconds;
    out["rows"] = rows;
    return out;
  }, py::arg("key"), py::arg("seed") = kDefaultSeed, py::arg("workers") = 1);
  m.attr("DEFAULT_SEED") = kDefaultSeed;
}
