#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <algorithm>
#include <sstream>

#include "sglab/bounds.hpp"
#include "sglab/dynamics.hpp"
#include "sglab/eigensolve.hpp"
#include "sglab/lab.hpp"

namespace py = pybind11;
using namespace sglab;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

Array to_numpy(std::span<const double> v) {
  Array out(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

Amplitudes from_numpy(int n, const Array& a) {
  if (a.ndim() != 1) throw DimensionError("expected a one-dimensional array");
  return Amplitudes(n, std::vector<double>(a.data(), a.data() + a.size()));
}

py::array_t<std::uint32_t> map_array(std::span<const State> m) {
  py::array_t<std::uint32_t> out(static_cast<py::ssize_t>(m.size()));
  std::copy(m.begin(), m.end(), out.mutable_data());
  return out;
}

}  // namespace

PYBIND11_MODULE(_sglab, m) {
  m.doc() = "Scrambled-cost adiabatic Hamiltonian: spectra, gaps, bounds and dynamics";

  py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<DimensionError>(m, "DimensionError", PyExc_ValueError);
  py::register_exception<ResourceLimitError>(m, "ResourceLimitError", PyExc_MemoryError);
  py::register_exception<ConvergenceError>(m, "ConvergenceError", PyExc_RuntimeError);

  m.attr("generator_id") = std::string(kGeneratorId);
  m.attr("generator_version") = kGeneratorVersion;

  py::class_<ScrambleTable>(m, "ScrambleTable")
      .def_static("random", &ScrambleTable::random, py::arg("n"), py::arg("seed"),
                  py::arg("max_bits") = kMaxTableBits)
      .def_static("identity", &ScrambleTable::identity, py::arg("n"))
      .def_property_readonly("n", &ScrambleTable::bits)
      .def_property_readonly("seed", &ScrambleTable::seed)
      .def_property_readonly("target", &ScrambleTable::target)
      .def_property_readonly("forward", [](const ScrambleTable& t) { return map_array(t.forward_map()); })
      .def_property_readonly("inverse", [](const ScrambleTable& t) { return map_array(t.inverse_map()); })
      .def("cost", &ScrambleTable::cost, py::arg("z"))
      .def("to_bytes",
           [](const ScrambleTable& t) {
             std::ostringstream out;
             t.save(out);
             return py::bytes(out.str());
           })
      .def_static("from_bytes", [](const py::bytes& b) {
        std::istringstream in{std::string(b)};
        return ScrambleTable::load(in);
      });

  py::class_<AdiabaticOperator>(m, "AdiabaticOperator")
      .def(py::init<const ScrambleTable&>(), py::arg("table"))
      .def_property_readonly("n", &AdiabaticOperator::bits)
      .def_property_readonly("dim", &AdiabaticOperator::dim)
      .def_property_readonly("target", &AdiabaticOperator::target)
      .def("diagonal", &AdiabaticOperator::diagonal, py::arg("s"), py::arg("z"))
      .def(
          "apply",
          [](const AdiabaticOperator& op, double s, const Array& psi) {
            if (psi.ndim() != 1 || static_cast<std::size_t>(psi.size()) != op.dim()) {
              throw DimensionError("vector length does not match the operator");
            }
            Array out(psi.size());
            op.apply(s, std::span<const double>(psi.data(), op.dim()),
                     std::span<double>(out.mutable_data(), op.dim()));
            return out;
          },
          py::arg("s"), py::arg("psi"))
      .def(
          "dense_matrix",
          [](const AdiabaticOperator& op, double s) {
            const auto d = static_cast<py::ssize_t>(op.dim());
            const std::vector<double> a = dense_matrix(op, s);
            py::array_t<double> out({d, d});
            std::copy(a.begin(), a.end(), out.mutable_data());
            return out;
          },
          py::arg("s"));

  m.def(
      "dense_spectrum",
      [](const AdiabaticOperator& op, double s) { return to_numpy(dense_spectrum(op, s, false).eigenvalues); },
      py::arg("op"), py::arg("s"));
  m.def(
      "lowest_k",
      [](const AdiabaticOperator& op, double s, int k, double tol) {
        const SpectrumSlice slice = lowest_k(op, s, k, tol);
        return py::make_tuple(to_numpy(slice.eigenvalues), to_numpy(slice.residual_norms));
      },
      py::arg("op"), py::arg("s"), py::arg("k"), py::arg("tol") = 1e-10);
  m.def(
      "ground_state",
      [](const AdiabaticOperator& op, double s, double tol) {
        const GroundState gs = ground_state(op, s, tol);
        return py::make_tuple(gs.energy, to_numpy(gs.vector.data()));
      },
      py::arg("op"), py::arg("s"), py::arg("tol") = 1e-11);
  m.def("gap", [](const AdiabaticOperator& op, double s, double tol) { return gap(op, s, tol); },
        py::arg("op"), py::arg("s"), py::arg("tol") = 1e-10);
  m.def(
      "min_gap",
      [](const AdiabaticOperator& op, double s_lo, double s_hi, double coarse_step, double refine_tol) {
        MinGapOptions o;
        o.s_lo = s_lo;
        o.s_hi = s_hi;
        o.coarse_step = coarse_step;
        o.refine_tol = refine_tol;
        const GapResult r = min_gap(op, o);
        py::dict d;
        d["s_min"] = r.s_min;
        d["gap"] = r.gap;
        d["bracket"] = r.bracket;
        d["profile"] = r.profile;
        return d;
      },
      py::arg("op"), py::arg("s_lo") = 0.0, py::arg("s_hi") = 1.0, py::arg("coarse_step") = 0.02,
      py::arg("refine_tol") = 1e-6);

  m.def("e_curve", &e_curve, py::arg("s"));
  m.def(
      "cw_lower",
      [](const AdiabaticOperator& op, double s, const Array& phi) {
        const CwBound b = cw_lower(op, s, from_numpy(op.bits(), phi));
        return py::make_tuple(b.value, b.argmin);
      },
      py::arg("op"), py::arg("s"), py::arg("phi"));
  m.def(
      "variational_upper",
      [](const AdiabaticOperator& op, double s, const Array& psi) {
        return variational_upper(op, s, from_numpy(op.bits(), psi));
      },
      py::arg("op"), py::arg("s"), py::arg("psi"));
  m.def("solve_c", &solve_c, py::arg("target"));
  m.def("binary_entropy", &binary_entropy, py::arg("x"));
  m.def("p_bound", &p_bound, py::arg("n"), py::arg("k"), py::arg("gamma"));
  m.def("first_excited_additive_term", &first_excited_additive_term, py::arg("s"), py::arg("c"));

  m.def(
      "evolve",
      [](const AdiabaticOperator& op, double T, double tol, const std::string& integrator) {
        StepControl control;
        control.tolerance = tol;
        if (integrator == "midpoint") {
          control.scheme = Integrator::midpoint;
        } else if (integrator != "magnus4") {
          throw DomainError("integrator must be magnus4 or midpoint");
        }
        const EvolutionResult r = evolve(op, T, control);
        py::dict d;
        d["T"] = r.T;
        d["success_probability"] = r.success_probability;
        d["norm_drift"] = r.norm_drift;
        d["steps"] = r.steps;
        return d;
      },
      py::arg("op"), py::arg("T"), py::arg("tol") = 1e-9, py::arg("integrator") = "magnus4");
  m.def(
      "adiabatic_bound",
      [](int n, const std::vector<std::pair<double, double>>& profile, double T) {
        return adiabatic_bound(n, profile, T);
      },
      py::arg("n"), py::arg("profile"), py::arg("T"));
  m.def("simplified_bound", &simplified_bound, py::arg("n"), py::arg("g"), py::arg("T"));
}
