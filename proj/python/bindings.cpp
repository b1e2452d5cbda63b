#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "fw/caustics.hpp"
#include "fw/gallery.hpp"
#include "fw/green.hpp"
#include "fw/parametrix.hpp"
#include "fw/specfun.hpp"

namespace py = pybind11;

PYBIND11_MODULE(_fwave, m) {
  m.doc() = "Airy special functions, gallery modes, the spectral propagator and caustic detection.";
  m.attr("__version__") = FW_VERSION;

  py::register_exception<fw::Error>(m, "FwaveError", PyExc_RuntimeError);

  m.def("airy_ai", [](double x) { return fw::airy_ai(x); }, py::arg("x"));
  m.def("airy_ai_complex", [](fw::cplx z) { return fw::airy_ai(z); }, py::arg("z"));
  m.def("airy_ai_prime", [](double x) { return fw::airy_ai_prime(x); }, py::arg("x"));
  m.def(
      "airy_zeros",
      [](int k_max) {
        fw::AiryZeroTable t = fw::airy_zeros(k_max);
        std::vector<double> w;
        for (int k = 1; k <= k_max; ++k) w.push_back(t.omega(k));
        return w;
      },
      py::arg("k_max"), "The first k_max zeros omega_k of Ai(-x).");
  m.def("phase_correction_B", [](double u) { return fw::phase_correction_B(u); }, py::arg("u"));

  m.def("eigenvalue", &fw::eigenvalue, py::arg("k"), py::arg("eta"));
  m.def("eigenfunction", py::overload_cast<int, double, double>(&fw::eigenfunction), py::arg("k"), py::arg("x"),
        py::arg("eta"));
  m.def("mode_overlap", &fw::mode_overlap, py::arg("k"), py::arg("j"), py::arg("eta"));

  m.def(
      "propagate",
      [](double h, double a, double t, double x, double y) {
        fw::ModelParams p = fw::make_params(h, a);
        return fw::propagate(p, t, x, y).value;
      },
      py::arg("h"), py::arg("a"), py::arg("t"), py::arg("x"), py::arg("y"),
      "Windowed spectral propagator from the source (a, 0) at (t, x, y).");

  m.def(
      "detect_caustics",
      [](double a, double h, int N) {
        auto w = fw::reflection_window(a, N);
        py::list out;
        for (const auto& e : fw::detect_caustics(a, h, N, w[0], w[1])) {
          py::dict d;
          d["kind"] = fw::caustic_kind_name(e.kind);
          d["t"] = e.t;
          d["x"] = e.x;
          d["y"] = e.y;
          d["N"] = e.N;
          out.append(d);
        }
        return out;
      },
      py::arg("a"), py::arg("h"), py::arg("N"), "Caustic births of sheet N inside its reflection window.");
  m.def("reflection_window", &fw::reflection_window, py::arg("a"), py::arg("N"));
  m.def(
      "overlap_count",
      [](double X, double Y, double T, double a, double h) { return fw::overlap_count(X, Y, T, a, h).count(); },
      py::arg("X"), py::arg("Y"), py::arg("T"), py::arg("a"), py::arg("h"));
}
