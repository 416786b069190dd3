#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "lrmm/error.hpp"
#include "lrmm/estimator.hpp"
#include "lrmm/likelihood.hpp"
#include "lrmm/model.hpp"
#include "lrmm/theory.hpp"

namespace py = pybind11;
using namespace lrmm;

namespace {

std::vector<Matrix> observations(const SampleSet& s) {
  std::vector<Matrix> out;
  out.reserve(static_cast<std::size_t>(s.size()));
  for (Eigen::Index i = 0; i < s.size(); ++i) out.emplace_back(s.observation(i));
  return out;
}

}  // namespace

PYBIND11_MODULE(_lrmm, m) {
  m.doc() = "Low-rank Gaussian mixture estimation";

  py::register_exception<Error>(m, "LrmmError", PyExc_RuntimeError);

  py::class_<SignalMatrix>(m, "SignalMatrix")
      .def_readonly("m", &SignalMatrix::m)
      .def_readonly("rank", &SignalMatrix::rank)
      .def_readonly("singular_values", &SignalMatrix::singular_values)
      .def_readonly("u_basis", &SignalMatrix::u_basis)
      .def_readonly("v_basis", &SignalMatrix::v_basis)
      .def_property_readonly("lam", &SignalMatrix::lambda);

  py::class_<SampleSet>(m, "SampleSet")
      .def_static("from_matrices", &SampleSet::from_matrices, py::arg("observations"))
      .def_readonly("d1", &SampleSet::d1)
      .def_readonly("d2", &SampleSet::d2)
      .def_readonly("labels", &SampleSet::labels)
      .def_readonly("seed", &SampleSet::seed)
      .def("__len__", &SampleSet::size)
      .def("observation", [](const SampleSet& s, Eigen::Index i) -> Matrix {
        if (i < 0 || i >= s.size()) throw py::index_error();
        return s.observation(i);
      })
      .def("observations", &observations);

  py::class_<EstimateReport>(m, "EstimateReport")
      .def_readonly("m_hat", &EstimateReport::m_hat)
      .def_readonly("lambda_hat", &EstimateReport::lambda_hat)
      .def_readonly("m_check", &EstimateReport::m_check)
      .def_readonly("u1_hat", &EstimateReport::u1_hat)
      .def_readonly("v1_hat", &EstimateReport::v1_hat)
      .def_readonly("u_tilde", &EstimateReport::u_tilde)
      .def_readonly("v_tilde", &EstimateReport::v_tilde)
      .def_readonly("floor_active", &EstimateReport::floor_active)
      .def_readonly("batch_sizes", &EstimateReport::batch_sizes);

  py::class_<RatePoint>(m, "RatePoint")
      .def_readonly("rate", &RatePoint::rate)
      .def_readonly("info_threshold", &RatePoint::info_threshold)
      .def_readonly("comp_threshold", &RatePoint::comp_threshold)
      .def_property_readonly("sample_regime",
                             [](const RatePoint& p) { return to_string(p.sample_regime); })
      .def_property_readonly("hardness",
                             [](const RatePoint& p) { return to_string(p.hardness); });

  py::class_<MomentValue>(m, "MomentValue")
      .def_readonly("value", &MomentValue::value)
      .def_readonly("log_value", &MomentValue::log_value)
      .def_readonly("overflow", &MomentValue::overflow);

  py::class_<LowDegreeResult>(m, "LowDegreeResult")
      .def_readonly("value", &LowDegreeResult::value)
      .def_readonly("log_excess", &LowDegreeResult::log_excess)
      .def_readonly("terms", &LowDegreeResult::terms);

  py::class_<MleResult>(m, "MleResult")
      .def_readonly("m_hat", &MleResult::m_hat)
      .def_readonly("neg_log_lik", &MleResult::neg_log_lik)
      .def_readonly("iterations", &MleResult::iterations)
      .def_readonly("converged", &MleResult::converged)
      .def_readonly("trace", &MleResult::trace);

  m.def("make_signal", &make_signal, py::arg("d1"), py::arg("d2"), py::arg("r"),
        py::arg("lam"), py::arg("condition") = kDefaultCondition, py::arg("seed") = 0);
  m.def("sample_lrmm", &sample_lrmm, py::arg("signal"), py::arg("n"),
        py::arg("noise_scale") = 1.0, py::arg("seed") = 0);
  m.def(
      "estimate",
      [](const SampleSet& samples, int r, bool split, const std::string& floor_dim) {
        EstimatorConfig cfg;
        cfg.rank = r;
        cfg.split = split;
        cfg.floor_dim_rule = floor_dim_rule_from_string(floor_dim);
        py::gil_scoped_release release;
        return estimate(samples, cfg);
      },
      py::arg("samples"), py::arg("r"), py::arg("split") = false,
      py::arg("floor_dim") = "max_dim");
  m.def("loss", &loss, py::arg("m_hat"), py::arg("m"));
  m.def("log_density", &log_density, py::arg("m"), py::arg("x"));
  m.def("neg_log_lik", &neg_log_lik, py::arg("samples"), py::arg("m"));
  m.def(
      "em_mle",
      [](const SampleSet& s, int r, const Matrix& init, int max_iter, double tol) {
        return em_mle(s, r, init, {max_iter, tol});
      },
      py::arg("samples"), py::arg("r"), py::arg("init"), py::arg("max_iter") = 500,
      py::arg("tol") = 1e-8);
  m.def("minimax_rate", &minimax_rate, py::arg("n"), py::arg("d"), py::arg("r"),
        py::arg("lam"));
  m.def("classify", &classify, py::arg("n"), py::arg("d"), py::arg("r"), py::arg("lam"));
  m.def("rademacher_moment", &rademacher_moment, py::arg("n"), py::arg("k"));
  m.def(
      "lowdeg_norm",
      [](std::int64_t n, std::int64_t d1, std::int64_t d2, double lam, int degree,
         const std::string& mode) {
        return lowdeg_norm(n, d1, d2, lam, degree, low_degree_mode_from_string(mode));
      },
      py::arg("n"), py::arg("d1"), py::arg("d2"), py::arg("lam"), py::arg("degree"),
      py::arg("mode") = "exact");
}
