#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "fgl/inference.hpp"
#include "fgl/simulation.hpp"
#include "fgl/solver.hpp"

namespace py = pybind11;
using namespace fgl;

namespace {

std::vector<SymMatrix> to_sym(const std::vector<Eigen::MatrixXd>& ms) {
  std::vector<SymMatrix> out;
  out.reserve(ms.size());
  for (const auto& m : ms) out.emplace_back(m);
  return out;
}

std::vector<Eigen::MatrixXd> to_dense(const std::vector<SymMatrix>& ms) {
  std::vector<Eigen::MatrixXd> out;
  out.reserve(ms.size());
  for (const auto& m : ms) out.push_back(m.dense());
  return out;
}

AdmmSettings make_settings(double eta, double tol, int max_iter, bool relative) {
  AdmmSettings s;
  s.eta = eta;
  s.tol_primal = tol;
  s.tol_dual = tol;
  s.max_iter = max_iter;
  s.relative = relative;
  return s;
}

py::dict fit_dict(const FglFit& fit) {
  py::dict d;
  d["thetas"] = to_dense(fit.thetas);
  d["lambda"] = fit.params.lambda;
  d["rho"] = fit.params.rho;
  d["iterations"] = fit.iterations;
  d["converged"] = fit.converged;
  d["primal_residual"] = fit.primal_residual;
  d["dual_residual"] = fit.dual_residual;
  d["objective_trace"] = fit.objective_trace;
  d["scale"] = to_string(fit.scale);
  return d;
}

py::dict result_dict(const TestResult& r) {
  py::dict d;
  d["T"] = r.statistic;
  d["sigma_hat"] = r.sigma_hat;
  d["z"] = r.z;
  d["p_value"] = r.p_value;
  d["ci_low"] = r.ci_low;
  d["ci_high"] = r.ci_high;
  d["reject"] = r.reject;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Fused graphical lasso: estimation, de-biasing and tests";
  m.attr("__version__") = FGL_VERSION;

  auto base = py::register_exception<Error>(m, "FglError", PyExc_RuntimeError);
  py::register_exception<InvalidInput>(m, "InvalidInput", base.ptr());
  py::register_exception<InsufficientData>(m, "InsufficientData", base.ptr());
  py::register_exception<NotPositiveDefinite>(m, "NotPositiveDefinite", base.ptr());
  py::register_exception<NotPositiveSemiDefinite>(m, "NotPositiveSemiDefinite", base.ptr());
  py::register_exception<DegenerateVariance>(m, "DegenerateVariance", base.ptr());
  py::register_exception<UnsupportedDesign>(m, "UnsupportedDesign", base.ptr());

  m.def(
      "sample_covariance",
      [](const Eigen::MatrixXd& x, bool center) { return sample_covariance(x, center).dense(); },
      py::arg("x"), py::arg("center") = true);

  m.def(
      "prox_fused_lasso",
      [](std::vector<double> targets, double eta, double lambda, double rho) {
        return prox_fused_lasso({std::move(targets), eta, lambda, rho, false});
      },
      py::arg("targets"), py::arg("eta"), py::arg("lam"), py::arg("rho"));

  m.def(
      "fit",
      [](const std::vector<Eigen::MatrixXd>& sigmas, double lambda, double rho, double eta,
         double tol, int max_iter, bool relative) {
        const auto s = to_sym(sigmas);
        return fit_dict(fit_fgl(s, {lambda, rho, false}, make_settings(eta, tol, max_iter, relative)));
      },
      py::arg("sigmas"), py::arg("lam"), py::arg("rho"), py::arg("eta") = 1.0,
      py::arg("tol") = 1e-5, py::arg("max_iter") = 500, py::arg("relative") = false);

  m.def(
      "fit_weighted",
      [](const std::vector<Eigen::MatrixXd>& sigmas, double lambda, double rho, double eta,
         double tol, int max_iter) {
        const auto s = to_sym(sigmas);
        const auto wf = fit_fgl_weighted(s, {lambda, rho, true}, make_settings(eta, tol, max_iter, false));
        py::dict d = fit_dict(wf.fit_r);
        d["thetas_w"] = to_dense(wf.thetas_w);
        return d;
      },
      py::arg("sigmas"), py::arg("lam"), py::arg("rho"), py::arg("eta") = 1.0,
      py::arg("tol") = 1e-5, py::arg("max_iter") = 500);

  m.def(
      "kkt_check",
      [](const std::vector<Eigen::MatrixXd>& thetas, const std::vector<Eigen::MatrixXd>& sigmas,
         double lambda, double rho) {
        FglFit fit;
        fit.thetas = to_sym(thetas);
        fit.params = {lambda, rho, false};
        const auto r = kkt_check(fit, to_sym(sigmas), fit.params);
        py::dict d;
        d["stationarity"] = r.stationarity;
        d["max_stationarity"] = r.max_stationarity();
        d["dual_feasibility_excess"] = r.dual_feasibility_excess;
        d["complementarity_violations"] = r.complementarity_violations;
        return d;
      },
      py::arg("thetas"), py::arg("sigmas"), py::arg("lam"), py::arg("rho"));

  m.def(
      "select_tuning",
      [](const std::vector<Eigen::MatrixXd>& sigmas, const std::vector<long>& ns,
         const std::vector<double>& lambdas, const std::vector<double>& rhos) {
        const auto s = to_sym(sigmas);
        const auto sel = select_tuning_aic(s, ns, penalty_grid(lambdas, rhos));
        py::list table;
        for (const auto& e : sel.table) table.append(py::make_tuple(e.params.lambda, e.params.rho, e.aic));
        py::dict d;
        d["lambda"] = sel.best.lambda;
        d["rho"] = sel.best.rho;
        d["table"] = table;
        d["fit"] = fit_dict(sel.best_fit);
        return d;
      },
      py::arg("sigmas"), py::arg("ns"), py::arg("lambdas"), py::arg("rhos"));

  m.def(
      "debias",
      [](const std::vector<Eigen::MatrixXd>& thetas, const std::vector<Eigen::MatrixXd>& sigmas,
         const std::vector<long>& ns) {
        return to_dense(debias(to_sym(thetas), to_sym(sigmas), ns).thetas_d);
      },
      py::arg("thetas"), py::arg("sigmas"), py::arg("ns"));

  m.def(
      "test_linear",
      [](const std::vector<Eigen::MatrixXd>& thetas, const std::vector<Eigen::MatrixXd>& sigmas,
         const std::vector<long>& ns, const std::vector<double>& a, Index i, Index j,
         double null_value, double alpha) {
        const auto t = to_sym(thetas);
        const auto db = debias(t, to_sym(sigmas), ns);
        return result_dict(test_linear(db, t, {a, i, j}, null_value, alpha));
      },
      py::arg("thetas"), py::arg("sigmas"), py::arg("ns"), py::arg("a"), py::arg("i"),
      py::arg("j"), py::arg("null") = 0.0, py::arg("alpha") = 0.05);

  m.def(
      "generate_precision",
      [](Index p, double alpha_tilde, std::uint64_t seed) {
        return generate_precision({p, alpha_tilde, seed}).theta0.front().dense();
      },
      py::arg("p"), py::arg("alpha_tilde"), py::arg("seed"));

  m.def("sample_gaussian",
        [](const Eigen::MatrixXd& theta0, Index n, std::uint64_t seed) {
          return sample_gaussian(SymMatrix(theta0), n, seed);
        },
        py::arg("theta0"), py::arg("n"), py::arg("seed"));

  m.def("normal_critical_value", &normal_critical_value, py::arg("alpha"));
}
