#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ssb/airy.hpp"
#include "ssb/errors.hpp"
#include "ssb/exterior.hpp"
#include "ssb/ground_state.hpp"
#include "ssb/matcher.hpp"
#include "ssb/profile.hpp"
#include "ssb/verify.hpp"

namespace py = pybind11;
using namespace ssb;

namespace {

template <class T>
py::array_t<T> arr(const std::vector<T>& v) {
  return py::array_t<T>(static_cast<py::ssize_t>(v.size()), v.data());
}

py::dict diag_dict(const ProfileDiagnostics& g) {
  py::dict d;
  d["energy"] = g.energy;
  d["energy_error"] = g.energy_error;
  d["kinetic"] = g.kinetic;
  d["potential"] = g.potential;
  d["energy_inconclusive"] = g.energy_inconclusive;
  d["hdot1_dist"] = g.hdot1_dist;
  d["hdot1_error"] = g.hdot1_error;
  d["tail_amp"] = g.tail_amp;
  d["tail_spread"] = g.tail_spread;
  d["tail_inconclusive"] = g.tail_inconclusive;
  d["dpsi_slope"] = g.dpsi_slope;
  d["mass_growth_exponent"] = g.mass_growth_exponent;
  d["eq_residual_sup"] = g.eq_residual_sup;
  return d;
}

py::dict solution_dict(const MatchedSolution& ms, double h_outer) {
  SelfSimilarProfile prof;
  {
    py::gil_scoped_release nogil;
    prof = assemble_profile(ms, ProfileOptions{h_outer});
    compute_diagnostics(prof, *ms.gs);
  }
  std::vector<double> r;
  std::vector<cplx> psi, P;
  auto add = [&](const ProfileSegment& s, std::size_t from) {
    for (std::size_t i = from; i < s.r.size(); ++i) {
      r.push_back(s.r[i]);
      psi.push_back(s.Psi[i]);
      P.push_back(s.P[i]);
    }
  };
  add(prof.inner, 0);
  add(prof.outer, 1);
  py::dict d;
  d["sigma"] = ms.sigma;
  d["p"] = ms.p;
  d["d"] = ms.d;
  d["b"] = ms.params.b;
  d["rho"] = ms.params.rho;
  d["gamma"] = ms.params.gamma;
  d["theta"] = ms.params.theta;
  d["b_sigma"] = ms.scales.b_sigma;
  d["rho_sigma"] = ms.scales.rho_sigma;
  d["gamma_sigma"] = ms.scales.gamma_sigma;
  d["theta_sigma"] = ms.scales.theta_sigma;
  d["residual"] = ms.residual_norm;
  d["jacobian_condition"] = ms.jacobian_condition;
  d["iterations"] = ms.iterations;
  d["strict_box"] = ms.strict_box;
  d["r_K"] = ms.layout.r_K;
  d["R_far"] = ms.layout.R_far;
  d["diagnostics"] = diag_dict(prof.diag);
  d["r"] = arr(r);
  d["psi"] = arr(psi);
  d["P"] = arr(P);
  return d;
}

MatchOptions make_opts(double tol_newton, double tol_ode, int jobs, double r_far, double box_relax) {
  MatchOptions o;
  o.tol_newton = tol_newton;
  o.tol_ode = tol_ode;
  o.jobs = jobs;
  o.r_far = r_far;
  o.box_relax = box_relax;
  return o;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Self-similar blow-up profiles for slightly mass-supercritical NLS";

  static py::exception<NumericalError> numerical_exc(m, "NumericalError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const ConfigError& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    } catch (const DomainError& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    } catch (const NumericalError& e) {
      numerical_exc(e.what());
    }
  });

  py::class_<GroundState, std::shared_ptr<GroundState>>(m, "GroundState")
      .def_readonly("d", &GroundState::d)
      .def_readonly("p", &GroundState::p)
      .def_readonly("q0", &GroundState::q0)
      .def_readonly("kappa", &GroundState::kappa)
      .def_readonly("n_c", &GroundState::n_c)
      .def_readonly("n_c_error", &GroundState::n_c_error)
      .def_property_readonly("r", [](const GroundState& g) { return arr(g.grid); })
      .def_property_readonly("q", [](const GroundState& g) { return arr(g.q); })
      .def_property_readonly("qp", [](const GroundState& g) { return arr(g.qp); })
      .def("eval", &GroundState::eval, py::arg("r"), "(Q, Q') at r, fitted tail beyond the table")
      .def("residual_sup", &GroundState::residual_sup);

  m.def(
      "ground_state",
      [](int d, double p, double tol) {
        py::gil_scoped_release nogil;
        return std::make_shared<GroundState>(solve_ground_state(d, p, tol));
      },
      py::arg("d"), py::arg("p"), py::arg("tol") = 1e-12);
  m.def("closed_form_soliton_1d", &closed_form_soliton_1d, py::arg("p"), py::arg("r"));

  m.def(
      "airy",
      [](double s) {
        const auto a = airy_eval(s);
        return py::make_tuple(a.ai, a.ai_d, a.bb, a.bb_d);
      },
      py::arg("s"), "(Ai, Ai', BB, BB') on the real line");
  m.def(
      "turning_point_phase",
      [](double b) {
        const auto t = turning_point_phase(b);
        return py::make_tuple(t.lhs, t.rhs);
      },
      py::arg("b"));

  m.def(
      "b_sigma",
      [](double sigma, int d, double p) {
        const auto gs = solve_ground_state(d, p, 1e-12);
        return b_sigma(sigma, gs.kappa, gs.n_c);
      },
      py::arg("sigma"), py::arg("d") = 1, py::arg("p") = 5.0);
  m.def("coupled_exponent", &coupled_exponent, py::arg("d"), py::arg("sigma"));

  m.def(
      "solve",
      [](double sigma, int d, double p, bool couple_p, double tol_newton, double tol_ode, int jobs, double r_far,
         double box_relax, double h_outer) {
        const double pp = couple_p ? coupled_exponent(d, sigma) : p;
        MatchedSolution ms;
        {
          py::gil_scoped_release nogil;
          ms = solve_match(sigma, pp, d, make_opts(tol_newton, tol_ode, jobs, r_far, box_relax));
        }
        return solution_dict(ms, h_outer);
      },
      py::arg("sigma"), py::arg("d") = 1, py::arg("p") = 5.0, py::arg("couple_p") = false,
      py::arg("tol_newton") = 1e-8, py::arg("tol_ode") = 1e-12, py::arg("jobs") = 1, py::arg("r_far") = 0.0,
      py::arg("box_relax") = 10.0, py::arg("h_outer") = 0.005,
      "Matched solve at one sigma; returns parameters, diagnostics and the profile on a composite grid");

  m.def(
      "sweep",
      [](const std::vector<double>& sigmas, int d, double p, bool couple_p, double tol_newton, int jobs) {
        SweepResult sw;
        {
          py::gil_scoped_release nogil;
          sw = continuation_sweep(sigmas, d, p, couple_p, make_opts(tol_newton, 1e-12, jobs, 0.0, 10.0));
        }
        py::list rows;
        for (const auto& r : sw.rows) {
          py::dict row;
          row["sigma"] = r.sigma;
          row["p"] = r.p;
          row["b"] = r.b;
          row["b_sigma"] = r.b_sigma;
          row["b_dev"] = r.b_dev();
          row["rho"] = r.rho;
          row["rho_sigma"] = r.rho_sigma;
          row["rho_dev"] = r.rho_dev();
          row["gamma"] = r.gamma;
          row["theta"] = r.theta;
          row["residual"] = r.residual;
          row["converged"] = r.converged;
          row["strict_box"] = r.strict_box;
          row["message"] = r.message;
          rows.append(row);
        }
        return rows;
      },
      py::arg("sigmas"), py::arg("d") = 1, py::arg("p") = 5.0, py::arg("couple_p") = false,
      py::arg("tol_newton") = 1e-8, py::arg("jobs") = 1, "Continuation over a descending sigma list");

  m.def(
      "verify",
      [](double perturb_kappa_b) {
        std::vector<SuiteResult> res;
        {
          py::gil_scoped_release nogil;
          VerifyOptions vo;
          vo.perturb_kappa_b = perturb_kappa_b;
          res = run_all_suites(vo);
        }
        py::list out;
        for (const auto& s : res) {
          py::dict d;
          d["name"] = s.name;
          d["passed"] = s.passed;
          d["max_residual"] = s.max_residual;
          d["threshold"] = s.threshold;
          d["detail"] = s.detail;
          out.append(d);
        }
        return out;
      },
      py::arg("perturb_kappa_b") = 0.0);
}
