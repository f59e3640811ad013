#include "ssb/matcher.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <iomanip>
#include <limits>
#include <map>
#include <sstream>
#include <thread>

#include <Eigen/Dense>
#include <boost/math/tools/roots.hpp>

#include "ssb/errors.hpp"

namespace ssb {

namespace {

double law_g(double b, double sigma, double ratio) { return std::log(b) + M_PI / b + std::log(sigma) - std::log(ratio); }

std::string fmt_params(const MatchParams& m) {
  std::ostringstream os;
  os << std::setprecision(12) << "b=" << m.b << " rho=" << m.rho << " gamma=" << m.gamma << " theta=" << m.theta;
  return os.str();
}

}  // namespace

double sigma_of_b(double b, double kappa, double n_c) {
  if (!(b > 0)) throw DomainError("sigma_of_b: b must be positive");
  return kappa * kappa / n_c / b * std::exp(-M_PI / b);
}

double b_sigma(double sigma, double kappa, double n_c) {
  if (!(sigma > 0 && sigma <= 0.05)) throw DomainError("b_sigma: sigma must lie in (0, 0.05]");
  if (!(kappa > 0 && n_c > 0)) throw DomainError("b_sigma: kappa and N_c must be positive");
  const double ratio = kappa * kappa / n_c;
  // g decreases on (0, pi); the small root needs g(pi) < 0
  const double lo = 1e-3, hi = M_PI;
  if (!(law_g(lo, sigma, ratio) > 0 && law_g(hi, sigma, ratio) < 0))
    throw DomainError("b_sigma: no sign change in (0, pi), sigma too large for these constants");
  auto f = [&](double b) {
    return std::make_pair(law_g(b, sigma, ratio), 1 / b - M_PI / (b * b));
  };
  boost::uintmax_t it = 200;
  double guess = M_PI / std::log(ratio / sigma);
  guess = std::clamp(guess, lo, hi);
  return boost::math::tools::newton_raphson_iterate(f, guess, lo, hi, 52, it);
}

SigmaScales sigma_scales(double sigma, double kappa, double n_c) {
  SigmaScales s;
  s.sigma = sigma;
  s.b_sigma = b_sigma(sigma, kappa, n_c);
  const double b = s.b_sigma;
  s.rho_sigma = std::sqrt(2 * n_c * sigma);
  s.gamma_sigma = std::pow(b, 1.0 / 6) * std::exp(-2 / std::sqrt(b));
  s.theta_sigma = std::pow(b, 1.0 / 6) * std::exp(-M_PI / b) * std::exp(2 / std::sqrt(b));
  s.b_width = std::pow(b, 13.0 / 6);
  return s;
}

std::array<double, 4> to_scaled(const MatchParams& m, const SigmaScales& s) {
  return {(m.b - s.b_sigma) / s.b_width, (m.rho - s.rho_sigma) / s.rho_sigma, m.gamma / s.gamma_sigma,
          m.theta / s.theta_sigma};
}

MatchParams from_scaled(const std::array<double, 4>& x, const SigmaScales& s) {
  return {s.b_sigma + x[0] * s.b_width, s.rho_sigma * (1 + x[1]), x[2] * s.gamma_sigma, x[3] * s.theta_sigma};
}

bool in_strict_box(const MatchParams& m, const SigmaScales& s) {
  const auto x = to_scaled(m, s);
  return std::all_of(x.begin(), x.end(), [](double v) { return std::abs(v) <= 0.5; });
}

MatchParams initial_guess(double sigma, const GroundState& gs) {
  const auto s = sigma_scales(sigma, gs.kappa, gs.n_c);
  return {s.b_sigma, s.rho_sigma, 0.0, 0.0};
}

MatchProblem::MatchProblem(std::shared_ptr<const GroundState> gs, double sigma, MatchOptions opt)
    : gs_(std::move(gs)), opt_(opt) {
  if (!gs_) throw ConfigError("MatchProblem: no ground state");
  if (!(sigma > 0 && sigma <= 0.05)) throw ConfigError("sigma outside the supported range (0, 0.05]");
  if (!(opt_.tol_ode > 0 && opt_.tol_newton > 0 && opt_.picard_tol > 0 && opt_.fd_step > 0))
    throw ConfigError("tolerances must be positive");
  if (!(opt_.box_relax >= 1)) throw ConfigError("box relaxation must be >= 1");
  if (opt_.max_iter < 1) throw ConfigError("max_iter must be >= 1");
  try {
    scales_ = sigma_scales(sigma, gs_->kappa, gs_->n_c);
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
  lc_ = linearized_constants(*gs_);
  const auto [sre, sim] = residual_scales(scales_.b_sigma);
  if (sim / sre < 1e-13) {
    std::ostringstream os;
    os << "sigma=" << sigma << " is below the double-precision floor: S_Im/S_Re = " << sim / sre << " < 1e-13";
    throw ConfigError(os.str());
  }
}

std::pair<double, double> MatchProblem::residual_scales(double b) const {
  const int d = gs_->d;
  const double sre = gs_->kappa * std::pow(b, (d - 1) / 4.0) * std::exp(-1 / std::sqrt(b));
  const double sim = opt_.kappa_b_scale * lc_.kappa_B * scales_.sigma * std::pow(b, 1 + (d - 1) / 4.0) *
                     std::exp(1 / std::sqrt(b));
  return {sre, std::abs(sim)};
}

ExteriorParams MatchProblem::exterior_params(const MatchParams& m) const {
  ExteriorParams e;
  e.b = m.b;
  e.sigma = scales_.sigma;
  e.rho = m.rho;
  e.p = gs_->p;
  e.d = gs_->d;
  return e;
}

RegionLayout MatchProblem::layout(double b) const { return RegionLayout::make(b, opt_.r_far); }

double ResidualEval::norm() const {
  double s = 0;
  for (double x : v) s = std::max(s, std::abs(x));
  return s;
}

double exterior_phase(const BoundaryState& raw, const LinearizedBasis& basis) {
  const double lq = basis.Qp.back() / basis.Q.back();
  const double lb = basis.Bp.back() / basis.B.back();
  const cplx c = (lb * raw.P - raw.Pd) / (lb - lq);
  if (std::abs(c) == 0) return 0.0;
  return -std::arg(c);
}

ResidualEval match_residual(const MatchParams& m, const MatchProblem& prob) {
  return match_residual(m, prob, prob.options().tol_ode, prob.options().picard_tol);
}

ResidualEval match_residual(const MatchParams& m, const MatchProblem& prob, double tol_ode, double picard_tol) {
  ResidualEval out;
  out.v.fill(kResidualSentinel);
  if (!(m.b > 0 && m.b < 1 && m.rho > 0 && std::isfinite(m.gamma) && std::isfinite(m.theta))) {
    out.failure = "parameters outside the admissible region: " + fmt_params(m);
    return out;
  }
  try {
    const RegionLayout lay = prob.layout(m.b);
    const LinearizedBasis basis = build_basis(prob.ground_state(), prob.constants(), lay.r_K);
    InteriorOptions io;
    io.tol = picard_tol;
    const InteriorSolution sol = picard_interior(basis, m.b, prob.sigma(), m.gamma, io);
    ExteriorOptions eo;
    eo.rtol = tol_ode;
    eo.record = false;
    const BoundaryState raw = exterior_at_rK(prob.exterior_params(m), lay, eo);
    out.theta_ext = exterior_phase(raw, basis);
    const cplx e = std::polar(1.0, out.theta_ext);
    out.exterior = {raw.r, e * raw.P, e * raw.Pd};
    out.interior = interior_at_matchpoint(sol);
  } catch (const ContractionError& e) {
    out.failure = std::string("interior contraction failure: ") + e.what();
    return out;
  } catch (const IntegrationError& e) {
    out.failure = std::string("exterior integration failure: ") + e.what();
    return out;
  }
  const cplx rot = std::polar(1.0, m.theta);
  const cplx dp = out.interior.P - rot * out.exterior.P;
  const cplx dpd = out.interior.Pd - rot * out.exterior.Pd;
  const auto [sre, sim] = prob.residual_scales(m.b);
  out.v = {dp.real() / sre, dpd.real() / sre, dp.imag() / sim, dpd.imag() / sim};
  out.ok = std::all_of(out.v.begin(), out.v.end(), [](double x) { return std::isfinite(x); });
  if (!out.ok) out.failure = "non-finite residual";
  return out;
}

namespace {

// Runs f(k) for k in [0, n) on up to `jobs` threads; results are written by index.
template <class F>
void parallel_for(int n, int jobs, F&& f) {
  if (jobs <= 1 || n <= 1) {
    for (int k = 0; k < n; ++k) f(k);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  const int nt = std::min(jobs, n);
  for (int t = 0; t < nt; ++t)
    pool.emplace_back([&] {
      for (int k = next++; k < n; k = next++) f(k);
    });
  for (auto& th : pool) th.join();
}

using Vec4 = Eigen::Matrix<double, 4, 1>;
using Mat4 = Eigen::Matrix<double, 4, 4>;

Vec4 as_vec(const std::array<double, 4>& a) { return Vec4(a[0], a[1], a[2], a[3]); }

struct Bounds {
  std::array<double, 4> lo, hi;
};

Bounds scaled_bounds(const SigmaScales& s, double relax) {
  Bounds bd;
  const double h = 0.5 * relax;
  bd.lo = {-h, -h, -h, -h};
  bd.hi = {h, h, h, h};
  // keep b in (0, 1) with margin and rho positive
  bd.lo[0] = std::max(bd.lo[0], (0.5 * s.b_sigma - s.b_sigma) / s.b_width);
  bd.hi[0] = std::min(bd.hi[0], (std::min(0.95, 1.5 * s.b_sigma) - s.b_sigma) / s.b_width);
  bd.lo[1] = std::max(bd.lo[1], -0.9);
  return bd;
}

std::array<double, 4> project(std::array<double, 4> x, const Bounds& bd, bool& clipped) {
  clipped = false;
  for (int k = 0; k < 4; ++k) {
    const double c = std::clamp(x[k], bd.lo[k], bd.hi[k]);
    if (c != x[k]) clipped = true;
    x[k] = c;
  }
  return x;
}

}  // namespace

MatchedSolution solve_match(const MatchProblem& prob, const MatchParams& start) {
  const MatchOptions& opt = prob.options();
  const SigmaScales& sc = prob.scales();
  const Bounds bd = scaled_bounds(sc, opt.box_relax);

  MatchedSolution ms;
  ms.sigma = prob.sigma();
  ms.p = prob.p();
  ms.d = prob.d();
  ms.scales = sc;
  ms.gs = prob.ground_state_ptr();

  auto logf = [&](const std::string& s) { ms.log.push_back(s); };
  int evals = 0;
  auto eval = [&](const std::array<double, 4>& x) {
    ++evals;
    return match_residual(from_scaled(x, sc), prob);
  };

  bool clipped = false;
  std::array<double, 4> x = project(to_scaled(start, sc), bd, clipped);
  if (clipped) logf("start projected into the relaxed box");
  ResidualEval F = eval(x);
  if (!F.ok) throw NumericalError("matcher: residual undefined at the start point (" + F.failure + ")");

  std::array<double, 4> best_x = x;
  double best = F.norm();
  Mat4 J = Mat4::Zero();
  int it = 0;
  int box_hits = 0;
  bool converged = F.norm() <= opt.tol_newton;
  while (!converged && it < opt.max_iter) {
    ++it;
    // central differences, columns independent
    std::array<ResidualEval, 8> fd;
    std::array<std::array<double, 4>, 8> xs;
    for (int k = 0; k < 4; ++k) {
      xs[2 * k] = x;
      xs[2 * k + 1] = x;
      xs[2 * k][k] += opt.fd_step;
      xs[2 * k + 1][k] -= opt.fd_step;
    }
    parallel_for(8, opt.jobs, [&](int k) { fd[k] = match_residual(from_scaled(xs[k], sc), prob); });
    evals += 8;
    for (int k = 0; k < 4; ++k) {
      const auto& fp = fd[2 * k];
      const auto& fm = fd[2 * k + 1];
      Vec4 col;
      if (fp.ok && fm.ok)
        col = (as_vec(fp.v) - as_vec(fm.v)) / (2 * opt.fd_step);
      else if (fp.ok)
        col = (as_vec(fp.v) - as_vec(F.v)) / opt.fd_step;
      else if (fm.ok)
        col = (as_vec(F.v) - as_vec(fm.v)) / opt.fd_step;
      else
        throw MatchFailure("matcher: Jacobian column " + std::to_string(k) + " undefined near " +
                               fmt_params(from_scaled(x, sc)) + " (" + fp.failure + ")",
                           from_scaled(best_x, sc), best, it, ms.log);
      J.col(k) = col;
    }
    const Eigen::JacobiSVD<Mat4> svd(J);
    const auto sv = svd.singularValues();
    ms.jacobian_condition = sv(3) > 0 ? sv(0) / sv(3) : std::numeric_limits<double>::infinity();
    const Vec4 dx = J.fullPivLu().solve(-as_vec(F.v));
    if (!dx.allFinite())
      throw MatchFailure("matcher: singular Jacobian at " + fmt_params(from_scaled(x, sc)), from_scaled(best_x, sc), best,
                         it, ms.log);

    double lam = 1.0;
    bool accepted = false;
    for (int ls = 0; ls < 30; ++ls, lam *= 0.5) {
      std::array<double, 4> xn;
      for (int k = 0; k < 4; ++k) xn[k] = x[k] + lam * dx(k);
      xn = project(xn, bd, clipped);
      const ResidualEval Fn = eval(xn);
      if (Fn.ok && Fn.norm() < (1 - 1e-4 * lam) * F.norm()) {
        if (clipped) ++box_hits;
        x = xn;
        F = Fn;
        accepted = true;
        break;
      }
    }
    std::ostringstream os;
    os << std::setprecision(6) << "iter " << it << " |F|=" << F.norm() << " step=" << lam << " cond=" << ms.jacobian_condition
       << " x=(" << x[0] << ", " << x[1] << ", " << x[2] << ", " << x[3] << ")";
    logf(os.str());
    if (F.norm() < best) {
      best = F.norm();
      best_x = x;
    }
    if (!accepted) break;
    converged = F.norm() <= opt.tol_newton;
  }

  ms.iterations = it;
  ms.evaluations = evals;
  ms.params = from_scaled(best_x, sc);
  if (!converged) {
    std::ostringstream os;
    os << std::setprecision(6) << "matcher did not converge after " << it << " iterations; best |F|=" << best
       << " at " << fmt_params(ms.params);
    if (box_hits > 0) os << "; iterates hit the relaxed box, try continuation from a nearby sigma";
    throw MatchFailure(os.str(), ms.params, best, it, ms.log);
  }
  ms.converged = true;
  ms.residual = F.v;
  ms.residual_norm = F.norm();
  ms.strict_box = in_strict_box(ms.params, sc);
  ms.message = "converged";

  // independent re-evaluation at halved tolerances
  const ResidualEval R = match_residual(ms.params, prob, 0.5 * opt.tol_ode, 0.5 * opt.picard_tol);
  ms.recheck_norm = R.ok ? R.norm() : kResidualSentinel;
  ms.recheck_agreement = 0;
  for (int k = 0; k < 4; ++k) ms.recheck_agreement = std::max(ms.recheck_agreement, std::abs(R.v[k] - F.v[k]));

  // keep the pieces for profile assembly
  ms.layout = prob.layout(ms.params.b);
  auto basis = std::make_shared<LinearizedBasis>(build_basis(prob.ground_state(), prob.constants(), ms.layout.r_K));
  ms.basis = basis;
  InteriorOptions io;
  io.tol = opt.picard_tol;
  ms.interior = picard_interior(*basis, ms.params.b, ms.sigma, ms.params.gamma, io);
  ExteriorOptions eo;
  eo.rtol = opt.tol_ode;
  eo.record = true;
  const ExteriorParams ep = prob.exterior_params(ms.params);
  ms.exterior = integrate_exterior(far_field_init_corrected(ep, ms.layout.R_far), ms.layout, ep, eo);
  ms.theta_ext = F.theta_ext;
  return ms;
}

MatchedSolution solve_match(double sigma, double p, int d, const MatchOptions& opt) {
  auto gs = std::make_shared<const GroundState>(solve_ground_state(d, p, 1e-12));
  const MatchProblem prob(gs, sigma, opt);
  return solve_match(prob, initial_guess(sigma, *gs));
}

double coupled_exponent(int d, double sigma) {
  if (!(d - 2 * sigma > 0)) throw ConfigError("coupled exponent needs d > 2 sigma");
  return 1 + 4 / (d - 2 * sigma);
}

SweepResult continuation_sweep(const std::vector<double>& sigmas, int d, double p, bool couple_p,
                               const MatchOptions& opt) {
  for (std::size_t i = 1; i < sigmas.size(); ++i)
    if (!(sigmas[i] < sigmas[i - 1])) throw ConfigError("sigma list must be strictly descending");
  SweepResult out;
  std::map<double, std::shared_ptr<const GroundState>> cache;
  bool have_prev = false;
  std::array<double, 4> prev_x{};
  for (double sigma : sigmas) {
    LawRow row;
    row.sigma = sigma;
    row.d = d;
    row.p = couple_p ? coupled_exponent(d, sigma) : p;
    try {
      auto& gs = cache[row.p];
      if (!gs) gs = std::make_shared<const GroundState>(solve_ground_state(d, row.p, 1e-12));
      const MatchProblem prob(gs, sigma, opt);
      const SigmaScales& sc = prob.scales();
      row.b_sigma = sc.b_sigma;
      row.rho_sigma = sc.rho_sigma;
      row.gamma_sigma = sc.gamma_sigma;
      row.theta_sigma = sc.theta_sigma;
      MatchedSolution ms;
      bool solved = false;
      if (have_prev) {
        try {
          ms = solve_match(prob, from_scaled(prev_x, sc));
          solved = true;
          row.warm_started = true;
        } catch (const NumericalError&) {
        }
      }
      if (!solved) ms = solve_match(prob, initial_guess(sigma, *gs));
      row.b = ms.params.b;
      row.rho = ms.params.rho;
      row.gamma = ms.params.gamma;
      row.theta = ms.params.theta;
      row.residual = ms.residual_norm;
      row.jacobian_condition = ms.jacobian_condition;
      row.iterations = ms.iterations;
      row.converged = true;
      row.strict_box = ms.strict_box;
      row.message = ms.message;
      prev_x = to_scaled(ms.params, sc);
      have_prev = true;
      out.solution_row.push_back(out.rows.size());
      out.solutions.push_back(std::move(ms));
    } catch (const NumericalError& e) {
      row.message = e.what();
    } catch (const ConfigError& e) {
      row.message = e.what();
    }
    out.rows.push_back(row);
  }
  return out;
}

}  // namespace ssb
