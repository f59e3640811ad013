#include "cli_app.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <json.hpp>
#include <map>
#include <memory>
#include <sstream>

#include "ssb/errors.hpp"
#include "ssb/ground_state.hpp"
#include "ssb/interior.hpp"
#include "ssb/io.hpp"
#include "ssb/matcher.hpp"
#include "ssb/profile.hpp"
#include "ssb/verify.hpp"

namespace ssb::cli {

namespace {

using ojson = nlohmann::ordered_json;
using Header = std::vector<std::pair<std::string, std::string>>;

// Usage problem detected after parsing (missing flag and the like).
struct UsageError : ConfigError {
  UsageError(const std::string& what, std::string usage) : ConfigError(what), usage(std::move(usage)) {}
  std::string usage;
};

// Numerical failure after which nothing else should be written; the dump is already on disk.
struct Failed : NumericalError {
  using NumericalError::NumericalError;
};

struct Context {
  RunConfig cfg;
  std::string command;
  std::map<std::string, std::string> file_keys;  // keys that came from --config
  bool dump_trajectory = false;
  double perturb_kappa_b = 0.0;
  std::ostream* out = nullptr;
  std::ostream* err = nullptr;
};

double num_or_nan(double x) { return std::isfinite(x) ? x : std::nan(""); }

ojson config_json(const RunConfig& c) {
  ojson j;
  j["d"] = c.d;
  j["p"] = c.p;
  j["couple_p"] = c.couple_p;
  j["sigma"] = c.sigma;
  j["sigma_list"] = c.sigma_list;
  j["sigma_min"] = c.sigma_min;
  j["sigma_max"] = c.sigma_max;
  j["b"] = c.b;
  j["tol_ode"] = c.tol_ode;
  j["tol_newton"] = c.tol_newton;
  j["tol_gs"] = c.tol_gs;
  j["tol_picard"] = c.tol_picard;
  j["r_far"] = c.r_far;
  j["box_relax"] = c.box_relax;
  j["max_iter"] = c.max_iter;
  j["jobs"] = c.jobs;
  j["h_outer"] = c.h_outer;
  j["out_dir"] = c.out_dir;
  return j;
}

Header csv_header(const Context& ctx) {
  Header h{{"command", ctx.command}};
  for (auto& kv : ctx.cfg.to_kv()) h.push_back(kv);
  return h;
}

ojson json_base(const Context& ctx) {
  ojson j;
  j["command"] = ctx.command;
  j["config"] = config_json(ctx.cfg);
  return j;
}

std::string out_path(const Context& ctx, const std::string& name) {
  return (std::filesystem::path(ctx.cfg.out_dir) / name).string();
}

void write_json(const Context& ctx, const std::string& name, const ojson& j) {
  write_file_atomic(out_path(ctx, name), j.dump(2) + "\n");
}

void write_csv(const Context& ctx, const std::string& name, const std::vector<std::string>& cols,
               const std::vector<std::vector<double>>& rows) {
  write_file_atomic(out_path(ctx, name), csv_text(csv_header(ctx), cols, rows));
}

std::string sci(double x, int prec = 6) {
  std::ostringstream os;
  os << std::setprecision(prec) << x;
  return os.str();
}

double effective_p(const RunConfig& c, double sigma) { return c.couple_p ? coupled_exponent(c.d, sigma) : c.p; }

MatchOptions match_options(const RunConfig& c) {
  MatchOptions o;
  o.tol_newton = c.tol_newton;
  o.tol_ode = c.tol_ode;
  o.picard_tol = c.tol_picard;
  o.max_iter = c.max_iter;
  o.box_relax = c.box_relax;
  o.jobs = c.jobs;
  o.r_far = c.r_far;
  return o;
}

std::shared_ptr<const GroundState> ground_state_for(const RunConfig& c, double p) {
  return std::make_shared<const GroundState>(solve_ground_state(c.d, p, c.tol_gs));
}

// ---------------------------------------------------------------- ground-state

int cmd_ground_state(Context& ctx) {
  const RunConfig& c = ctx.cfg;
  const double p = effective_p(c, c.sigma);
  const GroundState gs = solve_ground_state(c.d, p, c.tol_gs);
  const double kappa = fit_kappa(gs);
  const MassIntegral mass = mass_integral(gs);
  const double res = gs.residual_sup();

  std::vector<std::vector<double>> rows;
  rows.reserve(gs.grid.size());
  for (std::size_t i = 0; i < gs.grid.size(); ++i) rows.push_back({gs.grid[i], gs.q[i], gs.qp[i]});
  write_csv(ctx, "ground_state.csv", {"r", "Q", "Qp"}, rows);

  ojson j = json_base(ctx);
  j["d"] = c.d;
  j["p"] = p;
  j["q0"] = gs.q0;
  j["kappa"] = kappa;
  j["kappa_tail_c"] = gs.kappa_c;
  j["n_c"] = mass.value;
  j["n_c_error"] = mass.error;
  j["residual_sup"] = res;
  j["tolerance"] = c.tol_gs;
  j["residual_below_tolerance"] = res <= c.tol_gs;
  j["shooting_tolerance"] = gs.shoot_tol;
  j["bisections"] = gs.bisections;
  j["departure_radius"] = gs.departure_radius;
  j["r_max"] = gs.r_max();
  if (c.d == 1) {
    double sup = 0;
    for (std::size_t i = 0; i < gs.grid.size() && gs.grid[i] <= 20.0; ++i)
      sup = std::max(sup, std::abs(gs.q[i] - closed_form_soliton_1d(p, gs.grid[i])));
    // Q = c sech^{2/(p-1)}(a r), a = (p-1)/2, c = ((p+1)/2)^{1/(p-1)}
    const double amp = std::pow((p + 1) / 2, 1 / (p - 1));
    const double kappa_cf = amp * std::pow(2.0, 2 / (p - 1));
    ojson cf;
    cf["sup_error_0_20"] = sup;
    cf["kappa"] = kappa_cf;
    cf["kappa_relative_error"] = std::abs(kappa / kappa_cf - 1);
    if (p == 5.0) {
      const double nc = std::sqrt(3.0) * M_PI / 4;
      cf["n_c"] = nc;
      cf["n_c_relative_error"] = std::abs(mass.value / nc - 1);
    }
    j["closed_form"] = cf;
  }
  write_json(ctx, "ground_state.json", j);

  *ctx.out << "ground state d=" << c.d << " p=" << sci(p, 10) << ": Q(0)=" << sci(gs.q0, 12)
           << " kappa=" << sci(kappa, 10) << " N_c=" << sci(mass.value, 10) << " (+-" << sci(mass.error, 2)
           << ") residual=" << sci(res, 3) << "\n";
  return 0;
}

// ---------------------------------------------------------------- basis

int cmd_basis(Context& ctx) {
  const RunConfig& c = ctx.cfg;
  const double p = effective_p(c, c.sigma);
  const GroundState gs = solve_ground_state(c.d, p, c.tol_gs);
  const LinearizedConstants lc = linearized_constants(gs);
  const double b = c.b > 0 ? c.b : b_sigma(c.sigma, gs.kappa, gs.n_c);
  const double r_K = 1 / std::sqrt(b);
  const LinearizedBasis basis = build_basis(gs, lc, r_K);

  double wr = 0;
  std::vector<std::vector<double>> rows;
  rows.reserve(basis.r.size());
  for (std::size_t i = 0; i < basis.r.size(); ++i) {
    rows.push_back({basis.r[i], basis.A[i], basis.D[i], basis.B[i]});
    if (basis.r[i] > 0)
      wr = std::max(wr, std::abs((basis.A[i] * basis.Dp[i] - basis.Ap[i] * basis.D[i]) * basis.w[i] - 1));
  }
  write_csv(ctx, "basis.csv", {"r", "A", "D", "B"}, rows);

  ojson j = json_base(ctx);
  j["d"] = c.d;
  j["p"] = p;
  j["b"] = b;
  j["r_K"] = r_K;
  j["nodes"] = basis.r.size();
  j["kappa"] = gs.kappa;
  j["n_c"] = gs.n_c;
  j["kappa_A"] = lc.kappa_A;
  j["kappa_B"] = lc.kappa_B;
  j["kappa_B_identity"] = lc.kappa_B * 2 * gs.kappa / gs.n_c;
  j["wronskian_AD_max_deviation"] = wr;
  write_json(ctx, "basis.json", j);

  *ctx.out << "basis on [0, " << sci(r_K) << "] (b=" << sci(b) << "): kappa_A=" << sci(lc.kappa_A, 10)
           << " kappa_B=" << sci(lc.kappa_B, 10) << " kappa_B*2kappa/N_c=" << sci(lc.kappa_B * 2 * gs.kappa / gs.n_c, 10)
           << " max|W(A,D)r^(d-1)-1|=" << sci(wr, 3) << "\n";
  return 0;
}

// ---------------------------------------------------------------- solve / sweep

const std::vector<std::string> kLawColumns = {
    "sigma",  "p",           "d",          "b",          "b_sigma",       "b_dev",          "rho",
    "rho_sigma", "rho_dev",  "gamma",      "gamma_sigma", "theta",        "theta_sigma",    "residual",
    "jacobian_condition",    "iterations", "converged",  "strict_box",    "warm_started",   "energy",
    "energy_error", "kinetic", "tail_amp", "tail_spread", "hdot1_dist",   "dpsi_slope"};

struct RowDiag {
  bool have = false;
  ProfileDiagnostics diag;
};

std::vector<double> law_values(const LawRow& r, const RowDiag& rd) {
  const double nan = std::nan("");
  const auto& g = rd.diag;
  return {r.sigma,
          r.p,
          double(r.d),
          r.b,
          r.b_sigma,
          r.converged ? r.b_dev() : nan,
          r.rho,
          r.rho_sigma,
          r.converged ? r.rho_dev() : nan,
          r.gamma,
          r.gamma_sigma,
          r.theta,
          r.theta_sigma,
          r.residual,
          num_or_nan(r.jacobian_condition),
          double(r.iterations),
          r.converged ? 1.0 : 0.0,
          r.strict_box ? 1.0 : 0.0,
          r.warm_started ? 1.0 : 0.0,
          rd.have ? g.energy : nan,
          rd.have ? g.energy_error : nan,
          rd.have ? g.kinetic : nan,
          rd.have ? g.tail_amp : nan,
          rd.have ? g.tail_spread : nan,
          rd.have ? g.hdot1_dist : nan,
          rd.have ? g.dpsi_slope : nan};
}

LawRow row_of(const MatchedSolution& ms) {
  LawRow r;
  r.sigma = ms.sigma;
  r.p = ms.p;
  r.d = ms.d;
  r.b = ms.params.b;
  r.b_sigma = ms.scales.b_sigma;
  r.rho = ms.params.rho;
  r.rho_sigma = ms.scales.rho_sigma;
  r.gamma = ms.params.gamma;
  r.gamma_sigma = ms.scales.gamma_sigma;
  r.theta = ms.params.theta;
  r.theta_sigma = ms.scales.theta_sigma;
  r.residual = ms.residual_norm;
  r.jacobian_condition = ms.jacobian_condition;
  r.iterations = ms.iterations;
  r.converged = ms.converged;
  r.strict_box = ms.strict_box;
  r.message = ms.message;
  return r;
}

ojson diag_json(const MatchedSolution& ms, const SelfSimilarProfile& prof) {
  const auto& g = prof.diag;
  ojson j;
  ojson prm;
  prm["b"] = ms.params.b;
  prm["rho"] = ms.params.rho;
  prm["gamma"] = ms.params.gamma;
  prm["theta"] = ms.params.theta;
  j["params"] = prm;
  ojson sc;
  sc["b_sigma"] = ms.scales.b_sigma;
  sc["rho_sigma"] = ms.scales.rho_sigma;
  sc["gamma_sigma"] = ms.scales.gamma_sigma;
  sc["theta_sigma"] = ms.scales.theta_sigma;
  sc["b_width"] = ms.scales.b_width;
  j["scales"] = sc;
  j["b_dev"] = ms.params.b / ms.scales.b_sigma - 1;
  j["rho_dev"] = ms.params.rho / ms.scales.rho_sigma - 1;
  ojson m;
  m["residual"] = ms.residual;
  m["residual_norm"] = ms.residual_norm;
  m["jacobian_condition"] = num_or_nan(ms.jacobian_condition);
  m["iterations"] = ms.iterations;
  m["evaluations"] = ms.evaluations;
  m["strict_box"] = ms.strict_box;
  m["recheck_norm"] = ms.recheck_norm;
  m["recheck_agreement"] = ms.recheck_agreement;
  m["log"] = ms.log;
  j["matcher"] = m;
  ojson lay;
  lay["r_K"] = ms.layout.r_K;
  lay["r_J"] = ms.layout.r_J;
  lay["r_I"] = ms.layout.r_I;
  lay["R_far"] = ms.layout.R_far;
  j["layout"] = lay;
  ojson e;
  e["value"] = g.energy;
  e["error"] = g.energy_error;
  e["kinetic"] = g.kinetic;
  e["potential"] = g.potential;
  e["tail_kinetic"] = g.tail_kinetic;
  e["tail_potential"] = g.tail_potential;
  e["inconclusive"] = g.energy_inconclusive;
  e["zero_within_bound"] = std::abs(g.energy) <= std::max(1e-3 * g.kinetic, g.energy_error);
  j["energy"] = e;
  ojson t;
  t["amplitude"] = g.tail_amp;
  t["spread"] = g.tail_spread;
  t["inconclusive"] = g.tail_inconclusive;
  t["relative_to_rho"] = g.tail_amp / ms.params.rho - 1;
  j["tail"] = t;
  ojson h;
  h["value"] = g.hdot1_dist;
  h["error"] = g.hdot1_error;
  j["hdot1_distance_to_Q"] = h;
  j["dpsi_slope"] = g.dpsi_slope;
  j["dpsi_slope_expected"] = -(ms.d / 2.0 + 1 - ms.sigma);
  j["mass_growth_exponent"] = g.mass_growth_exponent;
  j["equation_residual_sup"] = g.eq_residual_sup;
  j["jump_P"] = g.jump_P;
  j["jump_Pd"] = g.jump_Pd;
  return j;
}

void write_solution_files(Context& ctx, const MatchedSolution& ms, const SelfSimilarProfile& prof) {
  std::vector<std::vector<double>> rows;
  auto add = [&](const ProfileSegment& s, std::size_t from) {
    for (std::size_t i = from; i < s.r.size(); ++i)
      rows.push_back({s.r[i], s.Psi[i].real(), s.Psi[i].imag(), std::abs(s.Psi[i]), s.P[i].real(), s.P[i].imag()});
  };
  add(prof.inner, 0);
  add(prof.outer, 1);  // r_K already present
  write_csv(ctx, "profile.csv", {"r", "re_psi", "im_psi", "abs_psi", "re_p", "im_p"}, rows);

  ojson j = json_base(ctx);
  j["sigma"] = ms.sigma;
  j["p"] = ms.p;
  j["d"] = ms.d;
  j.update(diag_json(ms, prof));
  write_json(ctx, "diagnostics.json", j);

  RowDiag rd{true, prof.diag};
  write_csv(ctx, "law_row.csv", kLawColumns, {law_values(row_of(ms), rd)});

  if (ctx.dump_trajectory) {
    const cplx rot = std::polar(1.0, ms.params.theta + ms.theta_ext);
    std::vector<std::vector<double>> tr;
    const auto& ex = ms.exterior;
    for (std::size_t i = ex.r.size(); i-- > 0;) {
      const auto [u, ud] = ex.U(ex.r[i]);
      const cplx a = rot * u, bb = rot * ud;
      tr.push_back({ex.r[i], a.real(), a.imag(), bb.real(), bb.imag()});
    }
    write_csv(ctx, "trajectory.csv", {"r", "re_u", "im_u", "re_ud", "im_ud"}, tr);
  }
}

void print_solution(Context& ctx, const MatchedSolution& ms, const SelfSimilarProfile& prof) {
  const auto& g = prof.diag;
  *ctx.out << "sigma=" << sci(ms.sigma) << " p=" << sci(ms.p, 10) << ": b=" << sci(ms.params.b, 10)
           << " (b/b_sigma-1=" << sci(ms.params.b / ms.scales.b_sigma - 1, 4) << ") rho=" << sci(ms.params.rho, 10)
           << " (rho/rho_sigma-1=" << sci(ms.params.rho / ms.scales.rho_sigma - 1, 4) << ") gamma=" << sci(ms.params.gamma, 4)
           << " theta=" << sci(ms.params.theta, 4) << "\n"
           << "  |F|=" << sci(ms.residual_norm, 3) << " after " << ms.iterations << " iterations, cond "
           << sci(ms.jacobian_condition, 3) << (ms.strict_box ? "" : ", outside the strict box") << "\n"
           << "  E=" << sci(g.energy, 3) << " +- " << sci(g.energy_error, 2) << " (kinetic " << sci(g.kinetic, 4)
           << ")" << (g.energy_inconclusive ? " inconclusive" : "") << ", tail amplitude " << sci(g.tail_amp, 6)
           << ", |Psi-Q|_H1dot=" << sci(g.hdot1_dist, 4) << ", |Psi'| slope " << sci(g.dpsi_slope, 4)
           << ", truncated-mass growth exponent " << sci(g.mass_growth_exponent, 3) << "\n";
}

void write_failure(Context& ctx, const std::string& what, const MatchFailure* mf, double sigma) {
  ojson j = json_base(ctx);
  j["sigma"] = sigma;
  j["error"] = what;
  if (mf) {
    ojson b;
    b["b"] = mf->best.b;
    b["rho"] = mf->best.rho;
    b["gamma"] = mf->best.gamma;
    b["theta"] = mf->best.theta;
    j["best_iterate"] = b;
    j["best_residual_norm"] = mf->best_norm;
    j["iterations"] = mf->iterations;
    j["log"] = mf->log;
  }
  write_json(ctx, "failure.json", j);
}

int cmd_solve(Context& ctx) {
  const RunConfig& c = ctx.cfg;
  const double p = effective_p(c, c.sigma);
  const auto gs = ground_state_for(c, p);
  const MatchProblem prob(gs, c.sigma, match_options(c));
  MatchedSolution ms;
  try {
    ms = solve_match(prob, initial_guess(c.sigma, *gs));
  } catch (const MatchFailure& e) {
    write_failure(ctx, e.what(), &e, c.sigma);
    throw Failed(std::string(e.what()) + " (best iterate in " + out_path(ctx, "failure.json") + ")");
  } catch (const NumericalError& e) {
    write_failure(ctx, e.what(), nullptr, c.sigma);
    throw Failed(e.what());
  }
  SelfSimilarProfile prof = assemble_profile(ms, ProfileOptions{c.h_outer});
  compute_diagnostics(prof, *gs);
  write_solution_files(ctx, ms, prof);
  print_solution(ctx, ms, prof);
  return 0;
}

bool strictly_decreasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (!(v[i] < v[i - 1])) return false;
  return true;
}

int cmd_sweep(Context& ctx) {
  const RunConfig& c = ctx.cfg;
  const SweepResult sw = continuation_sweep(c.sigma_list, c.d, c.p, c.couple_p, match_options(c));

  std::vector<RowDiag> diags(sw.rows.size());
  std::vector<SelfSimilarProfile> profs;
  for (std::size_t k = 0; k < sw.solutions.size(); ++k) {
    const auto& ms = sw.solutions[k];
    SelfSimilarProfile prof = assemble_profile(ms, ProfileOptions{c.h_outer});
    compute_diagnostics(prof, *ms.gs);
    diags[sw.solution_row[k]] = {true, prof.diag};
    profs.push_back(std::move(prof));
  }

  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < sw.rows.size(); ++i) rows.push_back(law_values(sw.rows[i], diags[i]));
  write_csv(ctx, "law_table.csv", kLawColumns, rows);

  // trend checks over the converged rows
  std::vector<double> bdev, rdev, hd;
  bool bounded = true;
  for (std::size_t i = 0; i < sw.rows.size(); ++i) {
    const auto& r = sw.rows[i];
    if (!r.converged) continue;
    bdev.push_back(std::abs(r.b_dev()));
    rdev.push_back(std::abs(r.rho_dev()));
    if (diags[i].have) hd.push_back(diags[i].diag.hdot1_dist);
    bounded = bounded && std::abs(r.gamma) <= 10 * r.gamma_sigma && std::abs(r.theta) <= 10 * r.theta_sigma;
  }
  const std::size_t nconv = bdev.size();

  ojson j = json_base(ctx);
  ojson jr = ojson::array();
  for (std::size_t i = 0; i < sw.rows.size(); ++i) {
    ojson row;
    const auto vals = law_values(sw.rows[i], diags[i]);
    for (std::size_t k = 0; k < kLawColumns.size(); ++k) row[kLawColumns[k]] = vals[k];
    row["message"] = sw.rows[i].message;
    jr.push_back(row);
  }
  j["rows"] = jr;
  ojson tr;
  tr["converged_rows"] = nconv;
  tr["total_rows"] = sw.rows.size();
  tr["b_dev_strictly_decreasing"] = nconv >= 2 && strictly_decreasing(bdev);
  tr["b_dev_final"] = nconv ? bdev.back() : std::nan("");
  tr["rho_dev_decreasing"] = nconv >= 2 && strictly_decreasing(rdev);
  tr["rho_dev_final"] = nconv ? rdev.back() : std::nan("");
  tr["gamma_theta_within_10_scales"] = nconv > 0 && bounded;
  tr["hdot1_distance_decreasing"] = hd.size() >= 2 && strictly_decreasing(hd);
  j["trends"] = tr;
  write_json(ctx, "law_table.json", j);

  if (sw.rows.size() == 1 && sw.solutions.size() == 1) write_solution_files(ctx, sw.solutions[0], profs[0]);

  auto& o = *ctx.out;
  o << "sigma        p          b/b_s-1     rho/rho_s-1  gamma/gamma_s theta/theta_s |F|        status\n";
  for (const auto& r : sw.rows) {
    char buf[256];
    if (r.converged)
      std::snprintf(buf, sizeof buf, "%-12.4g %-10.6g %-11.4e %-12.4e %-13.4f %-13.4f %-10.2e %s\n", r.sigma, r.p,
                    r.b_dev(), r.rho_dev(), r.gamma / r.gamma_sigma, r.theta / r.theta_sigma, r.residual,
                    r.strict_box ? "ok" : "ok (outside strict box)");
    else
      std::snprintf(buf, sizeof buf, "%-12.4g %-10.6g failed: %s\n", r.sigma, r.p, r.message.c_str());
    o << buf;
  }
  if (nconv >= 2)
    o << "trend: |b/b_sigma-1| " << (tr["b_dev_strictly_decreasing"].get<bool>() ? "decreasing" : "NOT decreasing")
      << ", |rho/rho_sigma-1| " << (tr["rho_dev_decreasing"].get<bool>() ? "decreasing" : "NOT decreasing") << ", ";
  else
    o << "trend: needs two converged rows, ";
  o << nconv << "/" << sw.rows.size() << " rows converged\n";
  return nconv > 0 ? 0 : 2;
}

// ---------------------------------------------------------------- verify

int cmd_verify(Context& ctx) {
  VerifyOptions vo;
  vo.perturb_kappa_b = ctx.perturb_kappa_b;
  vo.jobs = ctx.cfg.jobs;
  const auto res = run_all_suites(vo);
  ojson j = json_base(ctx);
  j["perturb_kappa_b"] = ctx.perturb_kappa_b;
  ojson arr = ojson::array();
  bool all = true;
  std::vector<std::string> failed;
  for (const auto& s : res) {
    ojson e;
    e["name"] = s.name;
    e["passed"] = s.passed;
    e["max_residual"] = s.max_residual;
    e["threshold"] = s.threshold;
    e["detail"] = s.detail;
    arr.push_back(e);
    all = all && s.passed;
    if (!s.passed) failed.push_back(s.name);
    *ctx.out << (s.passed ? "PASS " : "FAIL ") << s.name << "  " << s.detail << "  [" << sci(s.seconds, 3) << " s]\n";
  }
  j["suites"] = arr;
  j["passed"] = all;
  j["failed"] = failed;
  write_json(ctx, "verify.json", j);
  if (!all) {
    *ctx.err << "verification failed:";
    for (const auto& f : failed) *ctx.err << " " << f;
    *ctx.err << "\n";
    return 3;
  }
  return 0;
}

// ---------------------------------------------------------------- parsing

std::string find_config_path(const std::vector<std::string>& args) {
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    else if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
  }
  return path;
}

}  // namespace

const std::vector<std::string>& law_table_columns() { return kLawColumns; }

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Context ctx;
  ctx.out = &out;
  ctx.err = &err;
  RunConfig& c = ctx.cfg;

  CLI::App app{"Self-similar blow-up profiles of slightly mass-supercritical NLS"};
  app.require_subcommand(1, 1);
  app.set_help_all_flag("--help-all", "Expand all help");

  std::string config_path, sigma_list;
  std::map<std::string, std::map<std::string, CLI::Option*>> by_sub;  // subcommand -> config key -> option

  auto add = [&](CLI::App* sub, const std::string& key, const std::string& names, auto& var, const std::string& help) {
    by_sub[sub->get_name()][key] = sub->add_option(names, var, help);
  };
  auto common = [&](CLI::App* sub) {
    add(sub, "d", "--d", c.d, "Spatial dimension");
    add(sub, "p", "--p", c.p, "Nonlinearity exponent");
    by_sub[sub->get_name()]["couple-p"] =
        sub->add_flag("--couple-p", c.couple_p, "Use p = 1 + 4/(d - 2 sigma) for each sigma");
    add(sub, "tol-gs", "--tol-gs,--tol", c.tol_gs, "Ground-state shooting tolerance");
    add(sub, "out-dir", "--out-dir", c.out_dir, "Output directory");
    add(sub, "jobs", "--jobs", c.jobs, "Worker threads");
    sub->add_option("--config", config_path, "Flat key = value file; flags override it");
  };
  auto matching = [&](CLI::App* sub) {
    add(sub, "tol-ode", "--tol-ode", c.tol_ode, "Exterior ODE relative tolerance");
    add(sub, "tol-newton", "--tol-newton", c.tol_newton, "Matcher tolerance on the normalized residual");
    add(sub, "tol-picard", "--tol-picard", c.tol_picard, "Interior Picard tolerance");
    add(sub, "r-far", "--r-far", c.r_far, "Far-field radius (0: max(b^-2, 50))");
    add(sub, "box-relax", "--box-relax", c.box_relax, "Multiplier on the parameter boxes");
    add(sub, "max-iter", "--max-iter", c.max_iter, "Newton iteration limit");
    add(sub, "h-outer", "--h-outer", c.h_outer, "Profile grid spacing on [r_K, R_far]");
    add(sub, "sigma-min", "--sigma-min", c.sigma_min, "Smallest supported sigma");
    add(sub, "sigma-max", "--sigma-max", c.sigma_max, "Largest supported sigma");
  };

  auto* gs_cmd = app.add_subcommand("ground-state", "Ground state Q, kappa and N_c");
  common(gs_cmd);
  auto* basis_cmd = app.add_subcommand("basis", "Interior basis A, D, B on [0, r_K]");
  common(basis_cmd);
  add(basis_cmd, "sigma", "--sigma", c.sigma, "sigma (b = b_sigma unless --b is given)");
  add(basis_cmd, "b", "--b", c.b, "Eigenvalue b");
  auto* solve_cmd = app.add_subcommand("solve", "One matched solve and its profile diagnostics");
  common(solve_cmd);
  matching(solve_cmd);
  add(solve_cmd, "sigma", "--sigma", c.sigma, "Supercriticality sigma");
  solve_cmd->add_flag("--dump-trajectory", ctx.dump_trajectory, "Also write the exterior trajectory CSV");
  auto* sweep_cmd = app.add_subcommand("sweep", "Continuation over a descending sigma list");
  common(sweep_cmd);
  matching(sweep_cmd);
  by_sub["sweep"]["sigma-list"] = sweep_cmd->add_option("--sigma-list", sigma_list, "Comma-separated, descending");
  auto* verify_cmd = app.add_subcommand("verify", "Run the invariant suites");
  add(verify_cmd, "out-dir", "--out-dir", c.out_dir, "Output directory");
  add(verify_cmd, "jobs", "--jobs", c.jobs, "Worker threads");
  verify_cmd->add_option("--config", config_path, "Flat key = value file; flags override it");
  verify_cmd->add_option("--perturb-kappa-b", ctx.perturb_kappa_b, "Relative perturbation of kappa_B")
      ->group("");  // hidden test hook

  try {
    // config file first, so parsed flags land on top of it
    const std::string cp = find_config_path(args);
    if (!cp.empty()) {
      ctx.file_keys = parse_kv_text(read_file(cp));
      c = config_from_text(read_file(cp));
    }
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return 1;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }

  CLI::App* sub = app.get_subcommands().front();
  ctx.command = sub->get_name();
  auto given = [&](const std::string& key) {
    if (ctx.file_keys.count(key)) return true;
    auto& m = by_sub[ctx.command];
    auto it = m.find(key);
    return it != m.end() && it->second->count() > 0;
  };

  try {
    if (!sigma_list.empty()) c.sigma_list = parse_double_list(sigma_list);
    if (ctx.command != "verify") {
      std::vector<std::string> need{"d"};
      if (!c.couple_p) need.push_back("p");
      if (ctx.command == "solve") need.push_back("sigma");
      if (ctx.command == "basis" && !given("b")) need.push_back("sigma");
      for (const auto& k : need)
        if (!given(k)) throw UsageError("missing required flag --" + k, sub->help());
    }
    c.validate();
  } catch (const UsageError& e) {
    err << e.usage << "\nerror: " << e.what() << "\n";
    return 1;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }

  try {
    if (ctx.command == "ground-state") return cmd_ground_state(ctx);
    if (ctx.command == "basis") return cmd_basis(ctx);
    if (ctx.command == "solve") return cmd_solve(ctx);
    if (ctx.command == "sweep") return cmd_sweep(ctx);
    return cmd_verify(ctx);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return 2;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

int run_cli(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run_cli(args, std::cout, std::cerr);
}

}  // namespace ssb::cli
