#include "ssb/verify.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

#include "ssb/airy.hpp"
#include "ssb/exterior.hpp"
#include "ssb/farfield.hpp"
#include "ssb/ground_state.hpp"
#include "ssb/interior.hpp"
#include "ssb/matcher.hpp"

namespace ssb {

namespace {

// max |value| / threshold style bookkeeping
struct Worst {
  bool any = false;
  double ratio = 0.0;  // measured / allowed; the suite passes when <= 1
  double value = 0.0;
  double allowed = 0.0;
  std::ostringstream detail;
  void add(const std::string& what, double v, double lim) {
    const double q = std::isfinite(v) ? v / lim : std::numeric_limits<double>::infinity();
    detail << what << "=" << v << " (<= " << lim << "); ";
    if (!any || !(q <= ratio)) {
      any = true;
      ratio = q;
      value = v;
      allowed = lim;
    }
  }
};

SuiteResult finish(const std::string& name, Worst& w, std::chrono::steady_clock::time_point t0) {
  SuiteResult r;
  r.name = name;
  r.passed = w.ratio <= 1.0;
  r.max_residual = w.value;
  r.threshold = w.allowed;
  r.detail = w.detail.str();
  if (r.detail.size() >= 2) r.detail.resize(r.detail.size() - 2);
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

SuiteResult guarded(const std::string& name, const std::function<SuiteResult()>& f) {
  try {
    return f();
  } catch (const std::exception& e) {
    SuiteResult r;
    r.name = name;
    r.passed = false;
    r.max_residual = std::numeric_limits<double>::infinity();
    r.detail = std::string("exception: ") + e.what();
    return r;
  }
}

double sup_vec(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s = std::max(s, std::abs(x));
  return s;
}

}  // namespace

SuiteResult suite_ground_state() {
  return guarded("ground_state", [] {
    const auto t0 = std::chrono::steady_clock::now();
    Worst w;
    for (double p : {3.0, 5.0}) {
      const auto gs = solve_ground_state(1, p, 1e-12);
      double err = 0;
      for (std::size_t i = 0; i < gs.grid.size() && gs.grid[i] <= 20.0; ++i)
        err = std::max(err, std::abs(gs.q[i] - closed_form_soliton_1d(p, gs.grid[i])));
      w.add("sup|Q - Q_exact| p=" + std::to_string(static_cast<int>(p)), err, 1e-8);
      // Q ~ kappa e^{-r}: kappa = ((p+1)/2)^{1/(p-1)} 2^{2/(p-1)}
      const double kap = std::pow((p + 1) / 2, 1 / (p - 1)) * std::pow(2.0, 2 / (p - 1));
      w.add("kappa rel p=" + std::to_string(static_cast<int>(p)), std::abs(gs.kappa / kap - 1), 1e-6);
      if (p == 5) w.add("N_c rel p=5", std::abs(gs.n_c / (std::sqrt(3.0) * M_PI / 4) - 1), 1e-6);
      if (p == 3) w.add("N_c rel p=3", std::abs(gs.n_c / 2.0 - 1), 1e-6);  // int 2 sech^2 r dr = 2
    }
    return finish("ground_state", w, t0);
  });
}

SuiteResult suite_airy() {
  return guarded("airy", [] {
    const auto t0 = std::chrono::steady_clock::now();
    Worst w;
    double we = 0, ie = 0;
    for (int k = 0; k < 1000; ++k) {
      const double s = -40 + 70.0 * k / 999;
      const auto a = airy_eval(s);
      we = std::max(we, std::abs(a.ai * a.bb_d - a.ai_d * a.bb - 1.0));
      ie = std::max(ie, std::abs(a.bb.imag() - M_PI * a.ai));
    }
    w.add("|W(Ai,BB) - 1|", we, 1e-9);
    w.add("|Im BB - pi Ai|", ie, 1e-9);
    const auto z = airy_eval(0);
    w.add("|Ai(0) - series|", std::abs(z.ai - 0.355028053887817239), 1e-10);
    w.add("|Ai'(0) - series|", std::abs(z.ai_d + 0.258819403792806798), 1e-10);
    return finish("airy", w, t0);
  });
}

SuiteResult suite_wkb() {
  return guarded("wkb_basis", [] {
    const auto t0 = std::chrono::steady_clock::now();
    Worst w;
    const double ratio = 8 / M_PI;  // kappa^2/N_c for d=1, p=5
    for (double b : {0.2, 0.35, 0.5}) {
      const FarFieldBasis basis(b, ratio / b * std::exp(-M_PI / b));
      double err = 0;
      for (double r : {2.5 / b, 4 / b, 1 / (b * b), 10 / b, 10 / (b * b), 100 / (b * b)}) {
        if (r < basis.floor_radius()) continue;
        const cplx we = basis.wronskian_exact(r);
        const cplx target(-2 * b * b * basis.sigma() / (b * b * r * r - 4), -b);
        err = std::max({err, std::abs(basis.wronskian(r) - we) / std::abs(we), std::abs(we - target) / std::abs(target)});
      }
      std::ostringstream nm;
      nm << "Wronskian rel b=" << b;
      w.add(nm.str(), err, 1e-8);
    }
    const double b = 0.3;
    const FarFieldBasis basis(b, ratio / b * std::exp(-M_PI / b));
    for (Branch br : {Branch::plus, Branch::minus}) {
      // least-squares slope of log|f| over br in [8, 100]
      double sx = 0, sy = 0, sxx = 0, sxy = 0;
      int n = 0;
      for (int k = 0; k <= 40; ++k) {
        const double s = 8 * std::pow(100.0 / 8, k / 40.0);
        const double x = std::log(s), y = std::log(wkb_residual(basis, s / b, br));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++n;
      }
      const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
      w.add(std::string("|slope + 2| ") + (br == Branch::plus ? "f+" : "f-"), std::abs(slope + 2), 0.3);
    }
    return finish("wkb_basis", w, t0);
  });
}

SuiteResult suite_green() {
  return guarded("green_operators", [] {
    const auto t0 = std::chrono::steady_clock::now();
    Worst w;
    for (auto [d, p] : {std::pair{1, 5.0}, std::pair{3, 3.0}}) {
      const auto gs = solve_ground_state(d, p, 1e-12);
      const auto bs = build_basis(gs, 1.75);
      const std::size_t n = bs.r.size();
      std::vector<std::vector<double>> tests(5, std::vector<double>(n));
      for (std::size_t i = 0; i < n; ++i) {
        const double r = bs.r[i], q = bs.Q[i];
        tests[0][i] = std::pow(q, p);
        tests[1][i] = r * q;
        tests[2][i] = q;
        tests[3][i] = r * r * q;
        tests[4][i] = std::exp(-r * r) * std::cos(r);
      }
      double worst = 0;
      for (const auto& t : tests) {
        const auto hp = green_hplus(bs, t);
        const auto hm = green_hminus(bs, t);
        const auto lp = apply_lplus(bs, hp.v, hp.dv);
        const auto lm = apply_lminus(bs, hm.v, hm.dv);
        double e = 0;
        for (std::size_t i = 0; i < n; ++i) e = std::max({e, std::abs(lp[i] - t[i]), std::abs(lm[i] - t[i])});
        worst = std::max(worst, e / sup_vec(t));
      }
      w.add("L H - I d=" + std::to_string(d), worst, 1e-6);
    }
    return finish("green_operators", w, t0);
  });
}

SuiteResult suite_kappa_b(const VerifyOptions& opt) {
  return guarded("kappa_b_identity", [&] {
    const auto t0 = std::chrono::steady_clock::now();
    Worst w;
    for (auto [d, p] : {std::pair{1, 5.0}, std::pair{3, 3.0}}) {
      const auto gs = solve_ground_state(d, p, 1e-12);
      const auto lc = linearized_constants(gs);
      const double kb = lc.kappa_B * (1 + opt.perturb_kappa_b);
      w.add("|kappa_B 2 kappa/N_c - 1| d=" + std::to_string(d), std::abs(kb * 2 * gs.kappa / gs.n_c - 1), 1e-5);
    }
    return finish("kappa_b_identity", w, t0);
  });
}

SuiteResult suite_wronskian_ad() {
  return guarded("wronskian_AD", [] {
    const auto t0 = std::chrono::steady_clock::now();
    Worst w;
    for (auto [d, p] : {std::pair{1, 5.0}, std::pair{3, 3.0}}) {
      const auto gs = solve_ground_state(d, p, 1e-12);
      const auto bs = build_basis(gs, 1.75);
      double err = 0;
      for (std::size_t i = 1; i < bs.r.size(); ++i)
        err = std::max(err, std::abs((bs.A[i] * bs.Dp[i] - bs.Ap[i] * bs.D[i]) * bs.w[i] - 1));
      w.add("|W(A,D) r^{d-1} - 1| d=" + std::to_string(d), err, 1e-7);
    }
    return finish("wronskian_AD", w, t0);
  });
}

SuiteResult suite_interior_oracle() {
  return guarded("interior_oracle", [] {
    const auto t0 = std::chrono::steady_clock::now();
    Worst w;
    const auto gs = solve_ground_state(1, 5, 1e-12);
    const auto lc = linearized_constants(gs);
    for (double sigma : {1e-2, 1e-3}) {
      const double b = b_sigma(sigma, gs.kappa, gs.n_c);
      const auto bs = build_basis(gs, lc, 1 / std::sqrt(b));
      const auto sol = picard_interior(bs, b, sigma, 0.0);
      const auto rep = shoot_interior_oracle(sol);
      std::ostringstream nm;
      nm << "Picard vs shooting rel sigma=" << sigma;
      w.add(nm.str(), rep.rel_dev_rK, 1e-6);
    }
    return finish("interior_oracle", w, t0);
  });
}

SuiteResult suite_turning_phase() {
  return guarded("turning_phase", [] {
    const auto t0 = std::chrono::steady_clock::now();
    Worst w;
    for (double b : {0.4, 0.2, 0.1, 0.05}) {
      const auto t = turning_point_phase(b);
      std::ostringstream nm;
      nm << "|lhs - rhs|/sqrt(b) b=" << b;
      w.add(nm.str(), std::abs(t.lhs - t.rhs) / std::sqrt(b), 1.0);
    }
    return finish("turning_phase", w, t0);
  });
}

std::vector<SuiteResult> run_all_suites(const VerifyOptions& opt) {
  return {suite_ground_state(), suite_airy(),         suite_wkb(),
          suite_green(),        suite_kappa_b(opt),   suite_wronskian_ad(),
          suite_interior_oracle(), suite_turning_phase()};
}

}  // namespace ssb
