#include "ssb/interior.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Dense>

#include "ssb/errors.hpp"
#include "ssb/hermite.hpp"
#include "ssb/ode.hpp"

namespace ssb {

namespace {

using State2 = ode::Integrator<2>::state_type;
using State4 = ode::Integrator<4>::state_type;

ode::Options basis_options() {
  ode::Options o;
  o.rtol = 1e-13;
  o.atol = 1e-30;
  o.max_step = 0.05;
  return o;
}

// L+ y = 0 written as y'' = -(d-1)/r y' + y - p Q^{p-1} y, Q from the table.
ode::Integrator<2>::Rhs lplus_rhs(const GroundState& gs) {
  const int d = gs.d;
  const double p = gs.p;
  return [&gs, d, p](double r, const State2& y, State2& dy) {
    const double q = gs.value(r);
    dy[0] = y[1];
    dy[1] = (d == 1 ? 0.0 : -(d - 1) / r * y[1]) + y[0] - p * std::pow(q, p - 1) * y[0];
  };
}

double lplus_second(int d, double p, double r, double q, double y, double yd) {
  const double pot = 1 - p * std::pow(q, p - 1);
  if (r == 0) return pot * y / d;
  return -(d - 1) / r * yd + pot * y;
}

// Series start of A at eps: A = 1 + eps^2 (1 - p Q0^{p-1}) / (2d).
State2 a_start(const GroundState& gs, double eps) {
  const double c = (1 - gs.p * std::pow(gs.q0, gs.p - 1)) / gs.d;
  return {1 + 0.5 * c * eps * eps, c * eps};
}

// Fill A, A' at the nodes x_i = i h, i < n, by node-to-node integration.
void tabulate_a(const GroundState& gs, double h, std::size_t n, std::vector<double>& A, std::vector<double>& Ap) {
  A.assign(n, 0.0);
  Ap.assign(n, 0.0);
  A[0] = 1;
  const double eps = std::min(1e-4, 0.1 * h);
  ode::Integrator<2> integ(lplus_rhs(gs), basis_options());
  State2 y = a_start(gs, eps);
  double r = eps;
  for (std::size_t i = 1; i < n; ++i) {
    const double ri = h * static_cast<double>(i);
    y = integ.integrate(r, y, ri);
    r = ri;
    A[i] = y[0];
    Ap[i] = y[1];
  }
}

// Decaying solution of y'' + (d-1)/r y' - y = 0.
std::pair<double, double> decaying_bessel(int d, double r) {
  const double nu = 0.5 * d - 1.0;
  const double s = std::pow(r, -nu);
  return {s * std::cyl_bessel_k(std::abs(nu), r), -s * std::cyl_bessel_k(std::abs(nu + 1.0), r)};
}

void check_size(const LinearizedBasis& basis, const std::vector<double>& f) {
  if (f.size() != basis.r.size()) throw ConfigError("grid function does not match the basis grid");
}

double nl_power(double x, double p) { return std::pow(std::abs(x), p - 1); }

// (Q, Q') at r by a short integration from the nearest table node. The Hermite
// interpolant is only C^2 between nodes, which finite differences on another grid see.
std::pair<double, double> q_local(const GroundState& gs, double r) {
  if (r == 0) return {gs.q0, 0.0};
  if (r >= gs.r_max()) return gs.eval(r);
  std::size_t j = static_cast<std::size_t>(std::llround(r / gs.h));
  if (j == 0) j = 1;
  const double rj = gs.grid[j];
  if (r == rj) return {gs.q[j], gs.qp[j]};
  const int d = gs.d;
  const double p = gs.p;
  ode::Options o;
  o.rtol = 1e-15;
  o.atol = 1e-300;
  ode::Integrator<2> integ(
      [d, p](double x, const State2& y, State2& dy) {
        dy[0] = y[1];
        dy[1] = (d == 1 ? 0.0 : -(d - 1) / x * y[1]) + y[0] - std::pow(std::abs(y[0]), p - 1) * y[0];
      },
      o);
  const State2 y = integ.integrate(rj, State2{gs.q[j], gs.qp[j]}, r);
  return {y[0], y[1]};
}

}  // namespace

LinearizedConstants linearized_constants(const GroundState& gs) {
  LinearizedConstants lc;
  lc.d = gs.d;
  lc.p = gs.p;
  lc.h = gs.h;
  if (gs.r_max() < lc.fit_hi) throw ConfigError("ground-state table must reach r = 20 for the basis constants");
  const std::size_t n = static_cast<std::size_t>(std::llround(lc.fit_hi / lc.h)) + 1;
  const double h = lc.h;
  const int d = gs.d;

  tabulate_a(gs, h, n, lc.A, lc.Ap);

  // D: inward from the decaying Bessel solution at r = 20, then normalized by the Wronskian.
  lc.D.assign(n, std::nan(""));
  lc.Dp.assign(n, std::nan(""));
  const std::size_t stop = d == 1 ? 0 : static_cast<std::size_t>(std::llround(0.5 / h));
  lc.d_start = h * static_cast<double>(stop);
  {
    ode::Integrator<2> integ(lplus_rhs(gs), basis_options());
    const auto [k, kd] = decaying_bessel(d, lc.fit_hi);
    State2 y{k, kd};
    double r = lc.fit_hi;
    lc.D[n - 1] = y[0];
    lc.Dp[n - 1] = y[1];
    for (std::size_t i = n - 1; i-- > stop;) {
      const double ri = h * static_cast<double>(i);
      y = integ.integrate(r, y, ri);
      r = ri;
      lc.D[i] = y[0];
      lc.Dp[i] = y[1];
    }
    const std::size_t iw = static_cast<std::size_t>(std::llround(2.0 / h));
    const double rw = h * static_cast<double>(iw);
    const double W = (lc.A[iw] * lc.Dp[iw] - lc.Ap[iw] * lc.D[iw]) * std::pow(rw, d - 1);
    for (std::size_t i = stop; i < n; ++i) {
      lc.D[i] /= W;
      lc.Dp[i] /= W;
    }
  }

  // B = Q int_0^r m / (Q^2 s^{d-1}) ds, m = int_0^s Q^2 t^{d-1} dt.
  const grid::Uniform g{0.0, h, n};
  std::vector<double> q2w(n), k(n), r(n);
  for (std::size_t i = 0; i < n; ++i) {
    r[i] = h * static_cast<double>(i);
    q2w[i] = gs.q[i] * gs.q[i] * std::pow(r[i], d - 1);
  }
  const auto m = grid::cumulative(g, q2w);
  for (std::size_t i = 0; i < n; ++i) k[i] = i == 0 ? 0.0 : m[i] / q2w[i];
  const auto kint = grid::cumulative(g, k);
  lc.B.resize(n);
  for (std::size_t i = 0; i < n; ++i) lc.B[i] = gs.q[i] * kint[i];

  std::vector<double> ya(n), yb(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double s = std::pow(r[i], 0.5 * (d - 1)) * std::exp(-r[i]);
    ya[i] = lc.A[i] * s;
    yb[i] = lc.B[i] * s;
  }
  lc.fit_A = fit_tail(r, ya, d, lc.fit_lo, lc.fit_hi);
  lc.fit_B = fit_tail(r, yb, d, lc.fit_lo, lc.fit_hi);
  lc.kappa_A = lc.fit_A.kappa;
  lc.kappa_B = lc.fit_B.kappa;
  if (lc.kappa_A == 0) throw NumericalError("kappa_A vanished");
  if (!(lc.kappa_B > 0)) throw NumericalError("kappa_B is not positive");
  return lc;
}

std::size_t default_intervals(double r_K) {
  const double step = std::min(0.01, r_K / 400);
  return 2 * static_cast<std::size_t>(std::ceil(r_K / (2 * step)));
}

LinearizedBasis build_basis(const GroundState& gs, const LinearizedConstants& lc, double r_K, std::size_t intervals) {
  if (!(r_K > 0)) throw ConfigError("r_K must be positive");
  if (r_K > lc.fit_hi - 1) throw ConfigError("r_K beyond the tabulated basis (b too small)");
  if (lc.d != gs.d || lc.p != gs.p) throw ConfigError("basis constants belong to another ground state");
  if (intervals == 0) intervals = default_intervals(r_K);
  if (intervals % 2) ++intervals;
  LinearizedBasis bs;
  bs.gs = &gs;
  bs.d = gs.d;
  bs.p = gs.p;
  bs.r_K = r_K;
  bs.g = grid::make_uniform(0.0, r_K, intervals);
  bs.kappa_A = lc.kappa_A;
  bs.kappa_B = lc.kappa_B;
  const std::size_t n = bs.g.n;
  const int d = gs.d;
  const double p = gs.p;
  bs.r = bs.g.nodes();
  bs.r.back() = r_K;
  bs.Q.resize(n);
  bs.Qp.resize(n);
  bs.w.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto [q, qd] = q_local(gs, bs.r[i]);
    bs.Q[i] = q;
    bs.Qp[i] = qd;
    bs.w[i] = d == 1 ? 1.0 : std::pow(bs.r[i], d - 1);
  }

  tabulate_a(gs, bs.g.h, n, bs.A, bs.Ap);

  // D(r_K) from the cached table, then inward node by node.
  {
    const double hT = lc.h;
    const std::size_t i = std::min(static_cast<std::size_t>(r_K / hT), lc.D.size() - 2);
    auto node = [&](std::size_t j) {
      const double rj = hT * static_cast<double>(j);
      return HermiteNode{lc.D[j], lc.Dp[j], lplus_second(d, p, rj, gs.q[j], lc.D[j], lc.Dp[j])};
    };
    const auto [dk, dkd] = hermite5(node(i), node(i + 1), hT, (r_K - hT * static_cast<double>(i)) / hT);
    bs.D.assign(n, 0.0);
    bs.Dp.assign(n, 0.0);
    bs.D[n - 1] = dk;
    bs.Dp[n - 1] = dkd;
    ode::Integrator<2> integ(lplus_rhs(gs), basis_options());
    State2 y{dk, dkd};
    double r = r_K;
    const std::size_t stop = d == 1 ? 0 : 1;
    for (std::size_t j = n - 1; j-- > stop;) {
      y = integ.integrate(r, y, bs.r[j]);
      r = bs.r[j];
      bs.D[j] = y[0];
      bs.Dp[j] = y[1];
    }
    bs.Dw.resize(n);
    for (std::size_t j = 0; j < n; ++j) bs.Dw[j] = bs.D[j] * bs.w[j];
    if (d > 1) {
      // D is singular at the origin; D r^{d-1} -> 0 there.
      bs.D[0] = std::nan("");
      bs.Dp[0] = std::nan("");
      bs.Dw[0] = 0.0;
    }
  }

  // B = -H-(Q) and its derivative.
  const GridFunction hb = green_hminus(bs, bs.Q);
  bs.B.resize(n);
  bs.Bp.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    bs.B[i] = -hb.v[i];
    bs.Bp[i] = -hb.dv[i];
  }
  return bs;
}

LinearizedBasis build_basis(const GroundState& gs, double r_K) {
  const LinearizedConstants lc = linearized_constants(gs);
  return build_basis(gs, lc, r_K);
}

namespace {

// int_0^{r_i} f(s) s^{d-1} ds. Panels on f s^{d-1} lose relative accuracy near the
// origin, where the integral is O(r^d); the first nodes integrate the weight exactly
// against a degree-7 interpolant of f.
std::vector<double> weighted_cumulative(const grid::Uniform& g, const std::vector<double>& f, int d) {
  const std::size_t n = f.size();
  std::vector<double> fw(n);
  for (std::size_t i = 0; i < n; ++i) fw[i] = f[i] * std::pow(g.x(i), d - 1);
  const auto full = grid::cumulative(g, fw);
  auto out = full;
  constexpr int S = 8;
  if (d == 1 || n < static_cast<std::size_t>(S)) return out;
  const int m = d - 1;
  Eigen::Matrix<double, S, S> V;
  for (int i = 0; i < S; ++i)
    for (int j = 0; j < S; ++j) V(i, j) = std::pow(static_cast<double>(i), j);
  const Eigen::Matrix<double, S, 1> c = V.partialPivLu().solve(Eigen::Map<const Eigen::Matrix<double, S, 1>>(f.data()));
  constexpr int last = S / 2;
  for (int i = 1; i <= last; ++i) {
    double acc = 0;
    for (int j = 0; j < S; ++j) acc += c(j) * std::pow(static_cast<double>(i), j + m + 1) / (j + m + 1);
    out[i] = acc * std::pow(g.h, m + 1);
  }
  const double shift = out[last] - full[last];
  for (std::size_t i = last + 1; i < n; ++i) out[i] += shift;
  return out;
}

std::vector<double> apply_linear(const LinearizedBasis& bs, const std::vector<double>& f, const std::vector<double>& fd,
                                 const std::vector<double>& f2, double coef) {
  const int d = bs.d;
  std::vector<double> out(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double r = bs.r[i];
    const double lap = r == 0 ? d * f2[i] : f2[i] + (d - 1) / r * fd[i];
    out[i] = -lap + f[i] - coef * nl_power(bs.Q[i], bs.p) * f[i];
  }
  return out;
}

}  // namespace

std::vector<double> apply_lplus(const LinearizedBasis& basis, const std::vector<double>& f) {
  check_size(basis, f);
  const auto fd = grid::derivative_mirrored(basis.g, f, 1, 1);
  const auto f2 = grid::derivative_mirrored(basis.g, f, 2, 1);
  return apply_linear(basis, f, fd, f2, basis.p);
}

std::vector<double> apply_lminus(const LinearizedBasis& basis, const std::vector<double>& f) {
  check_size(basis, f);
  const auto fd = grid::derivative_mirrored(basis.g, f, 1, 1);
  const auto f2 = grid::derivative_mirrored(basis.g, f, 2, 1);
  return apply_linear(basis, f, fd, f2, 1.0);
}

std::vector<double> apply_lplus(const LinearizedBasis& basis, const std::vector<double>& f,
                                const std::vector<double>& fd) {
  check_size(basis, f);
  check_size(basis, fd);
  const auto f2 = grid::derivative(basis.g, fd, 1, 11);
  return apply_linear(basis, f, fd, f2, basis.p);
}

std::vector<double> apply_lminus(const LinearizedBasis& basis, const std::vector<double>& f,
                                 const std::vector<double>& fd) {
  check_size(basis, f);
  check_size(basis, fd);
  const auto f2 = grid::derivative(basis.g, fd, 1, 11);
  return apply_linear(basis, f, fd, f2, 1.0);
}

GridFunction green_hplus(const LinearizedBasis& bs, const std::vector<double>& f) {
  check_size(bs, f);
  const std::size_t n = f.size();
  std::vector<double> fdw(n), fa(n);
  for (std::size_t i = 0; i < n; ++i) {
    fdw[i] = f[i] * bs.Dw[i];
    fa[i] = f[i] * bs.A[i];
  }
  const auto I1 = grid::cumulative_from_end(bs.g, fdw);
  const auto I2 = weighted_cumulative(bs.g, fa, bs.d);
  GridFunction out;
  out.v.resize(n);
  out.dv.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (i == 0 && bs.d > 1) {
      out.v[i] = -bs.A[0] * I1[0];
      out.dv[i] = 0.0;
      continue;
    }
    out.v[i] = -(bs.A[i] * I1[i] + bs.D[i] * I2[i]);
    out.dv[i] = -(bs.Ap[i] * I1[i] + bs.Dp[i] * I2[i]);
  }
  return out;
}

GridFunction green_hminus(const LinearizedBasis& bs, const std::vector<double>& f) {
  check_size(bs, f);
  const std::size_t n = f.size();
  std::vector<double> fq(n), k(n);
  for (std::size_t i = 0; i < n; ++i) fq[i] = f[i] * bs.Q[i];
  const auto M = weighted_cumulative(bs.g, fq, bs.d);
  for (std::size_t i = 0; i < n; ++i) k[i] = i == 0 ? 0.0 : M[i] / (bs.Q[i] * bs.Q[i] * bs.w[i]);
  const auto K = grid::cumulative(bs.g, k);
  GridFunction out;
  out.v.resize(n);
  out.dv.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.v[i] = -bs.Q[i] * K[i];
    out.dv[i] = -(bs.Qp[i] * K[i] + bs.Q[i] * k[i]);
  }
  return out;
}

double norm_plus(const LinearizedBasis& basis, const std::vector<double>& f) {
  check_size(basis, f);
  double s = 0;
  for (std::size_t i = 0; i < f.size(); ++i) s = std::max(s, std::abs(f[i] / basis.Q[i]));
  return s;
}

double norm_minus(const LinearizedBasis& basis, const std::vector<double>& f) {
  check_size(basis, f);
  double s = 0;
  for (std::size_t i = 0; i < f.size(); ++i)
    s = std::max(s, std::abs(std::pow(1 + basis.r[i], basis.d - 1) * basis.Q[i] * f[i]));
  return s;
}

InteriorSolution picard_interior(const LinearizedBasis& bs, double b, double sigma, double gamma,
                                 const InteriorOptions& opt) {
  if (!(b >= 0) || !std::isfinite(sigma) || !std::isfinite(gamma)) throw ConfigError("picard_interior: bad parameters");
  const std::size_t n = bs.r.size();
  const double p = bs.p;
  InteriorSolution sol;
  sol.b = b;
  sol.sigma = sigma;
  sol.gamma = gamma;
  sol.p = p;
  sol.d = bs.d;
  sol.basis = &bs;
  std::vector<double> fp(n, 0.0), fpd(n, 0.0), fm(n, 0.0), fmd(n, 0.0);
  std::vector<double> Fp(n), Fm(n);
  const double bsg = b * sigma;
  const double scale = std::max(1.0, bs.Q[0]);
  for (int it = 0; it < opt.max_iter; ++it) {
    for (std::size_t i = 0; i < n; ++i) {
      const double q = bs.Q[i];
      const double re = q + gamma * bs.A[i] + fp[i];
      const double im = bsg * bs.B[i] + fm[i];
      const double a2 = re * re + im * im;
      const double amp = std::pow(a2, 0.5 * (p - 1));
      const double qp1 = nl_power(q, p);
      const double nre = amp * re - (q * qp1 + p * qp1 * (gamma * bs.A[i] + fp[i]));
      const double nim = amp * im - qp1 * im;
      const double rr = 0.25 * b * b * bs.r[i] * bs.r[i];
      Fp[i] = rr * re + bsg * im + nre;
      Fm[i] = -bsg * (gamma * bs.A[i] + fp[i]) + rr * im + nim;
    }
    const GridFunction hp = green_hplus(bs, Fp);
    const GridFunction hm = green_hminus(bs, Fm);
    double delta = 0;
    for (std::size_t i = 0; i < n; ++i)
      delta = std::max({delta, std::abs(hp.v[i] - fp[i]), std::abs(hm.v[i] - fm[i])});
    fp = hp.v;
    fpd = hp.dv;
    fm = hm.v;
    fmd = hm.dv;
    sol.deltas.push_back(delta);
    if (!std::isfinite(delta)) throw ContractionError("interior iteration produced non-finite values");
    if (delta <= opt.tol * scale) {
      sol.converged = true;
      break;
    }
    const std::size_t k = sol.deltas.size();
    if (k >= 4 && delta >= sol.deltas[k - 2] && delta > 1e3 * opt.tol * scale) {
      std::ostringstream os;
      os << "interior iteration does not contract (delta ratio " << delta / sol.deltas[k - 2] << " at step " << k
         << ")";
      throw ContractionError(os.str());
    }
    if (k >= 4 && delta >= 0.9 * sol.deltas[k - 2] && delta <= 1e3 * opt.tol * scale) {
      // rounding plateau just above the tolerance
      sol.converged = true;
      break;
    }
  }
  if (!sol.converged) {
    std::ostringstream os;
    os << "interior iteration not converged after " << opt.max_iter << " steps (delta " << sol.deltas.back() << ")";
    throw ContractionError(os.str());
  }
  sol.phi_p = fp;
  sol.phi_pd = fpd;
  sol.phi_m = fm;
  sol.phi_md = fmd;
  sol.P.resize(n);
  sol.Pd.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    sol.P[i] = {bs.Q[i] + gamma * bs.A[i] + fp[i], bsg * bs.B[i] + fm[i]};
    sol.Pd[i] = {bs.Qp[i] + gamma * bs.Ap[i] + fpd[i], bsg * bs.Bp[i] + fmd[i]};
  }
  return sol;
}

double InteriorSolution::residual_sup() const {
  const LinearizedBasis& bs = *basis;
  const std::size_t n = P.size();
  std::vector<double> dre(n), dim(n);
  for (std::size_t i = 0; i < n; ++i) {
    dre[i] = Pd[i].real();
    dim[i] = Pd[i].imag();
  }
  const auto pre = grid::derivative_mirrored(bs.g, dre, 1, -1);
  const auto pim = grid::derivative_mirrored(bs.g, dim, 1, -1);
  double worst = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = bs.r[i];
    const cplx p2(pre[i], pim[i]);
    const cplx lap = r == 0 ? static_cast<double>(d) * p2 : p2 + static_cast<double>(d - 1) / r * Pd[i];
    const cplx res = lap + cplx(0.25 * b * b * r * r - 1, -b * sigma) * P[i] + std::pow(std::abs(P[i]), p - 1) * P[i];
    worst = std::max(worst, std::abs(res));
  }
  return worst;
}

BoundaryState interior_at_matchpoint(const InteriorSolution& sol) {
  if (!sol.converged || sol.P.empty()) throw NumericalError("interior solution not converged");
  return {sol.basis->r_K, sol.P.back(), sol.Pd.back()};
}

namespace {

ode::Integrator<4>::Rhs p_rhs(double b, double sigma, double p, int d) {
  return [=](double r, const State4& y, State4& dy) {
    const cplx P(y[0], y[1]);
    const cplx Pd(y[2], y[3]);
    const cplx pp = -static_cast<double>(d - 1) / r * Pd - cplx(0.25 * b * b * r * r - 1, -b * sigma) * P -
                    std::pow(std::abs(P), p - 1) * P;
    dy = {y[2], y[3], pp.real(), pp.imag()};
  };
}

State4 p_start(double b, double sigma, double p, int d, cplx P0, double eps) {
  const cplx c = ((1.0 + cplx(0, b * sigma)) * P0 - std::pow(std::abs(P0), p - 1) * P0) / static_cast<double>(d);
  const cplx v = P0 + 0.5 * eps * eps * c;
  const cplx dv = eps * c;
  return {v.real(), v.imag(), dv.real(), dv.imag()};
}

}  // namespace

BoundaryState shoot_interior(double b, double sigma, double p, int d, cplx P0, double r_end, double rtol) {
  if (!(r_end > 0)) throw ConfigError("shoot_interior: r_end must be positive");
  ode::Options o;
  o.rtol = rtol;
  o.atol = 1e-30;
  o.max_step = 0.05;
  o.guard = 1e6 * std::max(1.0, std::abs(P0));
  ode::Integrator<4> integ(p_rhs(b, sigma, p, d), o);
  const double eps = 1e-5;
  const State4 y = integ.integrate(eps, p_start(b, sigma, p, d, P0, eps), r_end);
  return {r_end, {y[0], y[1]}, {y[2], y[3]}};
}

OracleReport shoot_interior_oracle(const InteriorSolution& sol, double rtol) {
  const LinearizedBasis& bs = *sol.basis;
  const std::size_t n = bs.r.size();
  const std::size_t half = (n - 1) / 2;
  const double rh = bs.r[half];
  const cplx target = sol.P[half];
  auto F = [&](const Eigen::Vector2d& x) {
    const BoundaryState s = shoot_interior(sol.b, sol.sigma, sol.p, sol.d, {x(0), x(1)}, rh, rtol);
    const cplx e = s.P - target;
    return Eigen::Vector2d(e.real(), e.imag());
  };
  Eigen::Vector2d x(sol.P[0].real(), sol.P[0].imag());
  OracleReport rep;
  const double scale = std::abs(target);
  for (int it = 0; it < 30; ++it) {
    const Eigen::Vector2d f = F(x);
    rep.newton_iterations = it;
    if (f.norm() <= 1e-14 * scale) break;
    Eigen::Matrix2d J;
    const double step = 1e-7 * std::max(1.0, std::abs(sol.P[0]));
    for (int k = 0; k < 2; ++k) {
      Eigen::Vector2d e = Eigen::Vector2d::Zero();
      e(k) = step;
      J.col(k) = (F(x + e) - F(x - e)) / (2 * step);
    }
    const Eigen::Vector2d dx = J.partialPivLu().solve(-f);
    x += dx;
    if (dx.norm() <= 1e-15 * x.norm()) break;
  }
  rep.P0 = {x(0), x(1)};

  // Compare node by node on [r_K/2, r_K].
  ode::Options o;
  o.rtol = rtol;
  o.atol = 1e-30;
  o.max_step = 0.05;
  ode::Integrator<4> integ(p_rhs(sol.b, sol.sigma, sol.p, sol.d), o);
  const double eps = 1e-5;
  State4 y = integ.integrate(eps, p_start(sol.b, sol.sigma, sol.p, sol.d, rep.P0, eps), rh);
  double supP = 0;
  for (const auto& v : sol.P) supP = std::max(supP, std::abs(v));
  double r = rh;
  for (std::size_t i = half; i < n; ++i) {
    if (i > half) {
      y = integ.integrate(r, y, bs.r[i]);
      r = bs.r[i];
    }
    rep.max_dev_half = std::max(rep.max_dev_half, std::abs(cplx(y[0], y[1]) - sol.P[i]) / supP);
  }
  rep.shot = {bs.r_K, {y[0], y[1]}, {y[2], y[3]}};
  rep.picard = interior_at_matchpoint(sol);
  rep.rel_dev_rK = std::max(std::abs(rep.shot.P - rep.picard.P) / std::abs(rep.picard.P),
                            std::abs(rep.shot.Pd - rep.picard.Pd) / std::abs(rep.picard.Pd));
  return rep;
}

}  // namespace ssb
