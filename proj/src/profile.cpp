#include "ssb/profile.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>

#include <Eigen/Dense>

#include "ssb/errors.hpp"

namespace ssb {

namespace {

std::vector<cplx> derivative_c(const grid::Uniform& g, const std::vector<cplx>& f, bool mirrored_odd) {
  std::vector<double> re(f.size()), im(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    re[i] = f[i].real();
    im[i] = f[i].imag();
  }
  const auto dre = mirrored_odd ? grid::derivative_mirrored(g, re, 1, -1) : grid::derivative(g, re, 1, 11);
  const auto dim = mirrored_odd ? grid::derivative_mirrored(g, im, 1, -1) : grid::derivative(g, im, 1, 11);
  std::vector<cplx> out(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) out[i] = {dre[i], dim[i]};
  return out;
}

grid::Quadrature integrate_segment(const ProfileSegment& s, int d, const std::function<double(std::size_t)>& f) {
  std::vector<double> v(s.r.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = f(i) * std::pow(s.r[i], d - 1);
  return grid::integrate(s.g, v);
}

// log y = c + s log r + a r^{-2} by least squares over nodes in [lo, hi]; returns s.
// The r^{-2} term absorbs the leading correction, which is still large at r ~ b^{-3/2}.
double loglog_slope(const ProfileSegment& s, double lo, double hi, const std::function<double(std::size_t)>& y) {
  std::vector<std::array<double, 4>> rows;
  for (std::size_t i = 0; i < s.r.size(); i += 5) {
    if (s.r[i] < lo || s.r[i] > hi) continue;
    const double v = y(i);
    if (!(v > 0)) continue;
    rows.push_back({1.0, std::log(s.r[i]), 1 / (s.r[i] * s.r[i]), std::log(v)});
  }
  if (rows.size() < 6) return std::nan("");
  Eigen::MatrixXd M(rows.size(), 3);
  Eigen::VectorXd z(rows.size());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    M.row(static_cast<Eigen::Index>(k)) << rows[k][0], rows[k][1], rows[k][2];
    z(static_cast<Eigen::Index>(k)) = rows[k][3];
  }
  const Eigen::Vector3d c = M.colPivHouseholderQr().solve(z);
  return c(1);
}

}  // namespace

double sphere_measure(int d) {
  if (d < 1) throw DomainError("sphere_measure: d must be >= 1");
  return 2 * std::pow(M_PI, d / 2.0) / std::tgamma(d / 2.0);
}

void fill_psi(ProfileSegment& s, double b) {
  const std::size_t n = s.r.size();
  s.Psi.resize(n);
  s.Psid.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double r = s.r[i];
    const cplx e = std::polar(1.0, -b * r * r / 4);
    s.Psi[i] = e * s.P[i];
    s.Psid[i] = e * (s.Pd[i] - cplx(0, b * r / 2) * s.P[i]);
  }
}

ProfileSegment make_segment(const grid::Uniform& g, std::vector<cplx> P, std::vector<cplx> Pd, double b) {
  if (P.size() != g.n || Pd.size() != g.n) throw ConfigError("make_segment: size mismatch");
  ProfileSegment s;
  s.g = g;
  s.r = g.nodes();
  s.P = std::move(P);
  s.Pd = std::move(Pd);
  fill_psi(s, b);
  return s;
}

SelfSimilarProfile assemble_profile(const MatchedSolution& ms, const ProfileOptions& opt) {
  if (!ms.converged || !ms.basis) throw ConfigError("assemble_profile needs a converged matched solution");
  if (!(opt.h_outer > 0)) throw ConfigError("profile spacing must be positive");
  SelfSimilarProfile prof;
  prof.d = ms.d;
  prof.p = ms.p;
  prof.b = ms.params.b;
  prof.sigma = ms.sigma;
  prof.rho = ms.params.rho;
  prof.r_K = ms.layout.r_K;

  prof.inner = make_segment(ms.basis->g, ms.interior.P, ms.interior.Pd, prof.b);

  const double R = ms.layout.R_far;
  const auto nint = static_cast<std::size_t>(std::ceil((R - prof.r_K) / opt.h_outer));
  const grid::Uniform go = grid::make_uniform(prof.r_K, R, std::max<std::size_t>(nint, 16));
  const cplx rot = std::polar(1.0, ms.params.theta + ms.theta_ext);
  std::vector<cplx> P(go.n), Pd(go.n);
  for (std::size_t i = 0; i < go.n; ++i) {
    const double r = i + 1 == go.n ? R : go.x(i);
    const auto [v, dv] = ms.exterior.P(r);
    P[i] = rot * v;
    Pd[i] = rot * dv;
  }
  prof.outer = make_segment(go, std::move(P), std::move(Pd), prof.b);
  compute_diagnostics(prof, *ms.gs);
  return prof;
}

SelfSimilarProfile rotate(const SelfSimilarProfile& prof, double alpha) {
  SelfSimilarProfile out = prof;
  const cplx e = std::polar(1.0, alpha);
  for (ProfileSegment* s : {&out.inner, &out.outer}) {
    for (auto& v : s->P) v *= e;
    for (auto& v : s->Pd) v *= e;
    for (auto& v : s->Psi) v *= e;
    for (auto& v : s->Psid) v *= e;
  }
  return out;
}

EnergyResult energy(const SelfSimilarProfile& prof) {
  const int d = prof.d;
  const double p = prof.p;
  const double Sd = sphere_measure(d);
  EnergyResult out;
  double qerr = 0;
  for (const ProfileSegment* s : {&prof.inner, &prof.outer}) {
    const auto k = integrate_segment(*s, d, [&](std::size_t i) { return 0.5 * std::norm(s->Psid[i]); });
    const auto v = integrate_segment(*s, d, [&](std::size_t i) { return std::pow(std::abs(s->Psi[i]), p + 1) / (p + 1); });
    out.kinetic += Sd * k.value;
    out.potential += Sd * v.value;
    qerr += Sd * (k.error + v.error);
  }
  // tails beyond R_far
  const double R = prof.R_far();
  const double sg = prof.sigma;
  const double A = std::abs(prof.outer.Psi.back()) * std::pow(R, d / 2.0 - sg);
  const double C = std::abs(prof.outer.Psid.back()) * std::pow(R, d / 2.0 + 1 - sg);
  out.tail_kinetic = Sd * 0.5 * C * C * std::pow(R, -2 + 2 * sg) / (2 - 2 * sg);
  const double e = (-d / 2.0 + sg) * (p + 1) + d - 1;
  if (e < -1) {
    out.tail_potential = Sd * std::pow(A, p + 1) / (p + 1) * std::pow(R, e + 1) / (-e - 1);
  } else {
    out.tail_potential = std::numeric_limits<double>::infinity();
  }
  out.kinetic += out.tail_kinetic;
  out.potential += out.tail_potential;
  out.energy = out.kinetic - out.potential;
  const double tails = std::abs(out.tail_kinetic) + std::abs(out.tail_potential);
  out.error = qerr + tails;
  out.inconclusive = !(tails <= 0.1 * std::abs(out.kinetic)) && out.kinetic != 0;
  if (prof.outer.Psi.back() == cplx(0) && prof.outer.Psid.back() == cplx(0)) out.inconclusive = false;
  return out;
}

DistanceResult hdot1_distance(const SelfSimilarProfile& prof, const GroundState& gs) {
  const int d = prof.d;
  double a = 0, q = 0, err = 0;
  cplx c = 0;
  for (const ProfileSegment* s : {&prof.inner, &prof.outer}) {
    std::vector<double> qd(s->r.size());
    for (std::size_t i = 0; i < qd.size(); ++i) qd[i] = gs.eval(s->r[i]).second;
    const auto ia = integrate_segment(*s, d, [&](std::size_t i) { return std::norm(s->Psid[i]); });
    const auto iq = integrate_segment(*s, d, [&](std::size_t i) { return qd[i] * qd[i]; });
    const auto cr = integrate_segment(*s, d, [&](std::size_t i) { return s->Psid[i].real() * qd[i]; });
    const auto ci = integrate_segment(*s, d, [&](std::size_t i) { return s->Psid[i].imag() * qd[i]; });
    a += ia.value;
    q += iq.value;
    c += cplx(cr.value, ci.value);
    err += ia.error + iq.error + 2 * (cr.error + ci.error);
  }
  // |Psi'|^2 beyond R_far; Q' is negligible there
  const double R = prof.R_far();
  const double C = std::abs(prof.outer.Psid.back()) * std::pow(R, d / 2.0 + 1 - prof.sigma);
  const double tail = C * C * std::pow(R, -2 + 2 * prof.sigma) / (2 - 2 * prof.sigma);
  a += tail;
  err += tail;
  const double Sd = sphere_measure(d);
  const double sq = Sd * std::max(0.0, a + q - 2 * std::abs(c));
  DistanceResult out;
  out.value = std::sqrt(sq);
  // d sqrt(x) = dx / (2 sqrt x); bounded by sqrt(dx) near zero
  const double dx = Sd * err;
  out.error = out.value > 0 ? std::min(dx / (2 * out.value), std::sqrt(dx)) : std::sqrt(dx);
  return out;
}

TailResult tail_amplitude(const SelfSimilarProfile& prof) {
  const auto& s = prof.outer;
  const double R = prof.R_far();
  const double ex = prof.d / 2.0 - prof.sigma;
  std::array<double, 3> t{}, y{};
  const std::array<double, 3> target{R, R / std::sqrt(2.0), R / 2};
  for (int k = 0; k < 3; ++k) {
    if (target[k] < s.r.front()) throw ConfigError("tail_amplitude: R_far too small for the extrapolation radii");
    const auto i = static_cast<std::size_t>(std::llround((target[k] - s.g.x0) / s.g.h));
    const std::size_t j = std::min(i, s.r.size() - 1);
    const double r = s.r[j];
    t[k] = 1 / (r * r);
    y[k] = std::pow(r, ex) * std::abs(s.Psi[j]);
  }
  // quadratic in t = r^-2 through the three points, evaluated at t = 0
  double v = 0;
  for (int k = 0; k < 3; ++k) {
    double w = 1;
    for (int m = 0; m < 3; ++m)
      if (m != k) w *= (0 - t[m]) / (t[k] - t[m]);
    v += w * y[k];
  }
  TailResult out;
  out.value = v;
  for (double yk : y) out.spread = std::max(out.spread, v != 0 ? std::abs(yk - v) / std::abs(v) : 0.0);
  out.inconclusive = out.spread > 0.05;
  return out;
}

double equation_residual(const SelfSimilarProfile& prof) {
  const int d = prof.d;
  const double b = prof.b, p = prof.p;
  const double c = d / 2.0 - prof.sigma;
  double worst = 0;
  for (const ProfileSegment* s : {&prof.inner, &prof.outer}) {
    const bool at_origin = s->r.front() == 0;
    const auto psi2 = derivative_c(s->g, s->Psid, at_origin);
    // one-sided end stencils amplify the dense-output noise, so sample away from them
    const std::size_t edge = 5;
    const std::size_t i0 = at_origin ? 0 : edge;
    for (std::size_t i = i0; i + edge < s->r.size(); ++i) {
      const double r = s->r[i];
      const cplx u = s->Psi[i], du = s->Psid[i];
      const cplx lap = r == 0 ? cplx(d) * psi2[i] : psi2[i] + (d - 1) / r * du;
      const cplx nl = std::pow(std::abs(u), p - 1) * u;
      const cplx res = lap - u + cplx(0, b) * (c * u + r * du) + nl;
      const double scale = std::abs(psi2[i]) + (r == 0 ? 0 : (d - 1) / r * std::abs(du)) + std::abs(u) +
                           b * (c * std::abs(u) + r * std::abs(du)) + std::abs(nl);
      if (scale > 0) worst = std::max(worst, std::abs(res) / scale);
    }
  }
  return worst;
}

void compute_diagnostics(SelfSimilarProfile& prof, const GroundState& gs) {
  auto& dg = prof.diag;
  const auto E = energy(prof);
  dg.energy = E.energy;
  dg.energy_error = E.error;
  dg.kinetic = E.kinetic;
  dg.potential = E.potential;
  dg.tail_kinetic = E.tail_kinetic;
  dg.tail_potential = E.tail_potential;
  dg.energy_inconclusive = E.inconclusive;
  const auto H = hdot1_distance(prof, gs);
  dg.hdot1_dist = H.value;
  dg.hdot1_error = H.error;
  const double R = prof.R_far();
  if (prof.outer.r.front() <= R / 2) {
    const auto T = tail_amplitude(prof);
    dg.tail_amp = T.value;
    dg.tail_spread = T.spread;
    dg.tail_inconclusive = T.inconclusive;
  } else {
    dg.tail_inconclusive = true;
  }
  const auto& o = prof.outer;
  // keep the window clear of the turning point at 2/b
  const double lo = std::max(R / 4, 4 / prof.b);
  dg.dpsi_slope = loglog_slope(o, lo, R, [&](std::size_t i) { return std::abs(o.Psid[i]); });
  dg.mass_growth_exponent =
      1 + loglog_slope(o, lo, R, [&](std::size_t i) { return std::norm(o.Psi[i]) * std::pow(o.r[i], prof.d - 1); });
  dg.eq_residual_sup = equation_residual(prof);
  const cplx a = prof.inner.P.back(), bb = prof.outer.P.front();
  const cplx ad = prof.inner.Pd.back(), bd = prof.outer.Pd.front();
  dg.jump_P = std::abs(a - bb) / std::abs(a);
  dg.jump_Pd = std::abs(ad - bd) / std::abs(ad);
}

}  // namespace ssb
