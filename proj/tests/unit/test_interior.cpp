#include <cmath>

#include "doctest.h"
#include "ssb/errors.hpp"
#include "ssb/interior.hpp"

using namespace ssb;

namespace {

struct Fixture {
  GroundState gs;
  LinearizedConstants lc;
  explicit Fixture(int d, double p) : gs(solve_ground_state(d, p, 1e-12)), lc(linearized_constants(gs)) {}
};

const Fixture& f15() {
  static const Fixture f(1, 5);
  return f;
}
const Fixture& f33() {
  static const Fixture f(3, 3);
  return f;
}

double sup(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s = std::max(s, std::abs(x));
  return s;
}

}  // namespace

TEST_CASE("grid size rule") {
  CHECK(default_intervals(1.7) % 2 == 0);
  CHECK(1.7 / default_intervals(1.7) <= 1.7 / 400 + 1e-15);
  CHECK(5.0 / default_intervals(5.0) <= 0.01 + 1e-15);
}

TEST_CASE("special solutions: boundary values, operator residuals, Wronskian") {
  for (const Fixture* f : {&f15(), &f33()}) {
    const auto bs = build_basis(f->gs, f->lc, 1.7);
    CHECK(bs.A[0] == 1.0);
    CHECK(bs.Ap[0] == 0.0);
    CHECK(bs.B[0] == 0.0);
    CHECK(bs.Bp[0] == 0.0);
    CHECK(sup(apply_lminus(bs, bs.Q)) <= 1e-8);
    CHECK(sup(apply_lplus(bs, bs.A)) <= 1e-7);
    auto lb = apply_lminus(bs, bs.B);
    for (std::size_t i = 0; i < lb.size(); ++i) lb[i] += bs.Q[i];
    CHECK(sup(lb) <= 1e-7);
    double werr = 0;
    for (std::size_t i = 1; i < bs.r.size(); ++i) {
      const double W = (bs.A[i] * bs.Dp[i] - bs.Ap[i] * bs.D[i]) * bs.w[i];
      werr = std::max(werr, std::abs(W - 1));
    }
    CHECK(werr <= 1e-7);
    // linearity of the discrete operator
    std::vector<double> a3(bs.A.size());
    for (std::size_t i = 0; i < a3.size(); ++i) a3[i] = 3 * bs.Q[i];
    const auto l1 = apply_lplus(bs, bs.Q);
    const auto l3 = apply_lplus(bs, a3);
    for (std::size_t i = 0; i < l1.size(); i += 37) CHECK(l3[i] == doctest::Approx(3 * l1[i]).epsilon(1e-9));
  }
}

TEST_CASE("kappa_B identity") {
  for (const Fixture* f : {&f15(), &f33()}) {
    const double ratio = f->lc.kappa_B * 2 * f->gs.kappa / f->gs.n_c;
    CHECK(std::abs(ratio - 1) <= 1e-5);
    CHECK(f->lc.kappa_A != 0);
  }
}

TEST_CASE("d = 1: D is Q'/Q''(0) and D = r(1 + O(r))") {
  const auto& f = f15();
  const auto bs = build_basis(f.gs, f.lc, 1.8);
  const double q2 = f.gs.q0 - std::pow(f.gs.q0, 5);
  double err = 0;
  for (std::size_t i = 0; i < bs.r.size(); ++i)
    err = std::max(err, std::abs(bs.D[i] - closed_form_soliton_1d_derivative(5, bs.r[i]) / q2));
  CHECK(err <= 1e-8);
  CHECK(bs.D[0] == doctest::Approx(0).epsilon(1e-12));
  CHECK(bs.D[1] / bs.r[1] == doctest::Approx(1).epsilon(1e-3));
}

TEST_CASE("reduction-of-order oracle for D") {
  // D = -A int_r^inf s^{1-d} A^{-2} ds, tail beyond 20 from A ~ kappa_A s^{-(d-1)/2} e^s.
  for (const Fixture* f : {&f15(), &f33()}) {
    const auto& lc = f->lc;
    const std::size_t n = lc.A.size();
    const grid::Uniform g{0.0, lc.h, n};
    std::vector<double> k(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const double r = lc.h * static_cast<double>(i);
      k[i] = i == 0 ? 0.0 : std::pow(r, 1 - f->gs.d) / (lc.A[i] * lc.A[i]);
    }
    const auto I = grid::cumulative_from_end(g, k);
    const double tail = std::exp(-2 * lc.fit_hi) / (2 * lc.kappa_A * lc.kappa_A);
    bool zero_free = true;
    for (std::size_t i = 100; i < n; ++i) zero_free = zero_free && lc.A[i] * lc.A[i - 1] > 0;
    if (!zero_free) continue;
    for (double r : {1.0, 2.0, 3.5, 5.0}) {
      const std::size_t i = static_cast<std::size_t>(std::llround(r / lc.h));
      const double Dred = -lc.A[i] * (I[i] + tail);
      CHECK(lc.D[i] == doctest::Approx(Dred).epsilon(1e-7));
    }
  }
}

TEST_CASE("Green operators invert L+ and L-") {
  const auto& f = f15();
  const auto bs = build_basis(f.gs, f.lc, 1.75);
  const std::size_t n = bs.r.size();
  std::vector<std::vector<double>> tests(5, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const double r = bs.r[i];
    const double q = bs.Q[i];
    tests[0][i] = std::pow(q, 5);
    tests[1][i] = r * q;
    tests[2][i] = q;
    tests[3][i] = r * r * q;
    tests[4][i] = std::exp(-r * r) * std::cos(r);
  }
  for (const auto& t : tests) {
    const auto hp = green_hplus(bs, t);
    const auto hm = green_hminus(bs, t);
    auto lp = apply_lplus(bs, hp.v, hp.dv);
    auto lm = apply_lminus(bs, hm.v, hm.dv);
    double ep = 0, em = 0;
    for (std::size_t i = 0; i < n; ++i) {
      ep = std::max(ep, std::abs(lp[i] - t[i]));
      em = std::max(em, std::abs(lm[i] - t[i]));
    }
    CHECK(ep <= 1e-6 * sup(t));
    CHECK(em <= 1e-6 * sup(t));
  }
  const auto hq = green_hminus(bs, bs.Q);
  for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(hq.v[i] + bs.B[i]) <= 1e-8 * std::max(1.0, std::abs(bs.B[i])));
  const std::vector<double> zero(n, 0.0);
  CHECK(sup(green_hplus(bs, zero).v) == 0.0);
  CHECK(sup(green_hminus(bs, zero).v) == 0.0);
  CHECK_THROWS_AS(green_hplus(bs, std::vector<double>(n + 1)), ConfigError);
}

TEST_CASE("Green operators in d = 3") {
  const auto& f = f33();
  const auto bs = build_basis(f.gs, f.lc, 1.75);
  const std::size_t n = bs.r.size();
  std::vector<double> t(n);
  for (std::size_t i = 0; i < n; ++i) t[i] = bs.r[i] * bs.r[i] * bs.Q[i];
  const auto hp = green_hplus(bs, t);
  const auto hm = green_hminus(bs, t);
  const auto lp = apply_lplus(bs, hp.v, hp.dv);
  const auto lm = apply_lminus(bs, hm.v, hm.dv);
  double ep = 0, em = 0;
  for (std::size_t i = 0; i < n; ++i) {
    ep = std::max(ep, std::abs(lp[i] - t[i]));
    em = std::max(em, std::abs(lm[i] - t[i]));
  }
  CHECK(ep <= 1e-6 * sup(t));
  CHECK(em <= 1e-6 * sup(t));
}

TEST_CASE("H+ bound in the weighted norm") {
  const auto& f = f15();
  for (double b : {0.1, 0.2, 0.35}) {
    const auto bs = build_basis(f.gs, f.lc, 1 / std::sqrt(b));
    std::vector<double> t(bs.r.size());
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = 0.25 * b * b * bs.r[i] * bs.r[i] * bs.Q[i];
    const double ratio = norm_plus(bs, green_hplus(bs, t).v) / norm_plus(bs, t);
    MESSAGE("b " << b << " N+(H+ f)/N+(f) * b^{1/2} = " << ratio * std::sqrt(b));
    CHECK(ratio * std::sqrt(b) <= 5.0);
  }
}

TEST_CASE("Picard: trivial fixed point") {
  const auto& f = f15();
  const auto bs = build_basis(f.gs, f.lc, 2.0);
  const auto sol = picard_interior(bs, 0, 0, 0);
  CHECK(sol.converged);
  CHECK(sup(sol.phi_p) <= 1e-15);
  CHECK(sup(sol.phi_m) == 0.0);
  for (std::size_t i = 0; i < bs.r.size(); ++i) CHECK(std::abs(sol.P[i] - bs.Q[i]) <= 1e-15);
}

TEST_CASE("Picard: matched regime, oracle agreement and asymptotic laws") {
  const auto& f = f15();
  const double b = 0.3536, sigma = 1e-3;
  const auto bs = build_basis(f.gs, f.lc, 1 / std::sqrt(b));
  const auto sol = picard_interior(bs, b, sigma, 0.0);
  CHECK(sol.converged);
  for (std::size_t k = 2; k < sol.deltas.size(); ++k) {
    if (sol.deltas[k - 1] < 1e-12) break;
    CHECK(sol.deltas[k] / sol.deltas[k - 1] < 0.5);
  }
  CHECK(sol.residual_sup() <= 100 * 1e-13 * 10);
  const auto rep = shoot_interior_oracle(sol);
  MESSAGE("oracle rel dev " << rep.rel_dev_rK << " half-window " << rep.max_dev_half);
  CHECK(rep.rel_dev_rK <= 1e-6);
  CHECK(rep.max_dev_half <= 1e-6);

  const BoundaryState m = interior_at_matchpoint(sol);
  CHECK(m.r == bs.r_K);
  CHECK(m.P == sol.P.back());
}

TEST_CASE("Picard: boundary-value laws at r_K") {
  const auto& f = f15();
  double prev_re = 1e9, prev_im = 1e9;
  for (double b : {0.3, 0.15, 0.08}) {
    const double sigma = 8 / M_PI / b * std::exp(-M_PI / b);
    const auto bs = build_basis(f.gs, f.lc, 1 / std::sqrt(b));
    const auto sol = picard_interior(bs, b, sigma, 0.0);
    const auto m = interior_at_matchpoint(sol);
    const double re_law = f.gs.kappa * std::exp(-1 / std::sqrt(b));
    const double im_law = f.lc.kappa_B * sigma * b * std::exp(1 / std::sqrt(b));
    const double dre = std::abs(m.P.real() / re_law - 1);
    const double dim = std::abs(m.P.imag() / im_law - 1);
    MESSAGE("b " << b << " Re dev " << dre << " Im dev " << dim << " b^{1/4} " << std::pow(b, 0.25));
    CHECK(dre <= 2 * std::pow(b, 0.25));
    CHECK(dim <= 2 * std::pow(b, 0.25));
    CHECK(dre < prev_re);
    CHECK(dim < prev_im);
    prev_re = dre;
    prev_im = dim;
  }
}

TEST_CASE("Picard: gamma enters Re P(r_K) affinely") {
  const auto& f = f15();
  const double b = 0.3536, sigma = 1e-3;
  const auto bs = build_basis(f.gs, f.lc, 1 / std::sqrt(b));
  const double g = 1e-6;
  const double p0 = interior_at_matchpoint(picard_interior(bs, b, sigma, 0)).P.real();
  const double p1 = interior_at_matchpoint(picard_interior(bs, b, sigma, g)).P.real();
  const double p2 = interior_at_matchpoint(picard_interior(bs, b, sigma, 2 * g)).P.real();
  CHECK(std::abs((p2 - p1) - (p1 - p0)) <= 1e-3 * std::abs(p1 - p0));
  const double slope = (p1 - p0) / g;
  const double law = f.lc.kappa_A * std::exp(1 / std::sqrt(b));
  MESSAGE("slope " << slope << " law " << law);
  CHECK(slope / law == doctest::Approx(1).epsilon(2 * std::pow(b, 0.25)));
}

TEST_CASE("Picard: phase equivariance of the shooting oracle") {
  const cplx P0(1.3, 0.01);
  const cplx e = std::polar(1.0, 0.4);
  const auto a = shoot_interior(0.3, 1e-3, 5, 1, P0, 1.8);
  const auto c = shoot_interior(0.3, 1e-3, 5, 1, e * P0, 1.8);
  CHECK(std::abs(c.P - e * a.P) <= 1e-10 * std::abs(a.P));
  const auto q = shoot_interior(0, 0, 5, 1, std::pow(3.0, 0.25), 3.0);
  CHECK(std::abs(q.P - closed_form_soliton_1d(5, 3.0)) <= 1e-10);
}

TEST_CASE("Picard: contraction failure is reported") {
  const auto& f = f15();
  const auto bs = build_basis(f.gs, f.lc, 1 / std::sqrt(0.9));
  CHECK_THROWS_AS(picard_interior(bs, 0.9, 0.3, 3.0), ContractionError);
}
