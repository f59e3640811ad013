#include <cmath>

#include "doctest.h"
#include "ssb/errors.hpp"
#include "ssb/profile.hpp"

using namespace ssb;

namespace {

const MatchedSolution& matched() {
  static const MatchedSolution ms = [] {
    MatchOptions o;
    o.jobs = 4;
    return solve_match(1e-2, coupled_exponent(1, 1e-2), 1, o);
  }();
  return ms;
}

// Profile made of Q itself on [0, 30] with b = 0.
SelfSimilarProfile q_profile(const GroundState& gs) {
  SelfSimilarProfile pr;
  pr.d = gs.d;
  pr.p = gs.p;
  auto seg = [&](double a, double b) {
    const auto g = grid::make_uniform(a, b, static_cast<std::size_t>(std::lround((b - a) / 0.005)));
    std::vector<cplx> P(g.n), Pd(g.n);
    for (std::size_t i = 0; i < g.n; ++i) {
      const auto [q, qd] = gs.eval(g.x(i));
      P[i] = q;
      Pd[i] = qd;
    }
    return make_segment(g, P, Pd, 0.0);
  };
  pr.r_K = 2.0;
  pr.inner = seg(0, 2);
  pr.outer = seg(2, 30);
  return pr;
}

}  // namespace

TEST_CASE("trivial profiles") {
  const auto gs = solve_ground_state(1, 5, 1e-12);
  auto pr = q_profile(gs);
  CHECK(hdot1_distance(pr, gs).value <= 1e-6);
  // L2-critical ground state: E(Q) = 0
  const auto E = energy(pr);
  CHECK(std::abs(E.energy) <= 1e-7);
  CHECK(E.kinetic > 0.1);

  for (ProfileSegment* s : {&pr.inner, &pr.outer}) {
    for (auto& v : s->P) v = 0;
    for (auto& v : s->Pd) v = 0;
    fill_psi(*s, 0.3);
  }
  const auto Z = energy(pr);
  CHECK(Z.energy == 0.0);
  CHECK(Z.error == 0.0);
  CHECK_FALSE(Z.inconclusive);
  CHECK(sphere_measure(1) == doctest::Approx(2.0));
  CHECK(sphere_measure(3) == doctest::Approx(4 * M_PI));
}

TEST_CASE("assembled profile: continuity, modulus, residual") {
  const auto& ms = matched();
  const auto pr = assemble_profile(ms);
  const auto [sre, sim] = MatchProblem(ms.gs, ms.sigma).residual_scales(ms.params.b);
  const double tol = 1e-8 * (sre + sim);
  CHECK(pr.diag.jump_P * std::abs(pr.inner.P.back()) <= 10 * tol);
  CHECK(pr.diag.jump_Pd * std::abs(pr.inner.Pd.back()) <= 10 * tol);
  for (const ProfileSegment* s : {&pr.inner, &pr.outer})
    for (std::size_t i = 0; i < s->r.size(); i += 97) {
      CHECK(std::abs(s->Psi[i]) == doctest::Approx(std::abs(s->P[i])).epsilon(1e-14));
      const cplx e = std::polar(1.0, -pr.b * s->r[i] * s->r[i] / 4);
      CHECK(std::abs(s->Psi[i] - e * s->P[i]) <= 1e-15 * std::abs(s->P[i]) + 1e-300);
    }
  CHECK(pr.diag.eq_residual_sup <= 100 * 1e-12);
  CHECK(pr.inner.r.back() == pr.outer.r.front());
  CHECK(pr.R_far() == doctest::Approx(ms.layout.R_far));
}

TEST_CASE("diagnostics on the matched profile") {
  const auto& ms = matched();
  const auto pr = assemble_profile(ms);
  const auto& dg = pr.diag;
  MESSAGE("E " << dg.energy << " err " << dg.energy_error << " K " << dg.kinetic << " H1 " << dg.hdot1_dist
                << " tail " << dg.tail_amp << " slope " << dg.dpsi_slope);
  CHECK(std::abs(dg.energy) <= std::max(1e-3 * dg.kinetic, dg.energy_error));
  CHECK_FALSE(dg.energy_inconclusive);
  CHECK(dg.tail_amp == doctest::Approx(ms.params.rho).epsilon(0.02));
  CHECK_FALSE(dg.tail_inconclusive);
  CHECK(std::abs(dg.dpsi_slope + (0.5 + 1 - ms.sigma)) <= 0.05);
  CHECK(dg.hdot1_dist > 0);
  CHECK(dg.hdot1_dist < 0.5);

  SUBCASE("phase invariance") {
    const auto rot = rotate(pr, 1.234);
    const auto E = energy(rot);
    CHECK(E.energy == doctest::Approx(dg.energy).epsilon(1e-12).scale(dg.kinetic));
    CHECK(hdot1_distance(rot, *ms.gs).value == doctest::Approx(dg.hdot1_dist).epsilon(1e-12));
    CHECK(tail_amplitude(rot).value == doctest::Approx(dg.tail_amp).epsilon(1e-12));
    CHECK(equation_residual(rot) == doctest::Approx(dg.eq_residual_sup).epsilon(1e-3).scale(1e-12));
  }
  SUBCASE("grid refinement") {
    ProfileOptions fine;
    fine.h_outer = 0.0025;
    const auto pf = assemble_profile(ms, fine);
    CHECK(std::abs(pf.diag.energy - dg.energy) <= dg.energy_error);
    CHECK(std::abs(pf.diag.hdot1_dist - dg.hdot1_dist) <= dg.hdot1_error);
    CHECK(std::abs(pf.diag.tail_amp - dg.tail_amp) <= dg.tail_spread * dg.tail_amp);
  }
}

TEST_CASE("fixed p = 5 away from the coupled exponent has nonzero energy") {
  MatchOptions o;
  o.jobs = 4;
  const auto ms = solve_match(1e-2, 5, 1, o);
  const auto pr = assemble_profile(ms);
  // the energy identity needs sigma = s_c; here E ~ -sigma
  CHECK(std::abs(pr.diag.energy) > 100 * pr.diag.energy_error);
}
