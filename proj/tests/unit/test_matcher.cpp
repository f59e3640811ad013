#include <cmath>

#include "doctest.h"
#include "ssb/errors.hpp"
#include "ssb/matcher.hpp"

using namespace ssb;

namespace {

std::shared_ptr<const GroundState> gs15() {
  static auto g = std::make_shared<const GroundState>(solve_ground_state(1, 5, 1e-12));
  return g;
}

// plain bisection on the transcendental law, independent of the Newton solve
double bisect_law(double sigma, double ratio) {
  double lo = 0.01, hi = 3.0;
  for (int k = 0; k < 200; ++k) {
    const double m = 0.5 * (lo + hi);
    (ratio / m * std::exp(-M_PI / m) > sigma ? hi : lo) = m;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("b_sigma law") {
  const double kappa = std::sqrt(2.0) * std::pow(3.0, 0.25), nc = std::sqrt(3.0) * M_PI / 4;
  CHECK(kappa * kappa / nc == doctest::Approx(8 / M_PI).epsilon(1e-14));
  const double b = b_sigma(1e-3, kappa, nc);
  CHECK(b == doctest::Approx(bisect_law(1e-3, 8 / M_PI)).epsilon(1e-12));
  CHECK(b == doctest::Approx(0.3536).epsilon(2e-4));
  double prev = 1;
  for (double s : {3e-2, 1e-2, 3e-3, 1e-3, 3e-4, 1e-5}) {
    const double bs = b_sigma(s, kappa, nc);
    CHECK(bs < prev);
    prev = bs;
    CHECK(std::abs(sigma_of_b(bs, kappa, nc) / s - 1) <= 1e-12);
  }
  CHECK_THROWS_AS(b_sigma(0.5, kappa, nc), DomainError);
  CHECK_THROWS_AS(b_sigma(0, kappa, nc), DomainError);
}

TEST_CASE("initial guess and scales") {
  const auto& gs = *gs15();
  const auto m = initial_guess(1e-3, gs);
  CHECK(m.rho == doctest::Approx(std::sqrt(2 * 1.3603495 * 1e-3)).epsilon(1e-6));
  CHECK(m.rho == doctest::Approx(0.05216).epsilon(2e-4));
  CHECK(m.gamma == 0.0);
  CHECK(m.theta == 0.0);
  // rho_sigma through kappa and b_sigma
  const double alt = std::sqrt(2.0) * gs.kappa / std::sqrt(m.b) * std::exp(-M_PI / (2 * m.b));
  CHECK(alt == doctest::Approx(m.rho).epsilon(1e-10));
  const auto s = sigma_scales(1e-3, gs.kappa, gs.n_c);
  CHECK(in_strict_box(m, s));
  const auto x = to_scaled(m, s);
  for (double v : x) CHECK(v == 0.0);
}

TEST_CASE("residual: theta periodicity and slope") {
  const MatchProblem prob(gs15(), 1e-3);
  auto m = initial_guess(1e-3, *gs15());
  const auto r0 = match_residual(m, prob);
  REQUIRE(r0.ok);
  auto m2 = m;
  m2.theta += 2 * M_PI;
  const auto r2 = match_residual(m2, prob);
  for (int k = 0; k < 4; ++k) CHECK(r2.v[k] == doctest::Approx(r0.v[k]).epsilon(1e-9).scale(1));
  const double dth = 1e-7;
  auto m3 = m;
  m3.theta += dth;
  const auto r3 = match_residual(m3, prob);
  const auto [sre, sim] = prob.residual_scales(m.b);
  (void)sre;
  const double slope = std::abs(r3.v[2] - r0.v[2]) / dth;
  CHECK(slope == doctest::Approx(std::abs(r0.exterior.P) / sim).epsilon(0.02));
  // the normalized exterior state has a real decaying-mode coefficient, so it is nearly real
  CHECK(std::abs(r0.exterior.P.imag()) < 0.1 * std::abs(r0.exterior.P.real()));
}

TEST_CASE("residual failures are flagged, not thrown") {
  const MatchProblem prob(gs15(), 1e-3);
  MatchParams bad{0.3536, -1.0, 0, 0};
  const auto r = match_residual(bad, prob);
  CHECK_FALSE(r.ok);
  CHECK(r.norm() >= kResidualSentinel);
  CHECK_FALSE(r.failure.empty());
}

TEST_CASE("solve_match at sigma = 1e-2") {
  MatchOptions o;
  o.jobs = 4;
  const MatchProblem prob(gs15(), 1e-2, o);
  const auto ms = solve_match(prob, initial_guess(1e-2, *gs15()));
  CHECK(ms.converged);
  CHECK(ms.residual_norm <= 1e-8);
  CHECK(std::abs(ms.params.b / ms.scales.b_sigma - 1) <= 0.5);
  CHECK(ms.recheck_agreement <= 1e-6);
  CHECK(ms.recheck_norm <= 1e-6);
  CHECK(std::isfinite(ms.jacobian_condition));
  CHECK(std::abs(ms.params.gamma) <= 10 * ms.scales.gamma_sigma);
  CHECK(std::abs(ms.params.theta) <= 10 * ms.scales.theta_sigma);
  CHECK(ms.interior.converged);
  CHECK(ms.exterior.r.back() == doctest::Approx(ms.layout.r_K));

  SUBCASE("re-convergence from a displaced start") {
    auto x = to_scaled(ms.params, ms.scales);
    for (double& v : x) v += 1e-6;
    const auto again = solve_match(prob, from_scaled(x, ms.scales));
    CHECK(again.iterations <= 3);
    CHECK(again.params.b == doctest::Approx(ms.params.b).epsilon(1e-10));
  }
  SUBCASE("theta wraps") {
    auto st = ms.params;
    st.theta += 2 * M_PI;
    const auto r = match_residual(st, prob);
    CHECK(r.norm() <= 1e-6);
  }
  SUBCASE("threads do not change the result") {
    MatchOptions o1;
    o1.jobs = 1;
    const MatchProblem p1(gs15(), 1e-2, o1);
    const auto serial = solve_match(p1, initial_guess(1e-2, *gs15()));
    CHECK(serial.params.b == ms.params.b);
    CHECK(serial.params.rho == ms.params.rho);
    CHECK(serial.params.gamma == ms.params.gamma);
    CHECK(serial.params.theta == ms.params.theta);
  }
}

TEST_CASE("continuation sweep trend") {
  MatchOptions o;
  o.jobs = 4;
  const auto sw = continuation_sweep({1e-2, 3e-3, 1e-3}, 1, 5, false, o);
  REQUIRE(sw.rows.size() == 3);
  REQUIRE(sw.solutions.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) CHECK(sw.rows[i].converged);
  CHECK(sw.rows[1].warm_started);
  for (std::size_t i = 1; i < 3; ++i) {
    CHECK(std::abs(sw.rows[i].b_dev()) < std::abs(sw.rows[i - 1].b_dev()));
    CHECK(std::abs(sw.rows[i].rho_dev()) < std::abs(sw.rows[i - 1].rho_dev()));
  }
  CHECK_THROWS_AS(continuation_sweep({1e-3, 1e-2}, 1, 5, false, o), ConfigError);
}

TEST_CASE("configuration errors") {
  CHECK_THROWS_AS(MatchProblem(gs15(), 0.5), ConfigError);
  CHECK_THROWS_AS(MatchProblem(gs15(), 1e-25), ConfigError);  // below the double-precision floor
  MatchOptions o;
  o.tol_ode = -1;
  CHECK_THROWS_AS(MatchProblem(gs15(), 1e-3, o), ConfigError);
  CHECK(coupled_exponent(1, 0.01) == doctest::Approx(1 + 4 / 0.98));
}
