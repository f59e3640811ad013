#include <cmath>
#include <vector>

#include "doctest.h"
#include "ssb/errors.hpp"
#include "ssb/farfield.hpp"

using namespace ssb;

namespace {
// sigma on the leading-order law for d=1, p=5 (kappa^2/N_c = 8/pi).
double law_sigma(double b) { return 8 / M_PI / b * std::exp(-M_PI / b); }
}  // namespace

TEST_CASE("phase functions: closed-form values") {
  CHECK(theta0(2) == doctest::Approx(-std::log(2.0)).epsilon(1e-15));
  CHECK(theta0(4) == doctest::Approx(std::sqrt(12.0) - std::log(std::sqrt(12.0) + 4)).epsilon(1e-15));
  const double h = 1e-5;
  CHECK((theta0(3 + h) - theta0(3 - h)) / (2 * h) == doctest::Approx(theta0_d(3)).epsilon(1e-9));
  CHECK(theta1(4, 0.1, Branch::plus) == doctest::Approx(-0.42021615).epsilon(1e-7));
  CHECK(theta1(5, 0, Branch::plus) == theta1(5, 0, Branch::minus));
  CHECK(theta1(5, 0.2, Branch::minus) == doctest::Approx(theta1(5, -0.2, Branch::plus)).epsilon(1e-15));
  CHECK((theta1(3 + h, 0.1, Branch::plus) - theta1(3 - h, 0.1, Branch::plus)) / (2 * h) ==
        doctest::Approx(theta1_d(3, 0.1, Branch::plus)).epsilon(1e-8));
  CHECK((theta1_d(3 + h, 0.1, Branch::minus) - theta1_d(3 - h, 0.1, Branch::minus)) / (2 * h) ==
        doctest::Approx(theta1_dd(3, 0.1, Branch::minus)).epsilon(1e-7));
  CHECK_THROWS_AS(theta0(1.9), DomainError);
  CHECK_THROWS_AS(theta1(2.0, 0.1, Branch::plus), DomainError);
}

TEST_CASE("Wronskian law") {
  for (double b : {0.2, 0.35, 0.5}) {
    const FarFieldBasis basis(b, law_sigma(b));
    for (double r : {4 / b, 1 / (b * b), 10 / (b * b)}) {
      if (r < 2.05 / b) continue;  // b = 0.5 puts 1/b^2 on the turning point
      const cplx w = basis.wronskian(r);
      const cplx we = basis.wronskian_exact(r);
      CHECK(std::abs(w - we) / std::abs(we) <= 1e-8);
    }
  }
}

TEST_CASE("amplitude law and decay exponents") {
  const double b = 0.05;
  const double sigma = 0.02;
  const FarFieldBasis basis(b, sigma);
  for (Branch br : {Branch::plus, Branch::minus}) {
    const double sg = br == Branch::plus ? 1 : -1;
    std::vector<double> x, y;
    for (int k = 0; k <= 200; ++k) {
      const double r = std::pow(10.0, 2.0 * k / 200) / (b * b);
      x.push_back(std::log(r));
      y.push_back(std::log(std::abs(basis.eval(r, br).v)));
      const double dev = std::abs(std::abs(basis.eval(r, br).v) * std::pow(r, 0.5 - sg * sigma) - 1);
      CHECK(dev <= 2 / (b * b * r * r));
    }
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      mx += x[i];
      my += y[i];
    }
    mx /= x.size();
    my /= y.size();
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      sxy += (x[i] - mx) * (y[i] - my);
      sxx += (x[i] - mx) * (x[i] - mx);
    }
    CHECK(std::abs(sxy / sxx - (-0.5 + sg * sigma)) <= 1e-3);
  }
}

TEST_CASE("branch symmetry and sigma = 0 conjugation") {
  const FarFieldBasis a(0.3, 0.01);
  const FarFieldBasis neg(0.3, -0.01);
  const FarFieldBasis zero(0.3, 0.0);
  for (double r : {7.0, 15.0, 40.0}) {
    const auto vm = a.eval(r, Branch::minus);
    const auto vp = neg.eval(r, Branch::plus);
    CHECK(std::abs(vm.v - std::conj(vp.v)) <= 1e-15 * std::abs(vm.v));
    CHECK(std::abs(vm.dv - std::conj(vp.dv)) <= 1e-15 * std::abs(vm.dv));
    CHECK(std::abs(zero.eval(r, Branch::minus).v - std::conj(zero.eval(r, Branch::plus).v)) <= 1e-15);
  }
}

TEST_CASE("outgoing derivative relation at r = 1/b^2") {
  for (double b : {0.2, 0.3}) {
    const FarFieldBasis basis(b, law_sigma(b));
    const double r = 1 / (b * b);
    const auto v = basis.eval(r, Branch::plus);
    const double lhs = std::abs(v.dv - cplx(0, b * r / 2) * v.v);
    CHECK(lhs <= 2.0 / (b * r) * std::abs(v.v));
  }
  CHECK_THROWS_AS(FarFieldBasis(0.3, 0.01).eval(2.0 / 0.3, Branch::plus), DomainError);
}

TEST_CASE("residual functions: agreement with the closed form and -2 decay") {
  const double b = 0.3;
  const double sigma = law_sigma(b);
  const FarFieldBasis basis(b, sigma);
  for (Branch br : {Branch::plus, Branch::minus}) {
    for (double s : {4.0, 10.0, 50.0, 300.0, 1000.0}) {
      const double f = wkb_residual(basis, s / b, br);
      CHECK(std::isfinite(f));
      CHECK(f == doctest::Approx(std::abs(wkb_f(s, sigma, br))).epsilon(1e-5));
    }
    const double f8 = wkb_residual(basis, 8 / b, br);
    const double f100 = wkb_residual(basis, 100 / b, br);
    const double slope = std::log(f100 / f8) / std::log(100.0 / 8.0);
    CHECK(slope >= -2.3);
    CHECK(slope <= -1.7);
  }
  const FarFieldBasis flat(b, 0.0);
  const double f0 = wkb_residual(flat, 10 / b, Branch::plus);
  const double fs = wkb_residual(basis, 10 / b, Branch::plus);
  CHECK(std::abs(f0 - fs) <= 0.1 * fs);
}
