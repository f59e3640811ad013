#pragma once

// Uniform-grid calculus: cumulative quadrature, finite differences, totals.
// All rules are sixth order in the spacing.

#include <cstddef>
#include <span>
#include <vector>

namespace ssb::grid {

struct Uniform {
  double x0 = 0.0;
  double h = 0.0;
  std::size_t n = 0;

  double x(std::size_t i) const { return x0 + h * static_cast<double>(i); }
  double back() const { return x(n - 1); }
  std::vector<double> nodes() const;
};

// Make a grid with n intervals on [a, b].
Uniform make_uniform(double a, double b, std::size_t intervals);

// Fornberg weights for the m-th derivative at z using abscissae xs.
std::vector<double> fd_weights(double z, std::span<const double> xs, int m);

// F[i] = integral of f from x0 to x_i.
std::vector<double> cumulative(const Uniform& g, std::span<const double> f);

// Integral of f from x_i to the last node.
std::vector<double> cumulative_from_end(const Uniform& g, std::span<const double> f);

// First (order = 1) or second (order = 2) derivative at every node.
// Default 7-point stencils; width (odd) selects wider ones.
std::vector<double> derivative(const Uniform& g, std::span<const double> f, int order, std::size_t width = 7);

// Same, for a function with parity +1 (even) or -1 (odd) about x0 = 0: ghost
// nodes are mirrored so the stencils stay centered near the origin.
std::vector<double> derivative_mirrored(const Uniform& g, std::span<const double> f, int order, int parity,
                                        std::size_t width = 11);

struct Quadrature {
  double value = 0.0;
  double error = 0.0;  // Richardson estimate against the doubled spacing
};

Quadrature integrate(const Uniform& g, std::span<const double> f);

}  // namespace ssb::grid
