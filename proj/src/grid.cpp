#include "ssb/grid.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "ssb/errors.hpp"

namespace ssb::grid {

namespace {

constexpr std::size_t kStencil = 6;  // quadrature panel stencil (degree 5)

// w[o][k]: integral over [o, o+1] of the k-th Lagrange basis on nodes 0..5.
std::array<std::array<double, kStencil>, kStencil - 1> panel_weights() {
  std::array<std::array<double, kStencil>, kStencil - 1> w{};
  for (std::size_t k = 0; k < kStencil; ++k) {
    // coefficients of prod_{m != k} (t - m) / (k - m), low order first
    std::array<double, kStencil> c{};
    c[0] = 1.0;
    std::size_t deg = 0;
    double denom = 1.0;
    for (std::size_t m = 0; m < kStencil; ++m) {
      if (m == k) continue;
      denom *= static_cast<double>(k) - static_cast<double>(m);
      for (std::size_t j = deg + 2; j-- > 0;) {
        const double up = j > 0 ? c[j - 1] : 0.0;
        c[j] = up - static_cast<double>(m) * c[j];
      }
      ++deg;
    }
    for (std::size_t o = 0; o + 1 < kStencil; ++o) {
      double acc = 0.0;
      for (std::size_t j = 0; j < kStencil; ++j) {
        const double e = static_cast<double>(j + 1);
        acc += c[j] * (std::pow(o + 1.0, e) - std::pow(static_cast<double>(o), e)) / e;
      }
      w[o][k] = acc / denom;
    }
  }
  return w;
}

const auto& weights() {
  static const auto w = panel_weights();
  return w;
}

void check(const Uniform& g, std::span<const double> f) {
  if (f.size() != g.n) throw ConfigError("grid size mismatch");
  if (g.n < kStencil + 1) throw ConfigError("grid too short for sixth-order rules");
}

// Integral over [x_i, x_{i+1}].
double panel(const Uniform& g, std::span<const double> f, std::size_t i) {
  const std::size_t j0 = std::min(i >= 2 ? i - 2 : 0, g.n - kStencil);
  const auto& w = weights()[i - j0];
  double acc = 0.0;
  for (std::size_t k = 0; k < kStencil; ++k) acc += w[k] * f[j0 + k];
  return acc * g.h;
}

}  // namespace

std::vector<double> Uniform::nodes() const {
  std::vector<double> r(n);
  for (std::size_t i = 0; i < n; ++i) r[i] = x(i);
  return r;
}

Uniform make_uniform(double a, double b, std::size_t intervals) {
  if (intervals == 0 || !(b > a)) throw ConfigError("invalid uniform grid");
  return Uniform{a, (b - a) / static_cast<double>(intervals), intervals + 1};
}

std::vector<double> fd_weights(double z, std::span<const double> xs, int m) {
  const std::size_t n = xs.size();
  std::vector<std::vector<double>> c(n, std::vector<double>(m + 1, 0.0));
  double c1 = 1.0;
  double c4 = xs[0] - z;
  c[0][0] = 1.0;
  for (std::size_t i = 1; i < n; ++i) {
    const int mn = std::min<int>(static_cast<int>(i), m);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = xs[i] - z;
    for (std::size_t j = 0; j < i; ++j) {
      const double c3 = xs[i] - xs[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k) c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
        c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
      }
      for (int k = mn; k >= 1; --k) c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
      c[j][0] = c4 * c[j][0] / c3;
    }
    c1 = c2;
  }
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) w[i] = c[i][m];
  return w;
}

std::vector<double> cumulative(const Uniform& g, std::span<const double> f) {
  check(g, f);
  std::vector<double> out(g.n, 0.0);
  for (std::size_t i = 0; i + 1 < g.n; ++i) out[i + 1] = out[i] + panel(g, f, i);
  return out;
}

std::vector<double> cumulative_from_end(const Uniform& g, std::span<const double> f) {
  check(g, f);
  std::vector<double> out(g.n, 0.0);
  for (std::size_t i = g.n - 1; i-- > 0;) out[i] = out[i + 1] + panel(g, f, i);
  return out;
}

std::vector<double> derivative(const Uniform& g, std::span<const double> f, int order, std::size_t width) {
  check(g, f);
  if (order != 1 && order != 2) throw ConfigError("derivative order must be 1 or 2");
  if (width % 2 == 0 || width < 3 || g.n < width) throw ConfigError("invalid stencil width");
  // Weights depend only on the offset of the node inside the stencil.
  std::vector<std::vector<double>> w(width);
  std::vector<double> xs(width);
  for (std::size_t k = 0; k < width; ++k) xs[k] = static_cast<double>(k);
  for (std::size_t o = 0; o < width; ++o) w[o] = fd_weights(static_cast<double>(o), xs, order);
  const double scale = order == 1 ? 1.0 / g.h : 1.0 / (g.h * g.h);
  std::vector<double> out(g.n);
  for (std::size_t i = 0; i < g.n; ++i) {
    const std::size_t half = width / 2;
    const std::size_t j0 = std::min(i >= half ? i - half : 0, g.n - width);
    const auto& wi = w[i - j0];
    double acc = 0.0;
    for (std::size_t k = 0; k < width; ++k) acc += wi[k] * f[j0 + k];
    out[i] = acc * scale;
  }
  return out;
}

Quadrature integrate(const Uniform& g, std::span<const double> f) {
  check(g, f);
  const double fine = cumulative(g, f).back();
  // Coarse rule on every other node, plus the odd tail interval at fine spacing.
  const std::size_t m = (g.n - 1) / 2;
  if (m + 1 < kStencil + 1) return {fine, 0.0};
  std::vector<double> fc(m + 1);
  for (std::size_t i = 0; i <= m; ++i) fc[i] = f[2 * i];
  Uniform gc{g.x0, 2 * g.h, m + 1};
  double coarse = cumulative(gc, fc).back();
  if ((g.n - 1) % 2 == 1) coarse += panel(g, f, g.n - 2);
  return {fine, std::abs(fine - coarse) / 63.0};
}

std::vector<double> derivative_mirrored(const Uniform& g, std::span<const double> f, int order, int parity,
                                        std::size_t width) {
  const std::size_t ghost = width / 2;
  if (f.size() != g.n || g.n <= ghost) throw std::invalid_argument("derivative_mirrored: bad grid");
  std::vector<double> ext(g.n + ghost);
  for (std::size_t k = 0; k < ghost; ++k) ext[k] = parity * f[ghost - k];
  std::copy(f.begin(), f.end(), ext.begin() + ghost);
  const Uniform ge{g.x0 - g.h * static_cast<double>(ghost), g.h, ext.size()};
  const auto d = derivative(ge, ext, order, width);
  return {d.begin() + static_cast<std::ptrdiff_t>(ghost), d.end()};
}

}  // namespace ssb::grid
