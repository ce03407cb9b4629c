#include "gyro/special.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace gyro {

double laguerre(int n, double alpha, double t) {
  if (n < 0) throw std::invalid_argument("laguerre: negative degree");
  double prev = 1.0;
  if (n == 0) return prev;
  double cur = 1.0 + alpha - t;
  for (int k = 1; k < n; ++k) {
    const double next = ((2.0 * k + 1.0 + alpha - t) * cur - (k + alpha) * prev) / (k + 1.0);
    prev = cur;
    cur = next;
  }
  return cur;
}

double log_factorial(int n) { return std::lgamma(static_cast<double>(n) + 1.0); }

QuadratureRule gauss_legendre(int order, double a, double b) {
  if (order < 1) throw std::invalid_argument("gauss_legendre: order must be positive");
  QuadratureRule rule;
  rule.nodes.resize(order);
  rule.weights.resize(order);
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  for (int i = 0; i < (order + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (order + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= order; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = order * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = mid - half * x;
    rule.nodes[order - 1 - i] = mid + half * x;
    rule.weights[i] = half * w;
    rule.weights[order - 1 - i] = half * w;
  }
  return rule;
}

double hermite_gaussian_sup(int j) {
  if (j < 0) throw std::invalid_argument("hermite_gaussian_sup: negative order");
  // The extrema of He_j(u) e^{-u^2/2} lie within |u| <= sqrt(4j + 2) + 2; dense scan then
  // golden-section refinement around the best sample.
  const double umax = std::sqrt(4.0 * j + 2.0) + 3.0;
  auto f = [j](double u) {
    double h0 = 1.0;
    double h1 = u;
    if (j == 0) return std::exp(-0.5 * u * u);
    for (int k = 1; k < j; ++k) {
      const double h2 = u * h1 - k * h0;
      h0 = h1;
      h1 = h2;
    }
    return std::abs(h1) * std::exp(-0.5 * u * u);
  };
  const int samples = 20000;
  const double du = umax / samples;
  double best = 0.0;
  double best_u = 0.0;
  for (int i = 0; i <= samples; ++i) {
    const double u = i * du;
    const double v = f(u);
    if (v > best) {
      best = v;
      best_u = u;
    }
  }
  double lo = std::max(0.0, best_u - du);
  double hi = best_u + du;
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  for (int iter = 0; iter < 100; ++iter) {
    const double c = hi - g * (hi - lo);
    const double d = lo + g * (hi - lo);
    if (f(c) > f(d)) {
      hi = d;
    } else {
      lo = c;
    }
  }
  return std::max(best, f(0.5 * (lo + hi)));
}

double smoothstep_c4(double s) {
  if (s <= 0.0) return 0.0;
  if (s >= 1.0) return 1.0;
  const double s5 = s * s * s * s * s;
  return s5 * (126.0 + s * (-420.0 + s * (540.0 + s * (-315.0 + s * 70.0))));
}

double smoothstep_c4_derivative(double s) {
  if (s <= 0.0 || s >= 1.0) return 0.0;
  // d/ds of the polynomial above: 630 s^4 (1 - s)^4.
  const double a = s * (1.0 - s);
  return 630.0 * a * a * a * a;
}

}  // namespace gyro
