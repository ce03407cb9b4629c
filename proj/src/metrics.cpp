#include "gyro/metrics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "gyro/errors.hpp"

namespace gyro {

void TestFunction::validate() const {
  if (!(width > 0.0)) throw ValidationError("test function width must be positive");
  if (!std::isfinite(amplitude) || !std::isfinite(tilt.x1) || !std::isfinite(tilt.x2)) {
    throw ValidationError("test function parameters must be finite");
  }
}

double TestFunction::value(Vec2 x) const {
  const Vec2 y = x - center;
  return amplitude * (1.0 + dot(tilt, y)) * std::exp(-norm2(y) / (2.0 * width * width));
}

Vec2 TestFunction::gradient(Vec2 x) const {
  const Vec2 y = x - center;
  const double s2 = width * width;
  const double g = amplitude * std::exp(-norm2(y) / (2.0 * s2));
  return g * (tilt - ((1.0 + dot(tilt, y)) / s2) * y);
}

double TestFunction::sup_norm() const {
  const double k = norm(tilt);
  if (k == 0.0) return std::abs(amplitude);
  // Along the tilt direction, (1 + k u) e^{-u^2/2s^2} peaks where k u^2 + u - k s^2 = 0.
  const double root = std::sqrt(1.0 + 4.0 * k * k * width * width);
  double best = 0.0;
  for (double u : {(-1.0 + root) / (2.0 * k), (-1.0 - root) / (2.0 * k)}) {
    best = std::max(best, std::abs(1.0 + k * u) * std::exp(-u * u / (2.0 * width * width)));
  }
  return std::abs(amplitude) * best;
}

double TestFunction::gradient_sup() const {
  // Coarse polar scan followed by pattern-search refinement around the best node.
  const double rmax = 6.0 * width * (1.0 + norm(tilt) * width);
  Vec2 best_y{};
  double best = 0.0;
  constexpr int kr = 240, kt = 360;
  for (int a = 0; a <= kr; ++a) {
    const double r = rmax * a / kr;
    for (int b = 0; b < kt; ++b) {
      const double th = 2.0 * std::numbers::pi * b / kt;
      const Vec2 y{r * std::cos(th), r * std::sin(th)};
      const double v = norm(gradient(center + y));
      if (v > best) {
        best = v;
        best_y = y;
      }
    }
  }
  double step = rmax / kr;
  while (step > 1e-12 * width) {
    bool moved = false;
    for (Vec2 d : {Vec2{1, 0}, Vec2{-1, 0}, Vec2{0, 1}, Vec2{0, -1}}) {
      const Vec2 y = best_y + step * d;
      const double v = norm(gradient(center + y));
      if (v > best) {
        best = v;
        best_y = y;
        moved = true;
      }
    }
    if (!moved) step *= 0.5;
  }
  return best;
}

double TestFunction::w1_inf_norm() const { return std::max(sup_norm(), gradient_sup()); }

double TestFunction::gradient_l2() const {
  return std::abs(amplitude) * std::sqrt(std::numbers::pi * (1.0 + norm2(tilt) * width * width));
}

double TestFunction::support_radius() const {
  // |phi| <= |A| (1 + |k| r) e^{-r^2/2s^2}, decreasing once r exceeds the peak.
  const double k = norm(tilt);
  auto bound = [&](double r) { return std::abs(amplitude) * (1.0 + k * r) * std::exp(-r * r / (2.0 * width * width)); };
  double lo = std::max(width, k > 0.0 ? k * width * width : 0.0);
  if (bound(lo) < 1e-14) return lo;
  double hi = 2.0 * lo;
  while (bound(hi) >= 1e-14) hi *= 2.0;
  for (int it = 0; it < 200 && hi - lo > 1e-12 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (bound(mid) >= 1e-14 ? lo : hi) = mid;
  }
  return hi;
}

namespace {

double smoothstep9(double u) {
  return u * u * u * u * u * (126.0 + u * (-420.0 + u * (540.0 + u * (-315.0 + u * 70.0))));
}

double smoothstep9_derivative(double u) {
  const double v = u * (1.0 - u);
  return 630.0 * v * v * v * v;
}

}  // namespace

double TimeWindow::value(double t) const {
  const double start = 0.8 * horizon;
  if (t <= start) return 1.0;
  if (t >= horizon) return 0.0;
  return 1.0 - smoothstep9((t - start) / (horizon - start));
}

double TimeWindow::derivative(double t) const {
  const double start = 0.8 * horizon;
  if (t <= start || t >= horizon) return 0.0;
  return -smoothstep9_derivative((t - start) / (horizon - start)) / (horizon - start);
}

std::vector<WeakPairing> weak_pairings(const GriddedDensity& rho, const PotentialSpec& P,
                                       const ConvolutionSolver& conv, std::span<const TestFunction> phis) {
  if (!(conv.grid() == rho.grid)) throw ValidationError("weak_pairings: convolution grid differs from density grid");
  const GridSpec& g = rho.grid;
  const std::array<GridField, 2> dw = conv.convolve_gradient(rho);
  std::vector<WeakPairing> out(phis.size());
  for (std::size_t f = 0; f < phis.size(); ++f) {
    const TestFunction& phi = phis[f];
    const double reach = phi.support_radius();
    double mass = 0.0, transport = 0.0;
    for (int i2 = 0; i2 < g.n; ++i2) {
      for (int i1 = 0; i1 < g.n; ++i1) {
        const double r = rho.at(i1, i2);
        if (r == 0.0) continue;
        const Vec2 x = g.node(i1, i2);
        if (norm(x - phi.center) > reach) continue;
        const Vec2 grad_u = P.V_gradient(x) + Vec2{dw[0].at(i1, i2), dw[1].at(i1, i2)};
        mass += r * phi.value(x);
        transport += r * dot(perp(grad_u), phi.gradient(x));
      }
    }
    out[f] = {mass * g.cell_area(), transport * g.cell_area()};
  }
  return out;
}

double residual_from_pairings(std::span<const double> times, std::span<const WeakPairing> pairings,
                              double horizon) {
  if (times.size() != pairings.size() || times.empty()) throw ValidationError("residual: sample count mismatch");
  if (!(horizon > 0.0)) throw ValidationError("residual: horizon must be positive");
  if (std::abs(times.front()) > 1e-12) throw ValidationError("residual: samples must start at t = 0");
  if (times.back() < horizon * (1.0 - 1e-12)) throw ValidationError("residual: samples do not reach the horizon");
  for (std::size_t k = 1; k < times.size(); ++k) {
    if (!(times[k] > times[k - 1])) throw ValidationError("residual: sample times must increase");
  }
  // 8-point Gauss-Legendre nodes and weights on [-1, 1].
  static constexpr std::array<double, 8> xg{-0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
                                            -0.1834346424956498, 0.1834346424956498,  0.5255324099163290,
                                            0.7966664774136267,  0.9602898564975363};
  static constexpr std::array<double, 8> wg{0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
                                            0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
                                            0.2223810344533745, 0.1012285362903763};
  const TimeWindow chi{horizon};
  const double knee = 0.8 * horizon;
  double total = pairings.front().mass;
  for (std::size_t k = 0; k + 1 < times.size() && times[k] < horizon; ++k) {
    const double t0 = times[k];
    const double t1 = std::min(times[k + 1], horizon);
    const double span = times[k + 1] - times[k];
    std::array<double, 3> cuts{t0, t1, t1};
    int pieces = 1;
    if (knee > t0 && knee < t1) {
      cuts = {t0, knee, t1};
      pieces = 2;
    }
    for (int p = 0; p < pieces; ++p) {
      const double a = cuts[p], b = cuts[p + 1];
      const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
      for (std::size_t q = 0; q < xg.size(); ++q) {
        const double t = mid + half * xg[q];
        const double s = (t - times[k]) / span;
        const double A = (1.0 - s) * pairings[k].mass + s * pairings[k + 1].mass;
        const double B = (1.0 - s) * pairings[k].transport + s * pairings[k + 1].transport;
        total += half * wg[q] * (chi.derivative(t) * A + chi.value(t) * B);
      }
    }
  }
  return total;
}

double drift_residual(std::span<const double> times, std::span<const GriddedDensity> traj, const PotentialSpec& P,
                      const TestFunction& phi, double horizon) {
  if (traj.empty()) throw ValidationError("drift_residual: empty trajectory");
  phi.validate();
  const ConvolutionSolver conv(traj.front().grid, P.w);
  std::vector<WeakPairing> pairs;
  pairs.reserve(traj.size());
  for (const GriddedDensity& rho : traj) pairs.push_back(weak_pairings(rho, P, conv, {&phi, 1}).front());
  return residual_from_pairings(times, pairs, horizon);
}

double dobrushin_bound(double w1_initial, double error_term, double t, const PotentialSpec& P) {
  if (!(w1_initial >= 0.0) || !(error_term >= 0.0)) throw ValidationError("dobrushin_bound: inputs must be nonnegative");
  return std::exp(2.0 * (P.V_norm(2) + P.w_norm(2)) * std::abs(t)) * (w1_initial + error_term);
}

SlopeFit slope_fit(std::span<const std::pair<double, double>> pairs) {
  if (pairs.size() < 3) throw ValidationError("slope_fit: need at least three points");
  std::vector<double> x, y;
  for (const auto& [l, v] : pairs) {
    if (!(l > 0.0) || !(v > 0.0)) throw ValidationError("slope_fit: l_b and values must be positive");
    x.push_back(std::log(l));
    y.push_back(std::log(v));
  }
  const double n = static_cast<double>(x.size());
  double xm = 0.0, ym = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    xm += x[k];
    ym += y[k];
  }
  xm /= n;
  ym /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sxx += (x[k] - xm) * (x[k] - xm);
    sxy += (x[k] - xm) * (y[k] - ym);
  }
  if (!(sxx > 0.0)) throw ValidationError("slope_fit: l_b values must not all coincide");
  SlopeFit fit;
  fit.exponent = sxy / sxx;
  fit.intercept = ym - fit.exponent * xm;
  double rss = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double r = y[k] - (fit.intercept + fit.exponent * x[k]);
    rss += r * r;
  }
  fit.residual = std::sqrt(rss / n);
  return fit;
}

}  // namespace gyro
