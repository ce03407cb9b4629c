#include "gyro/potential.hpp"

#include <cmath>
#include <mutex>
#include <numbers>

#include "gyro/errors.hpp"
#include "gyro/special.hpp"

namespace gyro {

double GaussianBump::value(Vec2 x) const {
  return amplitude * std::exp(-norm2(x - center) / (2.0 * width * width));
}

Vec2 GaussianBump::gradient(Vec2 x) const {
  const Vec2 d = x - center;
  return (-value(x) / (width * width)) * d;
}

double RadialGaussian::value(Vec2 x) const {
  if (amplitude == 0.0) return 0.0;
  return amplitude * std::exp(-norm2(x) / (2.0 * width * width));
}

Vec2 RadialGaussian::gradient(Vec2 x) const { return (-value(x) / (width * width)) * x; }

double RadialGaussian::integral() const {
  return 2.0 * std::numbers::pi * width * width * amplitude;
}

namespace {

const std::array<double, 10>& hermite_sups() {
  static std::array<double, 10> table{};
  static std::once_flag once;
  std::call_once(once, [] {
    for (int j = 0; j < 10; ++j) table[j] = hermite_gaussian_sup(j);
  });
  return table;
}

}  // namespace

double gaussian_sobolev_sup(double amplitude, double width, int k) {
  if (k < 0 || k > 9) throw ValidationError("Sobolev order must lie in [0, 9]");
  const auto& m = hermite_sups();
  double best = 0.0;
  for (int j1 = 0; j1 <= k; ++j1) {
    for (int j2 = 0; j1 + j2 <= k; ++j2) {
      best = std::max(best, m[j1] * m[j2] / std::pow(width, j1 + j2));
    }
  }
  return std::abs(amplitude) * best;
}

void PotentialSpec::validate() const {
  for (const auto& bump : V) {
    if (!(bump.width > 0.0)) throw ValidationError("potential bump width must be positive");
    if (!std::isfinite(bump.amplitude)) throw ValidationError("potential amplitude must be finite");
  }
  if (!(w.width > 0.0)) throw ValidationError("interaction width must be positive");
  if (!std::isfinite(w.amplitude)) throw ValidationError("interaction amplitude must be finite");
}

double PotentialSpec::V_value(Vec2 x) const {
  double v = 0.0;
  for (const auto& bump : V) v += bump.value(x);
  return v;
}

Vec2 PotentialSpec::V_gradient(Vec2 x) const {
  Vec2 g{};
  for (const auto& bump : V) g += bump.gradient(x);
  return g;
}

double PotentialSpec::V_norm(int k) const {
  if (V.size() == 1) return gaussian_sobolev_sup(V[0].amplitude, V[0].width, k);
  // Per multi-index the sup of a sum is at most the sum of sups.
  const auto& m = hermite_sups();
  if (k < 0 || k > 9) throw ValidationError("Sobolev order must lie in [0, 9]");
  double best = 0.0;
  for (int j1 = 0; j1 <= k; ++j1) {
    for (int j2 = 0; j1 + j2 <= k; ++j2) {
      double sum = 0.0;
      for (const auto& bump : V) {
        sum += std::abs(bump.amplitude) * m[j1] * m[j2] / std::pow(bump.width, j1 + j2);
      }
      best = std::max(best, sum);
    }
  }
  return best;
}

double PotentialSpec::w_norm(int k) const { return gaussian_sobolev_sup(w.amplitude, w.width, k); }

}  // namespace gyro
