#pragma once

#include <array>
#include <vector>

#include "gyro/vec2.hpp"

namespace gyro {

// A exp(-|x - c|^2 / (2 s^2)).
struct GaussianBump {
  double amplitude = 0.0;
  Vec2 center{};
  double width = 1.0;

  double value(Vec2 x) const;
  Vec2 gradient(Vec2 x) const;
};

// Radial A exp(-|x|^2 / (2 s^2)).
struct RadialGaussian {
  double amplitude = 0.0;
  double width = 1.0;

  double value(Vec2 x) const;
  Vec2 gradient(Vec2 x) const;
  // Integral over the plane: 2 pi s^2 A.
  double integral() const;
};

// sup over the multi-indices |alpha| <= k of |d^alpha f|, f = A exp(-|x|^2/2s^2),
// equal to |A| max_{j1+j2<=k} M_{j1} M_{j2} / s^{j1+j2} with M_j = sup |He_j(u) e^{-u^2/2}|.
double gaussian_sobolev_sup(double amplitude, double width, int k);

struct PotentialSpec {
  std::vector<GaussianBump> V;
  RadialGaussian w;

  void validate() const;
  double V_value(Vec2 x) const;
  Vec2 V_gradient(Vec2 x) const;
  // Drift velocity of the external part: grad^perp V.
  Vec2 V_drift(Vec2 x) const { return perp(V_gradient(x)); }

  // W^{k,inf} norms, k <= 9; exact for a single bump, a sum bound otherwise.
  double V_norm(int k) const;
  double w_norm(int k) const;
};

}  // namespace gyro
