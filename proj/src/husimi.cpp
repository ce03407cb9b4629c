#include "gyro/husimi.hpp"

#include <fmt/format.h>
#include <fmt/os.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "gyro/coherent.hpp"
#include "gyro/errors.hpp"
#include "gyro/kernels.hpp"

namespace gyro {

double husimi_value(const DensityMatrix& gamma, cplx z, int n, double tail_tolerance) {
  const Truncation& t = gamma.truncation();
  if (n < 0 || n > t.n_max()) throw ValidationError("husimi_value: level outside truncation");
  const CoherentCoeffs cc = coherent_coeffs({z, n}, t, gamma.scaling(), tail_tolerance);
  const int mdim = t.m_ang() + 1;
  const Eigen::MatrixXcd& orb = gamma.orbitals();
  double v = 0.0;
  for (Eigen::Index k = 0; k < orb.cols(); ++k) {
    const cplx amp = cc.c.dot(orb.col(k).segment(n * mdim, mdim));
    v += gamma.occupations()(k) * std::norm(amp);
  }
  const double l = gamma.scaling().l_b;
  return std::max(0.0, v / (2.0 * std::numbers::pi * l * l));
}

HusimiField husimi_field(const DensityMatrix& gamma, int cutoff, const GridSpec& box) {
  box.validate();
  const Truncation& t = gamma.truncation();
  if (cutoff < 0 || cutoff > t.n_max()) throw ValidationError("husimi_field: cut-off outside truncation");
  HusimiField f;
  f.grid = box;
  f.cutoff = cutoff;
  // The coefficients are exact within the truncation, so every node is evaluated.
  f.levels = husimi_levels(gamma.orbitals(), gamma.occupations(), t, gamma.scaling(), box, cutoff,
                           2.0 * box.half_width);
  for (const GridField& level : f.levels) f.level_mass.push_back(level.integral());
  return f;
}

double captured_trace(const DensityMatrix& gamma, int cutoff) {
  const std::vector<double> occ = gamma.landau_occupations();
  double v = 0.0;
  for (int n = 0; n <= std::min<int>(cutoff, static_cast<int>(occ.size()) - 1); ++n) v += occ[n];
  return v;
}

double high_level_kinetic(const DensityMatrix& gamma, int cutoff, int k) {
  const std::vector<double> occ = gamma.landau_occupations();
  const ScalingParams& s = gamma.scaling();
  double v = 0.0;
  for (int n = cutoff + 1; n < static_cast<int>(occ.size()); ++n) {
    v += occ[n] * std::pow(2.0 * s.hbar * s.b * (n + 0.5), k);
  }
  return v;
}

GriddedDensity semiclassical_density(const HusimiField& field, const DensityMatrix& gamma,
                                     bool normalized) {
  const int M = field.cutoff;
  if (M > gamma.truncation().n_max() - 1) {
    throw ValidationError("semiclassical_density: cut-off must be at most N_max - 1");
  }
  GriddedDensity rho(field.grid);
  for (const GridField& level : field.levels) {
    for (std::size_t c = 0; c < rho.values.size(); ++c) rho.values[c] += level.values[c];
  }
  if (normalized) {
    const double captured = captured_trace(gamma, M);
    if (captured < 0.5) {
      throw DegenerateNormalization("Tr gamma Pi_{<=M} below 0.5: cut-off far too small for the state");
    }
    for (double& v : rho.values) v /= captured;
  }
  return rho;
}

GriddedDensity semiclassical_density(const DensityMatrix& gamma, int cutoff, const GridSpec& box,
                                     bool normalized) {
  if (cutoff > gamma.truncation().n_max() - 1) {
    throw ValidationError("semiclassical_density: cut-off must be at most N_max - 1");
  }
  return semiclassical_density(husimi_field(gamma, cutoff, box), gamma, normalized);
}

int cutoff_schedule(const ScalingParams& s, int n_max) {
  if (n_max < 3) throw ValidationError("cutoff_schedule: N_max must be at least 3");
  const int m = static_cast<int>(std::lround(std::pow(s.l_b, -6.0 / 7.0)));
  return std::clamp(m, 2, n_max - 1);
}

double semiclassical_bound(double phi_sup, double grad_l2, const DensityMatrix& gamma, int cutoff,
                           double constant) {
  if (cutoff < 1) throw ValidationError("semiclassical_bound: cut-off must be positive");
  const double M = cutoff;
  const double high = std::max(0.0, high_level_kinetic(gamma, cutoff, 1));
  const double kin = std::max(0.0, gamma.kinetic_moment(1));
  return phi_sup * std::sqrt(high / M) +
         constant * grad_l2 * std::sqrt(kin) * std::sqrt(M) * gamma.scaling().l_b;
}

void write_husimi_csv(const HusimiField& field, const std::string& path, double floor) {
  auto out = fmt::output_file(path);
  out.print("z1,z2,n,value\n");
  const GridSpec& g = field.grid;
  for (int n = 0; n <= field.cutoff; ++n) {
    const GridField& level = field.levels[n];
    for (int i2 = 0; i2 < g.n; ++i2) {
      for (int i1 = 0; i1 < g.n; ++i1) {
        const double v = level.at(i1, i2);
        if (v < floor) continue;
        out.print("{:.10g},{:.10g},{},{:.17g}\n", g.coord(i1), g.coord(i2), n, v);
      }
    }
  }
}

}  // namespace gyro
