#pragma once

#include <json.hpp>
#include <string>
#include <vector>

#include "gyro/vec2.hpp"

namespace gyro {

// Cell-centred uniform grid on [-L, L]^2; node (i1, i2) sits at (-L + (i1 + 1/2) h, ...).
struct GridSpec {
  int n = 256;
  double half_width = 1.0;

  double h() const { return 2.0 * half_width / n; }
  double cell_area() const { return h() * h(); }
  double coord(int i) const { return -half_width + (i + 0.5) * h(); }
  Vec2 node(int i1, int i2) const { return {coord(i1), coord(i2)}; }
  bool contains(Vec2 x) const;
  std::size_t cells() const { return static_cast<std::size_t>(n) * n; }
  void validate() const;

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

struct GridField {
  GridSpec grid;
  std::vector<double> values;  // index i2 * n + i1

  GridField() = default;
  explicit GridField(GridSpec g) : grid(g), values(g.cells(), 0.0) {}

  double& at(int i1, int i2) { return values[static_cast<std::size_t>(i2) * grid.n + i1]; }
  double at(int i1, int i2) const { return values[static_cast<std::size_t>(i2) * grid.n + i1]; }
  double integral() const;
  double max_abs() const;
  // Keys cubic-convolution interpolation; indices are clamped at the box edge.
  double interpolate(Vec2 x) const;
  // Adjoint of interpolate: adds amount * (interpolation weight) to each stencil cell.
  void spread(Vec2 x, double amount);
};

struct GriddedDensity : GridField {
  double clip_mass = 0.0;

  GriddedDensity() = default;
  explicit GriddedDensity(GridSpec g) : GridField(g) {}

  double mass() const { return integral(); }
  // Mass carried by the outermost ring of cells.
  double boundary_mass() const;
  // Sets negative values to zero and records the removed mass in clip_mass.
  void clip_negative();
};

GriddedDensity downsample_2x2(const GriddedDensity& rho);

// Weighted pairing sum_cells f(x) rho(x) area.
double pair_with(const GriddedDensity& rho, const GridField& f);

void write_density_csv(const GriddedDensity& rho, const std::string& path);
nlohmann::json density_to_json(const GriddedDensity& rho);
GriddedDensity density_from_json(const nlohmann::json& j);

}  // namespace gyro
