#include "gyro/grid.hpp"

#include <fmt/format.h>
#include <fmt/os.h>

#include <algorithm>
#include <cmath>

#include "gyro/errors.hpp"

namespace gyro {

bool GridSpec::contains(Vec2 x) const {
  return std::abs(x.x1) <= half_width && std::abs(x.x2) <= half_width;
}

void GridSpec::validate() const {
  if (n < 4 || (n & (n - 1)) != 0) throw ValidationError("grid size must be a power of two >= 4");
  if (!(half_width > 0.0)) throw ValidationError("grid half-width must be positive");
}

double GridField::integral() const {
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum * grid.cell_area();
}

double GridField::max_abs() const {
  double m = 0.0;
  for (double v : values) m = std::max(m, std::abs(v));
  return m;
}

namespace {

// Keys cubic convolution kernel with a = -1/2.
void keys_weights(double f, double w[4]) {
  const double f2 = f * f;
  const double f3 = f2 * f;
  w[0] = -0.5 * f3 + f2 - 0.5 * f;
  w[1] = 1.5 * f3 - 2.5 * f2 + 1.0;
  w[2] = -1.5 * f3 + 2.0 * f2 + 0.5 * f;
  w[3] = 0.5 * f3 - 0.5 * f2;
}

}  // namespace

double GridField::interpolate(Vec2 x) const {
  const double h = grid.h();
  const double s1 = (x.x1 + grid.half_width) / h - 0.5;
  const double s2 = (x.x2 + grid.half_width) / h - 0.5;
  const int i1 = static_cast<int>(std::floor(s1));
  const int i2 = static_cast<int>(std::floor(s2));
  double w1[4], w2[4];
  keys_weights(s1 - i1, w1);
  keys_weights(s2 - i2, w2);
  const int n = grid.n;
  double sum = 0.0;
  for (int b = 0; b < 4; ++b) {
    const int j2 = std::clamp(i2 - 1 + b, 0, n - 1);
    double row = 0.0;
    for (int a = 0; a < 4; ++a) {
      const int j1 = std::clamp(i1 - 1 + a, 0, n - 1);
      row += w1[a] * at(j1, j2);
    }
    sum += w2[b] * row;
  }
  return sum;
}

void GridField::spread(Vec2 x, double amount) {
  const double h = grid.h();
  const double s1 = (x.x1 + grid.half_width) / h - 0.5;
  const double s2 = (x.x2 + grid.half_width) / h - 0.5;
  const int i1 = static_cast<int>(std::floor(s1));
  const int i2 = static_cast<int>(std::floor(s2));
  double w1[4], w2[4];
  keys_weights(s1 - i1, w1);
  keys_weights(s2 - i2, w2);
  const int n = grid.n;
  for (int b = 0; b < 4; ++b) {
    const int j2 = std::clamp(i2 - 1 + b, 0, n - 1);
    for (int a = 0; a < 4; ++a) {
      const int j1 = std::clamp(i1 - 1 + a, 0, n - 1);
      at(j1, j2) += amount * w1[a] * w2[b];
    }
  }
}

double GriddedDensity::boundary_mass() const {
  const int n = grid.n;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    sum += std::abs(at(i, 0)) + std::abs(at(i, n - 1));
    if (i > 0 && i < n - 1) sum += std::abs(at(0, i)) + std::abs(at(n - 1, i));
  }
  return sum * grid.cell_area();
}

void GriddedDensity::clip_negative() {
  double removed = 0.0;
  for (double& v : values) {
    if (v < 0.0) {
      removed -= v;
      v = 0.0;
    }
  }
  clip_mass += removed * grid.cell_area();
}

GriddedDensity downsample_2x2(const GriddedDensity& rho) {
  if (rho.grid.n % 2 != 0 || rho.grid.n < 8) {
    throw ValidationError("downsample_2x2: grid too small to aggregate");
  }
  GridSpec coarse{rho.grid.n / 2, rho.grid.half_width};
  GriddedDensity out(coarse);
  out.clip_mass = rho.clip_mass;
  for (int j = 0; j < coarse.n; ++j) {
    for (int i = 0; i < coarse.n; ++i) {
      const double m = rho.at(2 * i, 2 * j) + rho.at(2 * i + 1, 2 * j) + rho.at(2 * i, 2 * j + 1) +
                       rho.at(2 * i + 1, 2 * j + 1);
      // Mass is conserved: four fine cells of area h^2 collapse into one cell of area 4h^2.
      out.at(i, j) = 0.25 * m;
    }
  }
  return out;
}

double pair_with(const GriddedDensity& rho, const GridField& f) {
  if (!(rho.grid == f.grid)) throw ValidationError("pair_with: grids differ");
  double sum = 0.0;
  for (std::size_t k = 0; k < rho.values.size(); ++k) sum += rho.values[k] * f.values[k];
  return sum * rho.grid.cell_area();
}

void write_density_csv(const GriddedDensity& rho, const std::string& path) {
  auto out = fmt::output_file(path);
  out.print("x1,x2,value\n");
  for (int i2 = 0; i2 < rho.grid.n; ++i2) {
    for (int i1 = 0; i1 < rho.grid.n; ++i1) {
      const Vec2 x = rho.grid.node(i1, i2);
      out.print("{:.10g},{:.10g},{:.12e}\n", x.x1, x.x2, rho.at(i1, i2));
    }
  }
}

nlohmann::json density_to_json(const GriddedDensity& rho) {
  nlohmann::json j;
  j["grid"] = {{"n", rho.grid.n}, {"half_width", rho.grid.half_width}};
  j["cell_area"] = rho.grid.cell_area();
  j["mass"] = rho.mass();
  j["clip_mass"] = rho.clip_mass;
  j["values"] = rho.values;
  return j;
}

GriddedDensity density_from_json(const nlohmann::json& j) {
  GridSpec g{j.at("grid").at("n").get<int>(), j.at("grid").at("half_width").get<double>()};
  g.validate();
  GriddedDensity rho(g);
  rho.values = j.at("values").get<std::vector<double>>();
  if (rho.values.size() != g.cells()) throw ValidationError("density JSON: value count mismatch");
  rho.clip_mass = j.value("clip_mass", 0.0);
  return rho;
}

}  // namespace gyro
