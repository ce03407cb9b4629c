// Serial reference vs OpenMP kernels. Run with OMP_NUM_THREADS to vary the thread count.

#include <benchmark/benchmark.h>

#include <random>

#include "gyro/convolution.hpp"
#include "gyro/kernels.hpp"
#include "gyro/velocity.hpp"

using namespace gyro;

namespace {

struct Orbitals {
  ScalingParams s = make_scaling(8.0);
  Truncation t{4, 40};
  Eigen::MatrixXcd orb;
  Eigen::VectorXd occ;
  GridSpec grid;
  double radius = 0.0;

  Orbitals() {
    std::mt19937_64 rng(1);
    std::normal_distribution<double> g;
    orb.resize(t.size(), 11);
    for (Eigen::Index j = 0; j < orb.cols(); ++j) {
      for (Eigen::Index i = 0; i < orb.rows(); ++i) orb(i, j) = cplx(g(rng), g(rng));
    }
    orb /= orb.norm();
    occ = Eigen::VectorXd::Constant(11, 1.0 / 11.0);
    radius = basis_support_radius(t, s);
    grid = GridSpec{128, 1.1 * radius};
  }
};

const Orbitals& orbitals() {
  static const Orbitals o;
  return o;
}

void BM_PotentialMatrix(benchmark::State& st) {
  const Orbitals& o = orbitals();
  const PolarQuadrature q(o.t, o.s);
  const RealFunction V = [](Vec2 x) { return std::exp(-norm2(x - Vec2{0.1, 0.0})); };
  for (auto _ : st) benchmark::DoNotOptimize(potential_matrix(V, q));
}

void BM_PotentialMatrixReference(benchmark::State& st) {
  const Orbitals& o = orbitals();
  const RealFunction V = [](Vec2 x) { return std::exp(-norm2(x - Vec2{0.1, 0.0})); };
  for (auto _ : st) benchmark::DoNotOptimize(potential_matrix_reference(V, o.t, o.s, o.grid));
}

void BM_DensityOnGrid(benchmark::State& st) {
  const Orbitals& o = orbitals();
  for (auto _ : st) benchmark::DoNotOptimize(density_on_grid(o.orb, o.occ, o.t, o.s, o.grid, o.radius));
}

void BM_DensityOnGridReference(benchmark::State& st) {
  const Orbitals& o = orbitals();
  for (auto _ : st) benchmark::DoNotOptimize(density_on_grid_reference(o.orb, o.occ, o.t, o.s, o.grid));
}

void BM_HusimiLevels(benchmark::State& st) {
  const Orbitals& o = orbitals();
  for (auto _ : st) {
    benchmark::DoNotOptimize(husimi_levels(o.orb, o.occ, o.t, o.s, o.grid, 3, 2.0 * o.grid.half_width));
  }
}

void BM_HusimiLevelsReference(benchmark::State& st) {
  const Orbitals& o = orbitals();
  for (auto _ : st) benchmark::DoNotOptimize(husimi_levels_reference(o.orb, o.occ, o.t, o.s, o.grid, 3));
}

struct Markers {
  GridSpec grid{256, 3.0};
  std::vector<Vec2> positions;
  std::vector<double> weights;

  Markers() {
    std::mt19937_64 rng(2);
    std::normal_distribution<double> g(0.0, 0.5);
    for (int k = 0; k < 200000; ++k) {
      positions.push_back({g(rng), g(rng)});
      weights.push_back(1.0 / 200000.0);
    }
  }
};

const Markers& markers() {
  static const Markers m;
  return m;
}

void BM_DepositCic(benchmark::State& st) {
  const Markers& m = markers();
  for (auto _ : st) benchmark::DoNotOptimize(deposit_cic(m.positions, m.weights, m.grid));
}

void BM_DepositCicReference(benchmark::State& st) {
  const Markers& m = markers();
  for (auto _ : st) benchmark::DoNotOptimize(deposit_cic_reference(m.positions, m.weights, m.grid));
}

struct Field {
  PotentialSpec P;
  ConvolutionSolver solver;
  GridField rho;
  VelocityField v;

  static PotentialSpec potential() {
    PotentialSpec P;
    P.V.push_back({1.0, {0.2, 0.0}, 0.6});
    P.w = {0.4, 0.3};
    return P;
  }
  static GridField bump(const GridSpec& g) {
    GridField r(g);
    for (int j = 0; j < g.n; ++j) {
      for (int i = 0; i < g.n; ++i) r.at(i, j) = std::exp(-norm2(g.node(i, j)));
    }
    return r;
  }
  Field() : P(potential()), solver(markers().grid, P.w), rho(bump(markers().grid)), v(P, solver, rho) {}
};

const Field& field() {
  static const Field f;
  return f;
}

void BM_AdvanceMarkers(benchmark::State& st) {
  const Field& f = field();
  for (auto _ : st) {
    std::vector<Vec2> p = markers().positions;
    benchmark::DoNotOptimize(advance_markers_rk4(p, f.v, 0.01));
  }
}

void BM_AdvanceMarkersReference(benchmark::State& st) {
  const Field& f = field();
  for (auto _ : st) {
    std::vector<Vec2> p = markers().positions;
    benchmark::DoNotOptimize(advance_markers_rk4_reference(p, f.v, 0.01));
  }
}

}  // namespace

BENCHMARK(BM_PotentialMatrix)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PotentialMatrixReference)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DensityOnGrid)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DensityOnGridReference)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_HusimiLevels)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_HusimiLevelsReference)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DepositCic)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DepositCicReference)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_AdvanceMarkers)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_AdvanceMarkersReference)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
