#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <random>
#include <string>

#include "gyro/coherent.hpp"
#include "gyro/errors.hpp"
#include "gyro/hartree.hpp"
#include "gyro/husimi.hpp"

using namespace gyro;

namespace {

constexpr double kPi = std::numbers::pi;

GridSpec box_for(const Truncation& t, const ScalingParams& s, int n = 128) {
  const double radius = basis_support_radius(t, s);
  return GridSpec{n, 1.25 * radius + 4.0 * s.l_b};
}

DensityMatrix pure_state(const Eigen::VectorXcd& v, double weight, const ScalingParams& s, const Truncation& t) {
  Eigen::MatrixXcd orb = v.normalized();
  return DensityMatrix::from_orbitals(orb, Eigen::VectorXd::Constant(1, weight), s, t, TraceCheck::any);
}

DensityMatrix random_state(const ScalingParams& s, const Truncation& t, int rank, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Eigen::MatrixXcd a(t.size(), rank);
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    for (Eigen::Index i = 0; i < a.rows(); ++i) a(i, j) = cplx(g(rng), g(rng));
  }
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(a);
  Eigen::MatrixXcd q = qr.householderQ() * Eigen::MatrixXcd::Identity(t.size(), rank);
  return DensityMatrix::from_orbitals(q, Eigen::VectorXd::Constant(rank, 1.0 / rank), s, t);
}

Eigen::VectorXcd basis_vector(const Truncation& t, int n, int m) {
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(t.size());
  v(t.flat(n, m)) = 1.0;
  return v;
}

}  // namespace

TEST_CASE("Husimi values of a Pauli-saturated coherent state") {
  const ScalingParams s = make_scaling(4.0);
  const Truncation t(3, 40);
  const double l = s.l_b;
  const cplx z0(0.3, 0.2);
  for (int n0 : {0, 1}) {
    const Eigen::VectorXcd psi = coherent_vector({z0, n0}, t, s);
    const DensityMatrix g = pure_state(psi, s.pauli_cap(), s, t);
    CHECK(husimi_value(g, z0, n0) == doctest::Approx(1.0).epsilon(1e-9));
    if (n0 > 0) CHECK(husimi_value(g, z0, n0 - 1) <= 1e-14);
    CHECK(husimi_value(g, z0, n0 + 1) <= 1e-14);
  }
  const Eigen::VectorXcd psi = coherent_vector({z0, 0}, t, s);
  const DensityMatrix g = pure_state(psi, s.pauli_cap(), s, t);
  for (cplx d : {cplx(0.1, 0.0), cplx(-0.2, 0.15), cplx(0.05, -0.4)}) {
    // Oracle: inner product of the two coefficient vectors.
    const CoherentCoeffs a = coherent_coeffs({z0, 0}, t, s);
    const CoherentCoeffs b = coherent_coeffs({z0 + d, 0}, t, s);
    const double overlap = std::norm(a.c.dot(b.c));
    CHECK(overlap == doctest::Approx(std::exp(-std::norm(d) / (2.0 * l * l))).epsilon(1e-9));
    CHECK(husimi_value(g, z0 + d, 0) == doctest::Approx(overlap).epsilon(1e-12));
  }
  CHECK_THROWS_AS(husimi_value(g, cplx(4.0, 0.0), 0), TruncationInsufficient);
  CHECK_THROWS_AS(husimi_value(g, z0, 4), ValidationError);
}

TEST_CASE("semiclassical density examples") {
  SUBCASE("lowest-level state is fully captured at M = 0") {
    const ScalingParams s = make_scaling(4.0);
    const Truncation t(3, 40);
    const DensityMatrix g = initial_state(3, LatticeSpec{}, s, t);
    const GriddedDensity rho = semiclassical_density(g, 0, box_for(t, s), false);
    CHECK(rho.mass() == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(captured_trace(g, 0) == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("orthogonal level gives zero mass") {
    const ScalingParams s = make_scaling(1.0);
    const Truncation t(3, 20);
    const DensityMatrix g = pure_state(basis_vector(t, 1, 0), 1.0, s, t);
    const GriddedDensity rho = semiclassical_density(g, 0, box_for(t, s), false);
    CHECK(rho.mass() == 0.0);
    CHECK_THROWS_AS(semiclassical_density(g, 0, box_for(t, s), true), DegenerateNormalization);
  }
  SUBCASE("phi_00 has the same Gaussian Husimi density as its spatial density") {
    const ScalingParams s = make_scaling(1.0);
    const Truncation t(3, 20);
    const DensityMatrix g = pure_state(basis_vector(t, 0, 0), 1.0, s, t);
    const GridSpec box{64, 8.0};
    const GriddedDensity sc = semiclassical_density(g, 0, box, false);
    const GriddedDensity direct = density_of(g, box);
    double err = 0.0;
    double err_direct = 0.0;
    for (int i2 = 0; i2 < box.n; ++i2) {
      for (int i1 = 0; i1 < box.n; ++i1) {
        const Vec2 z = box.node(i1, i2);
        const double exact = std::exp(-norm2(z) / 2.0) / (2.0 * kPi);
        err = std::max(err, std::abs(sc.at(i1, i2) - exact));
        err_direct = std::max(err_direct, std::abs(direct.at(i1, i2) - exact));
      }
    }
    CHECK(err <= 1e-12);
    CHECK(err_direct <= 1e-10);
  }
  SUBCASE("cut-off bounds") {
    const ScalingParams s = make_scaling(1.0);
    const Truncation t(3, 20);
    const DensityMatrix g = pure_state(basis_vector(t, 0, 0), 1.0, s, t);
    CHECK_THROWS_AS(semiclassical_density(g, 3, GridSpec{64, 8.0}, false), ValidationError);
  }
}

TEST_CASE("Husimi field invariants on mixed states") {
  const ScalingParams s = make_scaling(1.0);
  const Truncation t(9, 12);
  const GridSpec box = box_for(t, s, 128);
  const DensityMatrix g = random_state(s, t, 5, 17);
  const HusimiField f = husimi_field(g, 8, box);
  for (int n = 0; n <= 8; ++n) {
    double lo = 1.0, hi = 0.0;
    for (double v : f.levels[n].values) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    CHECK(lo >= 0.0);
    CHECK(hi <= 1.0 + 1e-9);
  }
  // Level masses reproduce Tr gamma Pi_n only for levels well resolved by the random state's
  // angular range, which the truncation caps; compare the totals instead of each level.
  double captured = 0.0;
  for (int n = 0; n <= 8; ++n) captured += f.level_mass[n];
  CHECK(captured <= captured_trace(g, 8) + 1e-6);

  double prev = 0.0;
  for (int M = 0; M <= 9; ++M) {
    const double c = captured_trace(g, M);
    CHECK(c >= prev);
    prev = c;
  }
  CHECK(prev == doctest::Approx(1.0).epsilon(1e-12));

  for (int M : {2, 4, 8}) {
    CHECK(captured_trace(g, M) >= 1.0 - g.kinetic_moment(1) / M);
  }
}

TEST_CASE("Husimi level masses match Landau occupations for localized states") {
  const ScalingParams s = make_scaling(4.0);
  const Truncation t(8, 40);
  const DensityMatrix g = initial_state(3, LatticeSpec{}, s, t);
  // Mix in level-1 and level-2 content through a unitary rotation inside the first three levels.
  Eigen::MatrixXcd u = Eigen::MatrixXcd::Identity(t.size(), t.size());
  const double th = 0.4;
  for (int m = 0; m <= t.m_ang(); ++m) {
    const int i0 = t.flat(0, m), i1 = t.flat(1, m);
    u(i0, i0) = std::cos(th);
    u(i1, i1) = std::cos(th);
    u(i0, i1) = -std::sin(th);
    u(i1, i0) = std::sin(th);
  }
  const DensityMatrix mixed = g.conjugated(u);
  const HusimiField f = husimi_field(mixed, 7, box_for(t, s, 128));
  const std::vector<double> occ = mixed.landau_occupations();
  for (int n = 0; n <= 7; ++n) CHECK(std::abs(f.level_mass[n] - occ[n]) <= 1e-8);
  const GriddedDensity rb = semiclassical_density(f, mixed, true);
  CHECK(rb.mass() == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("weak closeness of spatial and semiclassical densities") {
  for (double b : {4.0, 8.0}) {
    const ScalingParams s = make_scaling(b);
    const Truncation t(9, b == 4.0 ? 40 : 90);
    const int K = pauli_minimum_states(s);
    const DensityMatrix g = initial_state(K, LatticeSpec{}, s, t);
    const GridSpec box = box_for(t, s, 128);
    const GriddedDensity rho = density_of(g, box);
    for (int M : {2, 4, 8}) {
      const GriddedDensity sc = semiclassical_density(g, M, box, false);
      // Gaussian bump: sup 1 and |grad phi|_{L2} = sqrt(pi).
      for (double width : {0.3, 0.6}) {
        double lhs = 0.0;
        for (int i2 = 0; i2 < box.n; ++i2) {
          for (int i1 = 0; i1 < box.n; ++i1) {
            const Vec2 x = box.node(i1, i2) - Vec2{0.1, 0.05};
            lhs += std::exp(-norm2(x) / (2 * width * width)) * (rho.at(i1, i2) - sc.at(i1, i2));
          }
        }
        lhs = std::abs(lhs) * box.cell_area();
        CHECK(lhs <= semiclassical_bound(1.0, std::sqrt(kPi), g, M));
      }
    }
  }
}

TEST_CASE("cut-off schedule") {
  CHECK(cutoff_schedule(make_scaling(1.0), 8) == 2);
  CHECK(cutoff_schedule(make_scaling(4.0), 8) == 3);
  CHECK(cutoff_schedule(make_scaling(8.0), 8) == 6);
  CHECK(cutoff_schedule(make_scaling(16.0), 8) == 7);
  CHECK(cutoff_schedule(make_scaling(16.0), 20) == 11);
  CHECK_THROWS_AS(cutoff_schedule(make_scaling(4.0), 2), ValidationError);
}

TEST_CASE("Husimi CSV export omits values below the floor") {
  const ScalingParams s = make_scaling(1.0);
  const Truncation t(3, 20);
  Eigen::MatrixXcd orb = basis_vector(t, 0, 0);
  const DensityMatrix g = DensityMatrix::from_orbitals(orb, Eigen::VectorXd::Ones(1), s, t);
  const HusimiField f = husimi_field(g, 1, GridSpec{16, 6.0});
  const std::string path = "husimi_test.csv";
  write_husimi_csv(f, path);
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  CHECK(line == "z1,z2,n,value");
  std::size_t rows = 0;
  std::size_t expected = 0;
  for (double v : f.levels[0].values) expected += v >= 1e-14;
  for (double v : f.levels[1].values) expected += v >= 1e-14;
  while (std::getline(in, line)) {
    ++rows;
    CHECK(line.find(",1,") == std::string::npos);
  }
  CHECK(rows == expected);
  CHECK(rows < 2 * f.grid.cells());
  std::remove(path.c_str());
}
