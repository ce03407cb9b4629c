#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>
#include <random>

#include "gyro/coherent.hpp"
#include "gyro/errors.hpp"
#include "gyro/landau_basis.hpp"

using namespace gyro;

namespace {

constexpr double kPi = std::numbers::pi;
const cplx kI{0.0, 1.0};

// Midpoint rule on [-L, L]^2 centred at c; spectrally accurate for Gaussian integrands.
template <class F>
cplx grid_integral(F f, Vec2 c, double L, int n) {
  const double h = 2.0 * L / n;
  cplx sum = 0.0;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) sum += f(Vec2{c.x1 - L + (i + 0.5) * h, c.x2 - L + (j + 0.5) * h});
  }
  return sum * h * h;
}

std::array<cplx, 2> fd_perp_gradient(auto kernel, cplx z, double eps) {
  const cplx d1 = (kernel(z + eps) - kernel(z - eps)) / (2.0 * eps);
  const cplx d2 = (kernel(z + kI * eps) - kernel(z - kI * eps)) / (2.0 * eps);
  return {-d2, d1};
}

}  // namespace

TEST_CASE("eval_coherent basic values") {
  const ScalingParams s1 = make_scaling(1.0);
  CHECK(eval_coherent({0.0, 0}, {0.0, 0.0}, s1).real() == doctest::Approx(1.0 / std::sqrt(2.0 * kPi)));
  const cplx z{0.4, -0.3};
  CHECK(std::abs(eval_coherent({z, 1}, to_vec(z), s1)) == 0.0);
  // psi_{0,n} coincides with phi_{n,0}.
  const ScalingParams s = make_scaling(4.0);
  for (int n = 0; n <= 5; ++n) {
    for (Vec2 x : {Vec2{0.1, 0.2}, Vec2{-0.3, 0.05}}) {
      CHECK(std::abs(eval_coherent({0.0, n}, x, s) - eval_basis({n, 0}, x, s)) < 1e-12);
    }
  }
  CHECK_THROWS_AS(eval_coherent({0.0, -1}, {0.0, 0.0}, s1), ValidationError);
}

TEST_CASE("coherent states are normalized") {
  const ScalingParams s = make_scaling(1.0);
  const cplx z{0.7, -0.4};
  for (int n = 0; n <= 8; ++n) {
    const double L = 8.0 + 2.0 * std::sqrt(n + 1.0);
    const cplx norm2 = grid_integral([&](Vec2 x) { return std::norm(eval_coherent({z, n}, x, s)); },
                                     to_vec(z), L, 360);
    CHECK(std::abs(norm2 - 1.0) < 1e-8);
  }
}

TEST_CASE("coherent coefficients") {
  const ScalingParams s = make_scaling(4.0);
  const Truncation t(4, 40);
  SUBCASE("z = 0") {
    const CoherentCoeffs cc = coherent_coeffs({0.0, 2}, t, s);
    CHECK(cc.c(0) == cplx(1.0));
    for (int m = 1; m <= 40; ++m) CHECK(cc.c(m) == cplx(0.0));
    CHECK(cc.tail == 0.0);
  }
  SUBCASE("Poisson(1) weights at |z| = sqrt2 l") {
    const cplx z = std::polar(std::numbers::sqrt2 * s.l_b, 0.9);
    const CoherentCoeffs cc = coherent_coeffs({z, 0}, t, s);
    double sum = 0.0;
    double fact = 1.0;
    for (int m = 0; m <= 40; ++m) {
      if (m > 0) fact *= m;
      CHECK(std::norm(cc.c(m)) == doctest::Approx(std::exp(-1.0) / fact).epsilon(1e-13));
      sum += std::norm(cc.c(m));
    }
    CHECK(sum + cc.tail == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(cc.tail < 1e-40);
  }
  SUBCASE("tail rejection") {
    const cplx z{2.0, 0.0};  // |z|^2 / 2l^2 = 32
    CHECK_THROWS_AS(coherent_coeffs({z, 0}, Truncation(2, 20), s), TruncationInsufficient);
    const CoherentCoeffs cc = coherent_coeffs_unchecked(z, 20, s);
    double kept = 0.0;
    for (int m = 0; m <= 20; ++m) kept += std::norm(cc.c(m));
    CHECK(cc.tail == doctest::Approx(1.0 - kept).epsilon(1e-12));
    CHECK_THROWS_AS(coherent_coeffs({0.0, 5}, Truncation(4, 4), s), ValidationError);
  }
}

TEST_CASE("quadrature overlaps match the coefficients") {
  const ScalingParams s = make_scaling(1.0);
  const Truncation t(4, 10);
  const cplx z{0.8, -0.5};
  const double L = 13.0;
  const int n = 400;
  const double h = 2.0 * L / n;
  std::vector<cplx> basis(t.size());
  for (int level = 0; level <= 4; ++level) {
    Eigen::VectorXcd overlap = Eigen::VectorXcd::Zero(t.size());
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < n; ++i) {
        const Vec2 x{-L + (i + 0.5) * h, -L + (j + 0.5) * h};
        eval_basis_all(x, t, s, basis);
        const cplx psi = eval_coherent({z, level}, x, s);
        for (int k = 0; k < t.size(); ++k) overlap(k) += std::conj(basis[k]) * psi;
      }
    }
    overlap *= h * h;
    const CoherentCoeffs cc = coherent_coeffs_unchecked(z, 10, s);
    for (int k = 0; k < t.size(); ++k) {
      const BasisIndex idx = t.index(k);
      const cplx expected = idx.n == level ? cc.c(idx.m) : cplx(0.0);
      CHECK(std::abs(overlap(k) - expected) < 1e-8);
    }
  }
}

TEST_CASE("projector kernels") {
  const ScalingParams s = make_scaling(2.0);
  const double l = s.l_b;
  const cplx z{0.3, 0.2};
  CHECK(projector_kernel({z, 0}, to_vec(z), to_vec(z), s).real() ==
        doctest::Approx(1.0 / (2.0 * kPi * l * l)).epsilon(1e-14));
  for (int n = 1; n <= 4; ++n) CHECK(std::abs(projector_kernel({z, n}, to_vec(z), to_vec(z), s)) == 0.0);

  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    const Vec2 x{u(rng), u(rng)};
    const Vec2 y{u(rng), u(rng)};
    const int n = trial % 7;
    const cplx k = projector_kernel({z, n}, x, y, s);
    const cplx rank_one = eval_coherent({z, n}, x, s) * std::conj(eval_coherent({z, n}, y, s));
    CHECK(std::abs(k - rank_one) <= 1e-12 * std::max(std::abs(k), 1e-300) + 1e-300);
    CHECK(k == std::conj(projector_kernel({z, n}, y, x, s)));
    CHECK(pi_z_kernel(cplx(u(rng), u(rng)), x, x, s).real() ==
          doctest::Approx(1.0 / (2.0 * kPi * l * l)).epsilon(1e-14));
  }
}

TEST_CASE("partial sums converge to the full guiding-centre projector") {
  const ScalingParams s = make_scaling(1.0);
  const cplx z{0.2, -0.6};
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> r(0.0, 2.0);
  std::uniform_real_distribution<double> a(0.0, 2.0 * kPi);
  for (int trial = 0; trial < 30; ++trial) {
    const Vec2 x = to_vec(z + std::polar(r(rng), a(rng)));
    const Vec2 y = to_vec(z + std::polar(r(rng), a(rng)));
    CHECK(std::abs(truncated_projector_kernel(z, 40, x, y, s) - pi_z_kernel(z, x, y, s)) <= 1e-6);
  }
}

TEST_CASE("z-derivative of the full projector kernel") {
  const ScalingParams s = make_scaling(2.0);
  const double l = s.l_b;
  const Vec2 x{0.3, -0.1};
  const Vec2 y{-0.2, 0.25};
  const cplx z{0.1, 0.15};
  const auto fd = fd_perp_gradient([&](cplx w) { return pi_z_kernel(w, x, y, s); }, z, 1e-4 * l);
  const cplx pi = pi_z_kernel(z, x, y, s);
  const Vec2 d = y - x;
  const cplx exact1 = d.x1 / (kI * l * l) * pi;
  const cplx exact2 = d.x2 / (kI * l * l) * pi;
  const double scale = std::max(std::abs(exact1), std::abs(exact2));
  CHECK(std::abs(fd[0] - exact1) <= 1e-5 * scale);
  CHECK(std::abs(fd[1] - exact2) <= 1e-5 * scale);
}

TEST_CASE("z-derivative of the truncated projector kernel has a boundary dyad") {
  const ScalingParams s = make_scaling(2.0);
  const double l = s.l_b;
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-0.6, 0.6);
  for (int M : {2, 5}) {
    for (int trial = 0; trial < 10; ++trial) {
      const Vec2 x{u(rng), u(rng)};
      const Vec2 y{u(rng), u(rng)};
      const cplx z{u(rng), u(rng)};
      const auto fd = fd_perp_gradient(
          [&](cplx w) { return truncated_projector_kernel(w, M, x, y, s); }, z, 1e-4 * l);
      const auto exact = truncated_projector_perp_gradient(z, M, x, y, s);
      const double scale = std::max(std::abs(exact[0]), std::abs(exact[1]));
      CHECK(std::abs(fd[0] - exact[0]) <= 1e-4 * scale);
      CHECK(std::abs(fd[1] - exact[1]) <= 1e-4 * scale);
    }
  }
}

TEST_CASE("guiding-centre eigenrelation in coefficient space") {
  const ScalingParams s = make_scaling(4.0);
  for (int m_ang : {10, 20, 40}) {
    for (cplx z : {cplx(0.3, 0.2), cplx(-0.5, 0.4), cplx(0.9, -0.6)}) {
      const CoherentCoeffs cc = coherent_coeffs_unchecked(z, m_ang, s);
      const cplx alpha = std::conj(z) / (std::numbers::sqrt2 * s.l_b);
      double interior = 0.0;
      double full = 0.0;
      for (int m = 0; m <= m_ang; ++m) {
        const cplx cm = m < m_ang ? std::sqrt(m + 1.0) * cc.c(m + 1) : cplx(0.0);
        const double r2 = std::norm(cm - alpha * cc.c(m));
        if (m < m_ang) interior += r2;
        full += r2;
      }
      CHECK(std::sqrt(interior) <= 10.0 * cc.tail + 1e-14);
      CHECK(full <= (m_ang + 1.0) * cc.tail * (1.0 + 1e-12) + 1e-28);
    }
  }
}

TEST_CASE("resolution of identity by z-quadrature") {
  for (double b : {1.0, 4.0}) {
    const ScalingParams s = make_scaling(b);
    const double l = s.l_b;
    const int m_ang = 20;
    const double R = (std::sqrt(2.0 * m_ang) + 6.0) * l;
    const double h = l / 3.0;
    const int n = static_cast<int>(std::ceil(2.0 * R / h));
    Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(m_ang + 1, m_ang + 1);
    for (int j = 0; j <= n; ++j) {
      for (int i = 0; i <= n; ++i) {
        const cplx z{-R + i * h, -R + j * h};
        const CoherentCoeffs cc = coherent_coeffs_unchecked(z, m_ang, s);
        acc += cc.c * cc.c.adjoint();
      }
    }
    acc *= h * h / (2.0 * kPi * l * l);
    const int half = m_ang / 2;
    const Eigen::MatrixXcd block = acc.topLeftCorner(half + 1, half + 1);
    CHECK((block - Eigen::MatrixXcd::Identity(half + 1, half + 1)).cwiseAbs().maxCoeff() <= 1e-6);
  }
}

TEST_CASE("odd Gaussian moments") {
  CHECK(odd_gaussian_moment(0, 1.3) == doctest::Approx(std::exp(-0.5 * 1.69)).epsilon(1e-15));
  CHECK(odd_gaussian_moment(1, 1.0) == doctest::Approx(1.81959).epsilon(1e-5));
  CHECK(odd_gaussian_moment(1, 1.0) == doctest::Approx(3.0 * std::exp(-0.5)).epsilon(1e-15));
  using boost::math::quadrature::gauss_kronrod;
  for (int n = 0; n <= 6; ++n) {
    for (double a : {0.0, 1.0, 3.0}) {
      auto f = [n](double t) { return std::pow(t, 2 * n + 1) * std::exp(-0.5 * t * t); };
      const double ref = gauss_kronrod<double, 61>::integrate(f, a, a + 40.0, 15, 1e-14);
      CHECK(odd_gaussian_moment(n, a) == doctest::Approx(ref).epsilon(1e-10));
    }
  }
}

TEST_CASE("L1 norms of coherent states") {
  using boost::math::quadrature::gauss_kronrod;
  const ScalingParams s = make_scaling(8.0);
  const double l = s.l_b;
  const double limit = std::pow(2.0, 1.25) * std::pow(kPi, 0.75);
  const cplx z{0.2, 0.1};
  double prev = 0.0;
  for (int n = 0; n <= 30; ++n) {
    auto radial = [&](double r) {
      return 2.0 * kPi * r * std::abs(eval_coherent({z, n}, to_vec(z + r), s));
    };
    const double quad = gauss_kronrod<double, 61>::integrate(radial, 0.0, 20.0 * l, 15, 1e-13);
    CHECK(quad == doctest::Approx(coherent_l1_norm(n, s)).epsilon(1e-9));
    const double ratio = quad / (std::pow(n + 1.0, 0.25) * l);
    CHECK(ratio <= limit);
    CHECK(ratio > prev);
    prev = ratio;
  }
  CHECK(prev == doctest::Approx(limit).epsilon(0.01));
}
