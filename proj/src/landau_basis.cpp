#include "gyro/landau_basis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "gyro/errors.hpp"
#include "gyro/special.hpp"

namespace gyro {

namespace {

constexpr cplx kI{0.0, 1.0};

cplx ipow(int n) {
  switch (((n % 4) + 4) % 4) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
  }
}

}  // namespace

double ScalingParams::pauli_cap() const { return 2.0 * std::numbers::pi * l_b * l_b; }

ScalingParams make_scaling(double b) {
  if (!(b > 0.0) || !std::isfinite(b)) {
    throw ValidationError("make_scaling: b must be a positive finite number");
  }
  ScalingParams s;
  s.b = b;
  s.hbar = 1.0 / b;
  s.l_b = std::sqrt(s.hbar / b);
  return s;
}

Truncation::Truncation(int n_max, int m_ang) : n_max_(n_max), m_ang_(m_ang) {
  if (n_max < 0 || m_ang < 0) throw ValidationError("Truncation: bounds must be nonnegative");
}

bool Truncation::contains(BasisIndex idx) const {
  return idx.n >= 0 && idx.n <= n_max_ && idx.m >= 0 && idx.m <= m_ang_;
}

bool Truncation::interior(int i) const {
  const BasisIndex idx = index(i);
  return idx.n <= n_max_ - 1 && idx.m <= m_ang_ - 1;
}

std::vector<int> Truncation::interior_indices() const {
  std::vector<int> out;
  for (int i = 0; i < size(); ++i) {
    if (interior(i)) out.push_back(i);
  }
  return out;
}

int Truncation::angular(int i) const {
  const BasisIndex idx = index(i);
  return idx.m - idx.n;
}

double hermitian_defect(const Eigen::MatrixXcd& a) {
  const double scale = a.norm();
  if (scale == 0.0) return 0.0;
  return (a - a.adjoint()).norm() / scale;
}

CoeffMatrix::CoeffMatrix(Eigen::MatrixXcd d, MatrixTag t, Truncation tr)
    : data(std::move(d)), tag(t), truncation(tr) {
  if (data.rows() != truncation.size() || data.cols() != truncation.size()) {
    throw ValidationError("CoeffMatrix: dimension does not match truncation");
  }
  if (tag == MatrixTag::hermitian && hermitian_defect(data) > 1e-12) {
    throw ValidationError("CoeffMatrix: matrix tagged hermitian is not Hermitian");
  }
}

Eigen::MatrixXcd CoeffMatrix::interior_block() const {
  const std::vector<int> idx = truncation.interior_indices();
  const auto k = static_cast<Eigen::Index>(idx.size());
  Eigen::MatrixXcd out(k, k);
  for (Eigen::Index r = 0; r < k; ++r) {
    for (Eigen::Index c = 0; c < k; ++c) out(r, c) = data(idx[r], idx[c]);
  }
  return out;
}

cplx basis_phase(BasisIndex idx) {
  if (idx.m >= idx.n) return ipow(-idx.n);
  return ipow(idx.n) * (idx.m % 2 == 0 ? 1.0 : -1.0);
}

cplx eval_basis(BasisIndex idx, Vec2 x, const ScalingParams& s) {
  if (idx.n < 0 || idx.m < 0) throw ValidationError("eval_basis: negative index");
  const double l = s.l_b;
  const cplx u = to_complex(x) / (std::numbers::sqrt2 * l);
  const double t = std::norm(u);
  const double rho = std::sqrt(t);
  const int p = std::min(idx.n, idx.m);
  const int alpha = std::abs(idx.m - idx.n);
  const double lag = laguerre(p, alpha, t);
  if (lag == 0.0) return 0.0;
  if (alpha > 0 && rho == 0.0) return 0.0;
  double log_mag = 0.5 * (log_factorial(p) - log_factorial(p + alpha)) - 0.5 * t -
                   std::log(std::sqrt(2.0 * std::numbers::pi) * l);
  if (alpha > 0) log_mag += alpha * std::log(rho);
  const double mag = std::exp(log_mag) * lag;
  cplx angular = 1.0;
  if (alpha > 0) {
    const cplx e = u / rho;
    angular = std::pow(idx.m >= idx.n ? e : std::conj(e), alpha);
  }
  return basis_phase(idx) * mag * angular;
}

void basis_radial_profiles(double r, const Truncation& t, const ScalingParams& s,
                           std::span<double> g) {
  const int nmax = t.n_max();
  const int mmax = t.m_ang();
  const double l = s.l_b;
  const double tt = r * r / (2.0 * l * l);
  const double rho = std::sqrt(tt);
  const double base_log = -0.5 * tt - std::log(std::sqrt(2.0 * std::numbers::pi) * l);
  const int amax = std::max(nmax, mmax);
  // Direct iteration underflows once e^{-t/2} leaves double range; fall back to log space.
  const bool log_space = tt > 600.0;

  thread_local std::vector<double> lag_prev, lag_cur, lag_next;
  lag_prev.assign(amax + 1, 0.0);
  lag_cur.assign(amax + 1, 1.0);
  lag_next.resize(amax + 1);

  for (int p = 0; p <= std::min(nmax, mmax); ++p) {
    // Profiles sharing p = min(n, m): alpha = m - p on level n = p and alpha = n - p on column m = p.
    const int alpha_hi = std::max(mmax - p, nmax - p);
    double scale = log_space ? 0.0 : std::exp(base_log);
    double log_scale = base_log;
    for (int a = 0; a <= alpha_hi; ++a) {
      const double value = log_space ? std::exp(log_scale) * lag_cur[a] : scale * lag_cur[a];
      if (p + a <= mmax) g[t.flat(p, p + a)] = value;
      if (a > 0 && p + a <= nmax) g[t.flat(p + a, p)] = value;
      if (log_space) {
        log_scale += std::log(rho) - 0.5 * std::log(p + a + 1.0);
      } else {
        scale *= rho / std::sqrt(p + a + 1.0);
      }
    }
    for (int a = 0; a <= amax; ++a) {
      lag_next[a] = ((2.0 * p + 1.0 + a - tt) * lag_cur[a] - (p + a) * lag_prev[a]) / (p + 1.0);
    }
    std::swap(lag_prev, lag_cur);
    std::swap(lag_cur, lag_next);
  }
}

void eval_basis_all(Vec2 x, const Truncation& t, const ScalingParams& s, std::span<cplx> out) {
  thread_local std::vector<double> g;
  thread_local std::vector<cplx> epow;
  g.resize(t.size());
  const double r = norm(x);
  basis_radial_profiles(r, t, s, g);
  const int amax = std::max(t.n_max(), t.m_ang());
  epow.resize(amax + 1);
  const cplx e = (r > 0.0) ? to_complex(x) / r : cplx(1.0, 0.0);
  epow[0] = 1.0;
  for (int a = 1; a <= amax; ++a) epow[a] = (r > 0.0) ? epow[a - 1] * e : cplx(0.0, 0.0);
  for (int i = 0; i < t.size(); ++i) {
    const BasisIndex idx = t.index(i);
    const int ang = idx.m - idx.n;
    const cplx rot = ang >= 0 ? epow[ang] : std::conj(epow[-ang]);
    out[i] = basis_phase(idx) * g[i] * rot;
  }
}

double basis_support_radius(const Truncation& t, const ScalingParams& s) {
  const double l = s.l_b;
  std::vector<double> g(t.size());
  double peak = 0.0;
  double r = 0.0;
  const double dr = 0.25 * l;
  const double start = l * std::sqrt(2.0 * (t.n_max() + t.m_ang() + 1.0));
  for (; r <= start; r += dr) {
    basis_radial_profiles(r, t, s, g);
    for (double v : g) peak = std::max(peak, r * v * v);
  }
  for (;; r += dr) {
    basis_radial_profiles(r, t, s, g);
    double worst = 0.0;
    for (double v : g) worst = std::max(worst, r * v * v);
    if (worst < 1e-30 * peak) break;
  }
  return r;
}

CoeffMatrix ladder_matrix(Ladder kind, const Truncation& t) {
  const int dim = t.size();
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(dim, dim);
  for (int i = 0; i < dim; ++i) {
    const BasisIndex idx = t.index(i);
    switch (kind) {
      case Ladder::a:
        if (idx.n >= 1) a(t.flat(idx.n - 1, idx.m), i) = std::sqrt(static_cast<double>(idx.n));
        break;
      case Ladder::a_dag:
        if (idx.n + 1 <= t.n_max()) {
          a(t.flat(idx.n + 1, idx.m), i) = std::sqrt(idx.n + 1.0);
        }
        break;
      case Ladder::c:
        if (idx.m >= 1) a(t.flat(idx.n, idx.m - 1), i) = std::sqrt(static_cast<double>(idx.m));
        break;
      case Ladder::c_dag:
        if (idx.m + 1 <= t.m_ang()) {
          a(t.flat(idx.n, idx.m + 1), i) = std::sqrt(idx.m + 1.0);
        }
        break;
    }
  }
  return CoeffMatrix(std::move(a), MatrixTag::general, t);
}

PositionMatrices position_matrices(const Truncation& t, const ScalingParams& s) {
  const Eigen::MatrixXcd cdag = ladder_matrix(Ladder::c_dag, t).data;
  const Eigen::MatrixXcd a = ladder_matrix(Ladder::a, t).data;
  const Eigen::MatrixXcd x = std::numbers::sqrt2 * s.l_b * (cdag + kI * a);
  const Eigen::MatrixXcd xd = x.adjoint();
  Eigen::MatrixXcd x1 = 0.5 * (x + xd);
  Eigen::MatrixXcd x2 = (x - xd) / (2.0 * kI);
  return {CoeffMatrix(std::move(x1), MatrixTag::hermitian, t),
          CoeffMatrix(std::move(x2), MatrixTag::hermitian, t)};
}

CoeffMatrix kinetic_matrix(const Truncation& t, const ScalingParams& s) {
  const int dim = t.size();
  Eigen::MatrixXcd k = Eigen::MatrixXcd::Zero(dim, dim);
  for (int i = 0; i < dim; ++i) {
    k(i, i) = 2.0 * s.hbar * s.b * (t.index(i).n + 0.5);
  }
  return CoeffMatrix(std::move(k), MatrixTag::hermitian, t);
}

}  // namespace gyro
