#include "gyro/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "gyro/errors.hpp"
#include "gyro/special.hpp"

namespace gyro {

namespace {

using RowMatrixXcd = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

int next_pow2(int v) {
  int p = 1;
  while (p < v) p <<= 1;
  return p;
}

}  // namespace

PolarQuadrature::PolarQuadrature(const Truncation& t, const ScalingParams& s, int panels_per_length,
                                 int order)
    : t_(t), s_(s) {
  if (panels_per_length < 1 || order < 2) throw ValidationError("polar quadrature: bad resolution");
  const double l = s.l_b;
  radius_ = basis_support_radius(t, s);
  const double width = l / panels_per_length;
  const int panels = static_cast<int>(std::ceil(radius_ / width));
  radius_ = panels * width;
  for (int p = 0; p < panels; ++p) {
    const QuadratureRule rule = gauss_legendre(order, p * width, (p + 1) * width);
    for (int k = 0; k < order; ++k) {
      r_.push_back(rule.nodes[k]);
      wr_.push_back(rule.weights[k] * rule.nodes[k]);
    }
  }
  kmax_ = t.n_max() + t.m_ang();
  n_theta_ = next_pow2(std::max(64, 2 * kmax_ + 64));

  cos_.resize(n_theta_);
  sin_.resize(n_theta_);
  twiddle_.resize(n_theta_, kmax_ + 1);
  for (int j = 0; j < n_theta_; ++j) {
    const double th = 2.0 * std::numbers::pi * j / n_theta_;
    cos_[j] = std::cos(th);
    sin_[j] = std::sin(th);
    for (int k = 0; k <= kmax_; ++k) {
      // Reduce k j mod n_theta before forming the angle to keep twiddles exact to rounding.
      const long kj = (static_cast<long>(k) * j) % n_theta_;
      const double phi = 2.0 * std::numbers::pi * static_cast<double>(kj) / n_theta_;
      twiddle_(j, k) = cplx(std::cos(phi), std::sin(phi));
    }
  }

  const int dim = t.size();
  const int nr = radial_nodes();
  g_.resize(nr, dim);
  std::vector<double> prof(dim);
  for (int a = 0; a < nr; ++a) {
    basis_radial_profiles(r_[a], t, s, prof);
    for (int i = 0; i < dim; ++i) g_(a, i) = prof[i];
  }
  lo_.assign(dim, 0);
  hi_.assign(dim, -1);
  phase_.resize(dim);
  ang_.resize(dim);
  for (int i = 0; i < dim; ++i) {
    phase_[i] = basis_phase(t.index(i));
    ang_[i] = t.angular(i);
    double peak = 0.0;
    double norm = 0.0;
    for (int a = 0; a < nr; ++a) {
      peak = std::max(peak, std::abs(g_(a, i)) * std::sqrt(wr_[a]));
      norm += wr_[a] * g_(a, i) * g_(a, i);
    }
    norm *= 2.0 * std::numbers::pi;
    norm_defect_ = std::max(norm_defect_, std::abs(norm - 1.0));
    int lo = nr;
    int hi = -1;
    for (int a = 0; a < nr; ++a) {
      if (std::abs(g_(a, i)) * std::sqrt(wr_[a]) > 1e-18 * peak) {
        lo = std::min(lo, a);
        hi = a;
      }
    }
    lo_[i] = lo;
    hi_[i] = hi;
  }
  if (norm_defect_ > 1e-8) {
    throw BoxTooSmall("polar quadrature does not resolve the basis (norm defect above 1e-8)");
  }
}

Vec2 PolarQuadrature::node(int a, int j) const { return {r_[a] * cos_[j], r_[a] * sin_[j]}; }

double PolarQuadrature::weight(int a) const {
  return wr_[a] * 2.0 * std::numbers::pi / n_theta_;
}

Eigen::MatrixXd PolarQuadrature::sample(const RealFunction& W) const {
  const int nr = radial_nodes();
  Eigen::MatrixXd samples(nr, n_theta_);
#pragma omp parallel for schedule(static)
  for (int a = 0; a < nr; ++a) {
    for (int j = 0; j < n_theta_; ++j) samples(a, j) = W(node(a, j));
  }
  return samples;
}

Eigen::MatrixXcd PolarQuadrature::angular_modes(const Eigen::MatrixXd& samples) const {
  const int nr = radial_nodes();
  const Eigen::MatrixXcd pos =
      (samples.cast<cplx>() * twiddle_) * (2.0 * std::numbers::pi / n_theta_);
  Eigen::MatrixXcd modes(nr, 2 * kmax_ + 1);
  for (int k = 0; k <= kmax_; ++k) {
    modes.col(kmax_ + k) = pos.col(k);
    if (k > 0) modes.col(kmax_ - k) = pos.col(k).conjugate();
  }
  return modes;
}

Eigen::MatrixXd PolarQuadrature::density(const Eigen::MatrixXcd& orbitals,
                                         const Eigen::VectorXd& occ) const {
  const int nr = radial_nodes();
  const int dim = t_.size();
  const auto kdim = orbitals.cols();
  const int nmodes = 2 * kmax_ + 1;
  // Inverse transform matrix e^{i l theta_j} for l = -kmax..kmax.
  Eigen::MatrixXcd inv(nmodes, n_theta_);
  for (int k = 0; k <= kmax_; ++k) {
    for (int j = 0; j < n_theta_; ++j) {
      inv(kmax_ + k, j) = twiddle_(j, k);
      inv(kmax_ - k, j) = std::conj(twiddle_(j, k));
    }
  }
  // Rows are independent, so the result does not depend on the thread count.
  Eigen::MatrixXd rho(nr, n_theta_);
#pragma omp parallel
  {
    Eigen::MatrixXcd coef(kdim, nmodes);
#pragma omp for schedule(dynamic)
    for (int a = 0; a < nr; ++a) {
      coef.setZero();
      for (int i = 0; i < dim; ++i) {
        if (a < lo_[i] || a > hi_[i]) continue;
        coef.col(kmax_ + ang_[i]) += (phase_[i] * g_(a, i)) * orbitals.row(i).transpose();
      }
      const Eigen::MatrixXcd psi = coef * inv;
      rho.row(a) = occ.transpose() * psi.cwiseAbs2();
    }
  }
  return rho;
}

Eigen::MatrixXcd PolarQuadrature::assemble(const Eigen::MatrixXcd& modes) const {
  const int dim = t_.size();
  Eigen::MatrixXcd H(dim, dim);
  Eigen::MatrixXd wg(g_.rows(), g_.cols());
  for (int i = 0; i < dim; ++i) {
    for (int a = 0; a < g_.rows(); ++a) wg(a, i) = wr_[a] * g_(a, i);
  }
#pragma omp parallel for schedule(dynamic, 4)
  for (int i = 0; i < dim; ++i) {
    for (int j = i; j < dim; ++j) {
      const int lo = std::max(lo_[i], lo_[j]);
      const int hi = std::min(hi_[i], hi_[j]);
      cplx sum = 0.0;
      if (lo <= hi) {
        const cplx* col = modes.col(kmax_ + ang_[j] - ang_[i]).data();
        const double* gi = wg.col(i).data();
        const double* gj = g_.col(j).data();
        double re = 0.0;
        double im = 0.0;
        for (int a = lo; a <= hi; ++a) {
          const double f = gi[a] * gj[a];
          re += f * col[a].real();
          im += f * col[a].imag();
        }
        sum = cplx(re, im);
      }
      const cplx v = std::conj(phase_[i]) * phase_[j] * sum;
      if (i == j) {
        H(i, i) = v.real();
      } else {
        H(i, j) = v;
        H(j, i) = std::conj(v);
      }
    }
  }
  return H;
}

Eigen::MatrixXcd potential_matrix(const RealFunction& W, const PolarQuadrature& q) {
  return q.assemble(q.angular_modes(W));
}

Eigen::MatrixXcd potential_matrix_reference(const RealFunction& W, const Truncation& t,
                                            const ScalingParams& s, const GridSpec& grid) {
  const int dim = t.size();
  const auto npts = static_cast<Eigen::Index>(grid.cells());
  Eigen::MatrixXcd phi(npts, dim);
  Eigen::VectorXd wv(npts);
  for (int i2 = 0; i2 < grid.n; ++i2) {
    for (int i1 = 0; i1 < grid.n; ++i1) {
      const Eigen::Index p = static_cast<Eigen::Index>(i2) * grid.n + i1;
      const Vec2 x = grid.node(i1, i2);
      wv(p) = W(x) * grid.cell_area();
      for (int i = 0; i < dim; ++i) phi(p, i) = eval_basis(t.index(i), x, s);
    }
  }
  for (int i = 0; i < dim; ++i) {
    const double mass = phi.col(i).squaredNorm() * grid.cell_area();
    if (std::abs(1.0 - mass) > 1e-8) {
      throw BoxTooSmall("reference quadrature: basis mass outside box exceeds 1e-8");
    }
  }
  Eigen::MatrixXcd H = phi.adjoint() * wv.asDiagonal() * phi;
  return 0.5 * (H + H.adjoint());
}

GriddedDensity density_on_grid(const Eigen::MatrixXcd& orbitals, const Eigen::VectorXd& occ,
                               const Truncation& t, const ScalingParams& s, const GridSpec& grid,
                               double radius) {
  GriddedDensity rho(grid);
  const int dim = t.size();
  const double r2max = radius * radius;
#pragma omp parallel
  {
    RowMatrixXcd phi;
    std::vector<int> cols;
#pragma omp for schedule(dynamic)
    for (int i2 = 0; i2 < grid.n; ++i2) {
      const double y = grid.coord(i2);
      if (y * y > r2max) continue;
      cols.clear();
      for (int i1 = 0; i1 < grid.n; ++i1) {
        const double x = grid.coord(i1);
        if (x * x + y * y <= r2max) cols.push_back(i1);
      }
      if (cols.empty()) continue;
      phi.resize(static_cast<Eigen::Index>(cols.size()), dim);
      for (std::size_t p = 0; p < cols.size(); ++p) {
        eval_basis_all(grid.node(cols[p], i2), t, s,
                       std::span<cplx>(phi.row(static_cast<Eigen::Index>(p)).data(), dim));
      }
      const Eigen::MatrixXcd y_block = phi * orbitals;
      for (std::size_t p = 0; p < cols.size(); ++p) {
        double v = 0.0;
        for (Eigen::Index k = 0; k < y_block.cols(); ++k) {
          v += occ(k) * std::norm(y_block(static_cast<Eigen::Index>(p), k));
        }
        rho.at(cols[p], i2) = v;
      }
    }
  }
  rho.clip_negative();
  return rho;
}

GriddedDensity density_on_grid_reference(const Eigen::MatrixXcd& orbitals,
                                         const Eigen::VectorXd& occ, const Truncation& t,
                                         const ScalingParams& s, const GridSpec& grid) {
  GriddedDensity rho(grid);
  const int dim = t.size();
  std::vector<cplx> phi(dim);
  for (int i2 = 0; i2 < grid.n; ++i2) {
    for (int i1 = 0; i1 < grid.n; ++i1) {
      const Vec2 x = grid.node(i1, i2);
      for (int i = 0; i < dim; ++i) phi[i] = eval_basis(t.index(i), x, s);
      double v = 0.0;
      for (Eigen::Index k = 0; k < orbitals.cols(); ++k) {
        cplx amp = 0.0;
        for (int i = 0; i < dim; ++i) amp += orbitals(i, k) * phi[i];
        v += occ(k) * std::norm(amp);
      }
      rho.at(i1, i2) = v;
    }
  }
  rho.clip_negative();
  return rho;
}

namespace {

void check_levels(const Truncation& t, int levels) {
  if (levels < 0 || levels > t.n_max()) throw ValidationError("husimi: level cut-off out of range");
}

}  // namespace

std::vector<GridField> husimi_levels(const Eigen::MatrixXcd& orbitals, const Eigen::VectorXd& occ,
                                     const Truncation& t, const ScalingParams& s,
                                     const GridSpec& grid, int levels, double radius) {
  check_levels(t, levels);
  const int mdim = t.m_ang() + 1;
  const auto kdim = orbitals.cols();
  const double l = s.l_b;
  const double norm = 1.0 / (2.0 * std::numbers::pi * l * l);
  Eigen::MatrixXcd fcat(mdim, (levels + 1) * kdim);
  for (int n = 0; n <= levels; ++n) fcat.middleCols(n * kdim, kdim) = orbitals.middleRows(n * mdim, mdim);

  std::vector<GridField> out(levels + 1, GridField(grid));
  const double r2max = radius * radius;
#pragma omp parallel
  {
    RowMatrixXcd cbar;
    std::vector<int> cols;
#pragma omp for schedule(dynamic)
    for (int i2 = 0; i2 < grid.n; ++i2) {
      const double y = grid.coord(i2);
      if (y * y > r2max) continue;
      cols.clear();
      for (int i1 = 0; i1 < grid.n; ++i1) {
        const double x = grid.coord(i1);
        if (x * x + y * y <= r2max) cols.push_back(i1);
      }
      if (cols.empty()) continue;
      cbar.resize(static_cast<Eigen::Index>(cols.size()), mdim);
      for (std::size_t p = 0; p < cols.size(); ++p) {
        const cplx z = to_complex(grid.node(cols[p], i2));
        // conj(c_m) with c_m = e^{-|z|^2/4l^2} (zbar / sqrt2 l)^m / sqrt(m!)
        cplx c = std::exp(-std::norm(z) / (4.0 * l * l));
        const cplx ratio = z / (std::numbers::sqrt2 * l);
        for (int m = 0; m < mdim; ++m) {
          cbar(static_cast<Eigen::Index>(p), m) = c;
          c *= ratio / std::sqrt(m + 1.0);
        }
      }
      const Eigen::MatrixXcd g = cbar * fcat;
      for (std::size_t p = 0; p < cols.size(); ++p) {
        for (int n = 0; n <= levels; ++n) {
          double v = 0.0;
          for (Eigen::Index k = 0; k < kdim; ++k) {
            v += occ(k) * std::norm(g(static_cast<Eigen::Index>(p), n * kdim + k));
          }
          out[n].at(cols[p], i2) = std::max(0.0, norm * v);
        }
      }
    }
  }
  return out;
}

std::vector<GridField> husimi_levels_reference(const Eigen::MatrixXcd& orbitals,
                                               const Eigen::VectorXd& occ, const Truncation& t,
                                               const ScalingParams& s, const GridSpec& grid,
                                               int levels) {
  check_levels(t, levels);
  const int mdim = t.m_ang() + 1;
  const double l = s.l_b;
  const double norm = 1.0 / (2.0 * std::numbers::pi * l * l);
  std::vector<GridField> out(levels + 1, GridField(grid));
  std::vector<cplx> c(mdim);
  for (int i2 = 0; i2 < grid.n; ++i2) {
    for (int i1 = 0; i1 < grid.n; ++i1) {
      const cplx z = to_complex(grid.node(i1, i2));
      const double tz = std::norm(z) / (2.0 * l * l);
      for (int m = 0; m < mdim; ++m) {
        if (m > 0 && tz == 0.0) {
          c[m] = 0.0;
          continue;
        }
        const double logmag = -0.5 * tz + (m > 0 ? 0.5 * m * std::log(tz) : 0.0) -
                              0.5 * std::lgamma(m + 1.0);
        const cplx e = std::abs(z) > 0.0 ? std::conj(z) / std::abs(z) : cplx(1.0, 0.0);
        c[m] = std::exp(logmag) * std::pow(e, m);
      }
      for (int n = 0; n <= levels; ++n) {
        double v = 0.0;
        for (Eigen::Index k = 0; k < orbitals.cols(); ++k) {
          cplx amp = 0.0;
          for (int m = 0; m < mdim; ++m) amp += std::conj(c[m]) * orbitals(t.flat(n, m), k);
          v += occ(k) * std::norm(amp);
        }
        out[n].at(i1, i2) = std::max(0.0, norm * v);
      }
    }
  }
  return out;
}

namespace {

struct CicStencil {
  int i1, i2;
  double f1, f2;
};

CicStencil cic_stencil(Vec2 x, const GridSpec& grid) {
  const double h = grid.h();
  const double s1 = (x.x1 + grid.half_width) / h - 0.5;
  const double s2 = (x.x2 + grid.half_width) / h - 0.5;
  const int i1 = static_cast<int>(std::floor(s1));
  const int i2 = static_cast<int>(std::floor(s2));
  return {i1, i2, s1 - i1, s2 - i2};
}

// Out-of-range stencil points fold onto the nearest edge cell so mass is never lost.
inline void cic_add(std::vector<double>& buf, const GridSpec& grid, Vec2 x, double w) {
  const CicStencil st = cic_stencil(x, grid);
  const int n = grid.n;
  const int a1 = std::clamp(st.i1, 0, n - 1);
  const int b1 = std::clamp(st.i1 + 1, 0, n - 1);
  const int a2 = std::clamp(st.i2, 0, n - 1);
  const int b2 = std::clamp(st.i2 + 1, 0, n - 1);
  const auto idx = [n](int i, int j) { return static_cast<std::size_t>(j) * n + i; };
  buf[idx(a1, a2)] += w * (1.0 - st.f1) * (1.0 - st.f2);
  buf[idx(b1, a2)] += w * st.f1 * (1.0 - st.f2);
  buf[idx(a1, b2)] += w * (1.0 - st.f1) * st.f2;
  buf[idx(b1, b2)] += w * st.f1 * st.f2;
}

void check_markers(const std::vector<Vec2>& positions, const std::vector<double>& weights) {
  if (positions.size() != weights.size()) throw ValidationError("deposit: size mismatch");
}

}  // namespace

GriddedDensity deposit_cic(const std::vector<Vec2>& positions, const std::vector<double>& weights,
                           const GridSpec& grid) {
  check_markers(positions, weights);
  const std::size_t cells = grid.cells();
  const long count = static_cast<long>(positions.size());
  // A fixed chunk count, merged in chunk order, keeps the sum independent of the thread count.
  constexpr int kChunks = 16;
  std::vector<std::vector<double>> buffers(kChunks);
#pragma omp parallel for schedule(dynamic)
  for (int c = 0; c < kChunks; ++c) {
    std::vector<double>& buf = buffers[c];
    buf.assign(cells, 0.0);
    const long begin = count * c / kChunks;
    const long end = count * (c + 1) / kChunks;
    for (long k = begin; k < end; ++k) cic_add(buf, grid, positions[k], weights[k]);
  }
  GriddedDensity rho(grid);
  const double inv_area = 1.0 / grid.cell_area();
  for (std::size_t c = 0; c < cells; ++c) {
    double sum = 0.0;
    for (const auto& buf : buffers) sum += buf[c];
    rho.values[c] = sum * inv_area;
  }
  return rho;
}

GriddedDensity deposit_cic_reference(const std::vector<Vec2>& positions,
                                     const std::vector<double>& weights, const GridSpec& grid) {
  check_markers(positions, weights);
  std::vector<double> buf(grid.cells(), 0.0);
  for (std::size_t k = 0; k < positions.size(); ++k) cic_add(buf, grid, positions[k], weights[k]);
  GriddedDensity rho(grid);
  const double inv_area = 1.0 / grid.cell_area();
  for (std::size_t c = 0; c < buf.size(); ++c) rho.values[c] = buf[c] * inv_area;
  return rho;
}

namespace {

// Returns false if a stage left the box.
bool rk4_marker(Vec2& x, const VelocityField& v, double dt) {
  if (!v.inside(x)) return false;
  const Vec2 k1 = v(x);
  const Vec2 x2 = x + (0.5 * dt) * k1;
  if (!v.inside(x2)) return false;
  const Vec2 k2 = v(x2);
  const Vec2 x3 = x + (0.5 * dt) * k2;
  if (!v.inside(x3)) return false;
  const Vec2 k3 = v(x3);
  const Vec2 x4 = x + dt * k3;
  if (!v.inside(x4)) return false;
  const Vec2 k4 = v(x4);
  const Vec2 next = x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  if (!v.inside(next)) return false;
  x = next;
  return true;
}

}  // namespace

long advance_markers_rk4(std::vector<Vec2>& positions, const VelocityField& v, double dt) {
  const long count = static_cast<long>(positions.size());
  long first_bad = count;
#pragma omp parallel for schedule(static) reduction(min : first_bad)
  for (long k = 0; k < count; ++k) {
    if (!rk4_marker(positions[k], v, dt)) first_bad = std::min(first_bad, k);
  }
  return first_bad == count ? -1 : first_bad;
}

long advance_markers_rk4_reference(std::vector<Vec2>& positions, const VelocityField& v,
                                   double dt) {
  long first_bad = -1;
  for (std::size_t k = 0; k < positions.size(); ++k) {
    if (!rk4_marker(positions[k], v, dt) && first_bad < 0) first_bad = static_cast<long>(k);
  }
  return first_bad;
}

}  // namespace gyro
