#include "gyro/convolution.hpp"

#include <fftw3.h>

#include <complex>
#include <mutex>
#include <vector>

#include "gyro/errors.hpp"

namespace gyro {

namespace {

// FFTW's planner is not thread-safe; execution of existing plans is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwReal {
  double* p = nullptr;
  explicit FftwReal(std::size_t n) : p(fftw_alloc_real(n)) {}
  ~FftwReal() { fftw_free(p); }
  FftwReal(const FftwReal&) = delete;
  FftwReal& operator=(const FftwReal&) = delete;
};

struct FftwComplex {
  fftw_complex* p = nullptr;
  explicit FftwComplex(std::size_t n) : p(fftw_alloc_complex(n)) {}
  ~FftwComplex() { fftw_free(p); }
  FftwComplex(const FftwComplex&) = delete;
  FftwComplex& operator=(const FftwComplex&) = delete;
};

}  // namespace

struct ConvolutionSolver::Impl {
  int n = 0;   // physical grid
  int np = 0;  // padded grid
  std::size_t real_size = 0;
  std::size_t spec_size = 0;
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
  // Spectra of the sampled kernels w, d1 w, d2 w (scaled by h^2 / np^2).
  std::vector<std::complex<double>> kw, kd1, kd2;

  ~Impl() {
    std::lock_guard lock(planner_mutex());
    if (forward) fftw_destroy_plan(forward);
    if (backward) fftw_destroy_plan(backward);
  }

  void transform_kernel(const std::vector<double>& samples, std::vector<std::complex<double>>& out,
                        double scale) const {
    FftwReal in(real_size);
    FftwComplex spec(spec_size);
    std::copy(samples.begin(), samples.end(), in.p);
    fftw_execute_dft_r2c(forward, in.p, spec.p);
    out.resize(spec_size);
    for (std::size_t k = 0; k < spec_size; ++k) {
      out[k] = std::complex<double>(spec.p[k][0], spec.p[k][1]) * scale;
    }
  }

  GridField apply(const GridField& rho, const std::vector<std::complex<double>>& kernel) const {
    FftwReal in(real_size);
    FftwComplex spec(spec_size);
    std::fill(in.p, in.p + real_size, 0.0);
    for (int i2 = 0; i2 < n; ++i2) {
      for (int i1 = 0; i1 < n; ++i1) in.p[static_cast<std::size_t>(i2) * np + i1] = rho.at(i1, i2);
    }
    fftw_execute_dft_r2c(forward, in.p, spec.p);
    for (std::size_t k = 0; k < spec_size; ++k) {
      const std::complex<double> v = std::complex<double>(spec.p[k][0], spec.p[k][1]) * kernel[k];
      spec.p[k][0] = v.real();
      spec.p[k][1] = v.imag();
    }
    fftw_execute_dft_c2r(backward, spec.p, in.p);
    GridField out(rho.grid);
    for (int i2 = 0; i2 < n; ++i2) {
      for (int i1 = 0; i1 < n; ++i1) out.at(i1, i2) = in.p[static_cast<std::size_t>(i2) * np + i1];
    }
    return out;
  }
};

ConvolutionSolver::ConvolutionSolver(GridSpec grid, RadialGaussian w)
    : grid_(grid), w_(w), impl_(std::make_unique<Impl>()) {
  grid_.validate();
  Impl& m = *impl_;
  m.n = grid.n;
  m.np = 2 * grid.n;
  m.real_size = static_cast<std::size_t>(m.np) * m.np;
  m.spec_size = static_cast<std::size_t>(m.np) * (m.np / 2 + 1);
  {
    std::lock_guard lock(planner_mutex());
    FftwReal in(m.real_size);
    FftwComplex spec(m.spec_size);
    m.forward = fftw_plan_dft_r2c_2d(m.np, m.np, in.p, spec.p, FFTW_ESTIMATE);
    m.backward = fftw_plan_dft_c2r_2d(m.np, m.np, spec.p, in.p, FFTW_ESTIMATE);
  }
  if (!m.forward || !m.backward) throw NumericalError("FFTW planning failed");

  // Kernel sampled at offsets d = k h, k in (-n, n), stored with wrap-around on the padded grid.
  const double h = grid.h();
  std::vector<double> sw(m.real_size, 0.0), sd1(m.real_size, 0.0), sd2(m.real_size, 0.0);
  for (int k2 = -(m.n - 1); k2 <= m.n - 1; ++k2) {
    for (int k1 = -(m.n - 1); k1 <= m.n - 1; ++k1) {
      const Vec2 d{k1 * h, k2 * h};
      const std::size_t idx =
          static_cast<std::size_t>((k2 + m.np) % m.np) * m.np + static_cast<std::size_t>((k1 + m.np) % m.np);
      sw[idx] = w.value(d);
      const Vec2 g = w.gradient(d);
      sd1[idx] = g.x1;
      sd2[idx] = g.x2;
    }
  }
  const double scale = grid.cell_area() / static_cast<double>(m.real_size);
  m.transform_kernel(sw, m.kw, scale);
  m.transform_kernel(sd1, m.kd1, scale);
  m.transform_kernel(sd2, m.kd2, scale);
}

ConvolutionSolver::~ConvolutionSolver() = default;

GridField ConvolutionSolver::convolve(const GridField& rho) const {
  if (!(rho.grid == grid_)) throw ValidationError("convolve: density grid differs from solver grid");
  if (w_.amplitude == 0.0) return GridField(grid_);
  return impl_->apply(rho, impl_->kw);
}

std::array<GridField, 2> ConvolutionSolver::convolve_gradient(const GridField& rho) const {
  if (!(rho.grid == grid_)) throw ValidationError("convolve: density grid differs from solver grid");
  if (w_.amplitude == 0.0) return {GridField(grid_), GridField(grid_)};
  return {impl_->apply(rho, impl_->kd1), impl_->apply(rho, impl_->kd2)};
}

GridField mean_field(const RadialGaussian& w, const GridField& rho) {
  ConvolutionSolver solver(rho.grid, w);
  return solver.convolve(rho);
}

}  // namespace gyro
