#include "gyro/hartree.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "gyro/coherent.hpp"
#include "gyro/errors.hpp"

namespace gyro {

namespace {

constexpr double kSpectrumTol = 1e-10;
constexpr double kTraceTol = 1e-10;

Eigen::MatrixXcd psd_sqrt(const Eigen::MatrixXcd& s) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(s);
  Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
}

// Divide-and-conquer Hermitian eigensolver from LAPACK; several times faster than Eigen's
// tridiagonal QR at the basis sizes used here.
void hermitian_eigen(const Eigen::MatrixXcd& h, Eigen::VectorXd& values, Eigen::MatrixXcd& vectors) {
  const auto n = static_cast<lapack_int>(h.rows());
  vectors = h;
  values.resize(n);
  const lapack_int info = LAPACKE_zheevd(LAPACK_COL_MAJOR, 'V', 'L', n,
                                         reinterpret_cast<lapack_complex_double*>(vectors.data()), n, values.data());
  if (info != 0) throw NumericalError("Hermitian eigensolver failed to converge");
}

}  // namespace

DensityMatrix::DensityMatrix(Eigen::MatrixXcd orbitals, Eigen::VectorXd occ, ScalingParams s,
                             Truncation t, TraceCheck check)
    : orbitals_(std::move(orbitals)), occ_(std::move(occ)), s_(s), t_(t), check_(check) {
  validate();
}

void DensityMatrix::validate() {
  if (orbitals_.rows() != t_.size()) throw ValidationError("DensityMatrix: orbital size mismatch");
  if (orbitals_.cols() != occ_.size()) throw ValidationError("DensityMatrix: occupation count mismatch");
  // Nonzero spectrum of F diag(occ) F^dagger equals that of S^{1/2} diag(occ) S^{1/2}, S = F^dagger F.
  const Eigen::MatrixXcd gram = orbitals_.adjoint() * orbitals_;
  const Eigen::MatrixXcd root = psd_sqrt(gram);
  const Eigen::MatrixXcd core = root * occ_.cast<cplx>().asDiagonal() * root;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (core + core.adjoint()),
                                                     Eigen::EigenvaluesOnly);
  spectrum_ = es.eigenvalues();
  const double cap = s_.pauli_cap();
  if (spectrum_.size() > 0) {
    if (spectrum_.minCoeff() < -kSpectrumTol) {
      throw ValidationError("DensityMatrix: negative eigenvalue below -1e-10");
    }
    if (spectrum_.maxCoeff() > cap + kSpectrumTol) {
      throw ValidationError("DensityMatrix: eigenvalue exceeds the Pauli bound 2 pi l_b^2");
    }
  }
  if (check_ == TraceCheck::unit && std::abs(trace() - 1.0) > kTraceTol) {
    throw ValidationError("DensityMatrix: trace differs from 1 by more than 1e-10");
  }
}

DensityMatrix DensityMatrix::from_orbitals(Eigen::MatrixXcd orbitals, Eigen::VectorXd occ,
                                           const ScalingParams& s, const Truncation& t,
                                           TraceCheck check) {
  return DensityMatrix(std::move(orbitals), std::move(occ), s, t, check);
}

DensityMatrix DensityMatrix::from_coeffs(const CoeffMatrix& g, const ScalingParams& s,
                                         TraceCheck check) {
  if (hermitian_defect(g.data) > 1e-12) throw ValidationError("DensityMatrix: coefficients not Hermitian");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (g.data + g.data.adjoint()));
  const Eigen::VectorXd& ev = es.eigenvalues();
  const double scale = std::max(1e-300, ev.cwiseAbs().maxCoeff());
  std::vector<int> keep;
  for (int i = 0; i < ev.size(); ++i) {
    if (std::abs(ev(i)) > 1e-15 * scale) keep.push_back(i);
  }
  Eigen::MatrixXcd orb(g.data.rows(), static_cast<Eigen::Index>(keep.size()));
  Eigen::VectorXd occ(static_cast<Eigen::Index>(keep.size()));
  for (std::size_t k = 0; k < keep.size(); ++k) {
    orb.col(static_cast<Eigen::Index>(k)) = es.eigenvectors().col(keep[k]);
    occ(static_cast<Eigen::Index>(k)) = ev(keep[k]);
  }
  return DensityMatrix(std::move(orb), std::move(occ), s, g.truncation, check);
}

CoeffMatrix DensityMatrix::coeffs() const {
  Eigen::MatrixXcd g = orbitals_ * occ_.cast<cplx>().asDiagonal() * orbitals_.adjoint();
  g = 0.5 * (g + g.adjoint());
  return CoeffMatrix(std::move(g), MatrixTag::hermitian, t_);
}

double DensityMatrix::trace() const {
  double tr = 0.0;
  for (Eigen::Index k = 0; k < occ_.size(); ++k) tr += occ_(k) * orbitals_.col(k).squaredNorm();
  return tr;
}

Eigen::VectorXd DensityMatrix::spectrum() const { return spectrum_; }

double DensityMatrix::max_eigenvalue() const {
  return spectrum_.size() ? std::max(0.0, spectrum_.maxCoeff()) : 0.0;
}

double DensityMatrix::min_eigenvalue() const {
  // gamma has a kernel whenever its rank is below the dimension.
  const double m = spectrum_.size() ? spectrum_.minCoeff() : 0.0;
  return spectrum_.size() < t_.size() ? std::min(0.0, m) : m;
}

std::vector<double> DensityMatrix::landau_occupations() const {
  std::vector<double> out(t_.n_max() + 1, 0.0);
  const int mdim = t_.m_ang() + 1;
  for (int n = 0; n <= t_.n_max(); ++n) {
    double v = 0.0;
    for (Eigen::Index k = 0; k < occ_.size(); ++k) {
      v += occ_(k) * orbitals_.col(k).segment(n * mdim, mdim).squaredNorm();
    }
    out[n] = v;
  }
  return out;
}

double DensityMatrix::kinetic_moment(int k) const {
  const std::vector<double> occ = landau_occupations();
  double v = 0.0;
  for (int n = 0; n <= t_.n_max(); ++n) {
    v += occ[n] * std::pow(2.0 * s_.hbar * s_.b * (n + 0.5), k);
  }
  return v;
}

cplx DensityMatrix::expectation(const Eigen::MatrixXcd& a) const {
  const Eigen::MatrixXcd af = a * orbitals_;
  cplx v = 0.0;
  for (Eigen::Index k = 0; k < occ_.size(); ++k) v += occ_(k) * orbitals_.col(k).dot(af.col(k));
  return v;
}

DensityMatrix DensityMatrix::conjugated(const Eigen::MatrixXcd& u) const {
  return DensityMatrix(u * orbitals_, occ_, s_, t_, check_);
}

nlohmann::json observables_to_json(const Observables& o) {
  return {{"trace", o.trace},
          {"energy", o.energy},
          {"interaction_energy", o.interaction_energy},
          {"kinetic_moment_1", o.kinetic_moment_1},
          {"kinetic_moment_2", o.kinetic_moment_2},
          {"position_moment_2", o.position_moment_2},
          {"position_moment_4", o.position_moment_4},
          {"position_moment_8", o.position_moment_8},
          {"max_eigenvalue", o.max_eigenvalue},
          {"min_eigenvalue", o.min_eigenvalue},
          {"landau_occupations", o.landau_occupations}};
}

HartreeSystem::HartreeSystem(const ScalingParams& s, const Truncation& t, const GridSpec& grid,
                             const PotentialSpec& P, HartreeOptions options)
    : s_(s),
      t_(t),
      grid_(grid),
      P_(P),
      options_(options),
      quad_(t, s, options.polar_panels_per_length, options.polar_order),
      conv_(grid, P.w) {
  P_.validate();
  if (quad_.radius() + 3.0 * grid_.h() > grid_.half_width) {
    throw BoxTooSmall("grid box does not contain the support of the truncated basis");
  }
  const PotentialSpec& pot = P_;
  h_static_ = kinetic_matrix(t, s).data +
              potential_matrix([&pot](Vec2 x) { return pot.V_value(x); }, quad_);
}

Eigen::MatrixXd HartreeSystem::polar_density(const DensityMatrix& gamma) const {
  return quad_.density(gamma.orbitals(), gamma.occupations());
}

Eigen::MatrixXd HartreeSystem::polar_mean_field(const Eigen::MatrixXd& rho) const {
  const int nr = quad_.radial_nodes();
  const int nt = quad_.angular_nodes();
  if (P_.w.amplitude == 0.0) return Eigen::MatrixXd::Zero(nr, nt);
  GridField cart(grid_);
  const double inv_area = 1.0 / grid_.cell_area();
  for (int a = 0; a < nr; ++a) {
    const double wa = quad_.weight(a) * inv_area;
    for (int j = 0; j < nt; ++j) cart.spread(quad_.node(a, j), rho(a, j) * wa);
  }
  const GridField field = conv_.convolve(cart);
  Eigen::MatrixXd out(nr, nt);
#pragma omp parallel for schedule(static)
  for (int a = 0; a < nr; ++a) {
    for (int j = 0; j < nt; ++j) out(a, j) = field.interpolate(quad_.node(a, j));
  }
  return out;
}

Eigen::MatrixXcd HartreeSystem::hamiltonian(const Eigen::MatrixXd& polar_field) const {
  if (P_.w.amplitude == 0.0) return h_static_;
  return h_static_ + quad_.assemble(quad_.angular_modes(polar_field));
}

double HartreeSystem::energy(const DensityMatrix& gamma, const Eigen::MatrixXd& rho,
                             const Eigen::MatrixXd& field) const {
  double e = gamma.expectation(h_static_).real();
  double inter = 0.0;
  for (int a = 0; a < quad_.radial_nodes(); ++a) {
    inter += quad_.weight(a) * rho.row(a).dot(field.row(a));
  }
  return e + 0.5 * inter;
}

HartreeSystem::State HartreeSystem::make_state(DensityMatrix gamma) const {
  if (!(gamma.truncation() == t_)) throw ValidationError("state truncation differs from system");
  Eigen::MatrixXd rho = polar_density(gamma);
  Eigen::MatrixXd field = polar_mean_field(rho);
  const double e = energy(gamma, rho, field);
  return State{std::move(gamma), std::move(rho), std::move(field), e};
}

DensityMatrix HartreeSystem::propagate_frozen(const DensityMatrix& gamma, const Eigen::MatrixXcd& h,
                                              double dt) const {
  Eigen::VectorXd ev;
  Eigen::MatrixXcd v;
  hermitian_eigen(h, ev, v);
  const double l2 = s_.l_b * s_.l_b;
  Eigen::VectorXcd phase(ev.size());
  for (Eigen::Index i = 0; i < phase.size(); ++i) phase(i) = std::exp(cplx(0.0, -dt * ev(i) / l2));
  Eigen::MatrixXcd coef = v.adjoint() * gamma.orbitals();
  coef = phase.asDiagonal() * coef;
  return DensityMatrix::from_orbitals(v * coef, gamma.occupations(), s_, t_,
                                      std::abs(gamma.trace() - 1.0) <= kTraceTol ? TraceCheck::unit
                                                                                 : TraceCheck::any);
}

HartreeSystem::State HartreeSystem::step(const State& state, double dt) const {
  // Negative dt is allowed so that time reversal can be checked.
  if (!std::isfinite(dt) || dt == 0.0) throw ValidationError("hartree step: dt must be finite and nonzero");
  // Predictor with the mean field at the start of the step.
  const Eigen::MatrixXcd h0 = hamiltonian(state.polar_field);
  const DensityMatrix predicted = propagate_frozen(state.gamma, h0, dt);
  const Eigen::MatrixXd rho_pred = polar_density(predicted);
  // Corrector: mean field of the averaged density, applied again from the start state.
  const Eigen::MatrixXd rho_mid = 0.5 * (state.polar_density + rho_pred);
  const Eigen::MatrixXcd h1 = hamiltonian(polar_mean_field(rho_mid));
  DensityMatrix next = propagate_frozen(state.gamma, h1, dt);
  State out = make_state(std::move(next));
  if (std::abs(out.energy - state.energy) > options_.energy_drift_cap) {
    throw StepRejected("hartree step changed the energy by more than the configured cap");
  }
  return out;
}

Observables HartreeSystem::observables(const State& state) const {
  Observables o;
  const DensityMatrix& g = state.gamma;
  o.trace = g.trace();
  o.energy = state.energy;
  double inter = 0.0;
  double m2 = 0.0, m4 = 0.0, m8 = 0.0;
  for (int a = 0; a < quad_.radial_nodes(); ++a) {
    const double wa = quad_.weight(a);
    inter += wa * state.polar_density.row(a).dot(state.polar_field.row(a));
    const double mass = wa * state.polar_density.row(a).sum();
    const double r2 = quad_.radii()[a] * quad_.radii()[a];
    m2 += mass * r2;
    m4 += mass * r2 * r2;
    m8 += mass * r2 * r2 * r2 * r2;
  }
  o.interaction_energy = 0.5 * inter;
  o.kinetic_moment_1 = g.kinetic_moment(1);
  o.kinetic_moment_2 = g.kinetic_moment(2);
  o.position_moment_2 = m2;
  o.position_moment_4 = m4;
  o.position_moment_8 = m8;
  o.max_eigenvalue = g.max_eigenvalue();
  o.min_eigenvalue = g.min_eigenvalue();
  o.landau_occupations = g.landau_occupations();
  return o;
}

GriddedDensity HartreeSystem::grid_density(const DensityMatrix& gamma) const {
  return density_of(gamma, grid_);
}

double hartree_dt_cap(const PotentialSpec& P) {
  return 0.05 / (1.0 + P.V_norm(1) + P.w_norm(1));
}

GriddedDensity density_of(const DensityMatrix& gamma, const GridSpec& box) {
  box.validate();
  const double radius = basis_support_radius(gamma.truncation(), gamma.scaling());
  GriddedDensity rho = density_on_grid(gamma.orbitals(), gamma.occupations(), gamma.truncation(),
                                       gamma.scaling(), box, radius);
  const double tr = gamma.trace();
  if (std::abs(tr - rho.mass()) > 1e-8 * std::max(1.0, std::abs(tr))) {
    throw BoxTooSmall("density mass differs from the trace by more than 1e-8 (box too small or too coarse)");
  }
  if (rho.boundary_mass() > 1e-8 * std::max(1e-300, rho.mass())) {
    throw BoxTooSmall("density carries more than 1e-8 of its mass in the boundary cells");
  }
  return rho;
}

DensityMatrix hartree_step(const DensityMatrix& gamma, double dt, const PotentialSpec& P,
                           const GridSpec& box) {
  HartreeSystem sys(gamma.scaling(), gamma.truncation(), box, P);
  return sys.step(sys.make_state(gamma), dt).gamma;
}

Observables observables(const DensityMatrix& gamma, const PotentialSpec& P, const GridSpec& box) {
  HartreeSystem sys(gamma.scaling(), gamma.truncation(), box, P);
  return sys.observables(sys.make_state(gamma));
}

int pauli_minimum_states(const ScalingParams& s) {
  // Guard against 1/(2 pi l^2) landing a hair above an integer through rounding.
  const double k = 1.0 / s.pauli_cap();
  return static_cast<int>(std::ceil(k - 1e-12));
}

std::vector<Vec2> lattice_points(int K, const LatticeSpec& layout, const ScalingParams& s) {
  if (K < 1) throw ValidationError("lattice: K must be positive");
  const double a = layout.spacing * s.l_b;
  const Vec2 e1{a, 0.0};
  const Vec2 e2{0.5 * a, 0.5 * std::sqrt(3.0) * a};
  const Vec2 origin = layout.center - a * layout.offset;
  const int span = 2 * (static_cast<int>(std::ceil(std::sqrt(static_cast<double>(K)))) + 3);
  struct Candidate {
    double dist;
    double angle;
    Vec2 p;
  };
  std::vector<Candidate> cands;
  for (int j = -span; j <= span; ++j) {
    for (int i = -span; i <= span; ++i) {
      const Vec2 p = origin + static_cast<double>(i) * e1 + static_cast<double>(j) * e2;
      const Vec2 d = p - layout.center;
      // Round distances so that symmetry-equivalent points tie exactly; ties break by angle.
      const double dist = std::round(norm(d) / a * 1e9) / 1e9;
      double ang = std::atan2(d.x2, d.x1);
      if (ang < 0.0) ang += 2.0 * std::numbers::pi;
      cands.push_back({dist, std::round(ang * 1e9) / 1e9, p});
    }
  }
  std::sort(cands.begin(), cands.end(), [](const Candidate& x, const Candidate& y) {
    if (x.dist != y.dist) return x.dist < y.dist;
    return x.angle < y.angle;
  });
  std::vector<Vec2> out;
  for (int k = 0; k < K; ++k) out.push_back(cands[k].p);
  return out;
}

DensityMatrix initial_state(int K, const LatticeSpec& layout, const ScalingParams& s,
                            const Truncation& t) {
  if (K < pauli_minimum_states(s)) {
    throw ValidationError("initial_state: K is below the Pauli threshold ceil(1/(2 pi l_b^2))");
  }
  const std::vector<Vec2> pts = lattice_points(K, layout, s);
  Eigen::MatrixXcd c(t.size(), K);
  for (int k = 0; k < K; ++k) c.col(k) = coherent_vector({to_complex(pts[k]), 0}, t, s);
  // Loewdin symmetric orthonormalization: Q = C S^{-1/2}.
  const Eigen::MatrixXcd gram = c.adjoint() * c;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(gram);
  if (es.eigenvalues().minCoeff() < 1e-10) {
    throw ValidationError("initial_state: coherent states are numerically linearly dependent");
  }
  const Eigen::VectorXd inv_sqrt = es.eigenvalues().cwiseSqrt().cwiseInverse();
  const Eigen::MatrixXcd s_inv_half = es.eigenvectors() * inv_sqrt.asDiagonal() * es.eigenvectors().adjoint();
  Eigen::MatrixXcd q = c * s_inv_half;
  Eigen::VectorXd occ = Eigen::VectorXd::Constant(K, 1.0 / K);
  return DensityMatrix::from_orbitals(std::move(q), std::move(occ), s, t);
}

nlohmann::json checkpoint_to_json(const DensityMatrix& gamma, double t, const Observables& obs) {
  const Eigen::MatrixXcd g = gamma.coeffs().data;
  nlohmann::json data = nlohmann::json::array();
  for (Eigen::Index r = 0; r < g.rows(); ++r) {
    for (Eigen::Index c = 0; c < g.cols(); ++c) data.push_back({g(r, c).real(), g(r, c).imag()});
  }
  const ScalingParams& s = gamma.scaling();
  return {{"scaling", {{"b", s.b}, {"hbar", s.hbar}, {"l_b", s.l_b}}},
          {"truncation", {{"N_max", gamma.truncation().n_max()}, {"M_ang", gamma.truncation().m_ang()}}},
          {"time", t},
          {"dimension", g.rows()},
          {"matrix", std::move(data)},
          {"observables", observables_to_json(obs)}};
}

DensityMatrix checkpoint_from_json(const nlohmann::json& j) {
  const ScalingParams s = make_scaling(j.at("scaling").at("b").get<double>());
  const Truncation t(j.at("truncation").at("N_max").get<int>(), j.at("truncation").at("M_ang").get<int>());
  const auto& data = j.at("matrix");
  const auto dim = static_cast<Eigen::Index>(t.size());
  if (data.size() != static_cast<std::size_t>(dim * dim)) {
    throw ValidationError("checkpoint: matrix entry count does not match truncation");
  }
  Eigen::MatrixXcd g(dim, dim);
  std::size_t k = 0;
  for (Eigen::Index r = 0; r < dim; ++r) {
    for (Eigen::Index c = 0; c < dim; ++c, ++k) {
      g(r, c) = cplx(data[k].at(0).get<double>(), data[k].at(1).get<double>());
    }
  }
  return DensityMatrix::from_coeffs(CoeffMatrix(std::move(g), MatrixTag::hermitian, t), s,
                                    TraceCheck::any);
}

}  // namespace gyro
