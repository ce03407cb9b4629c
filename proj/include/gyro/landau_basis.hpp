#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "gyro/vec2.hpp"

namespace gyro {

struct ScalingParams {
  double b = 1.0;
  double hbar = 1.0;
  double l_b = 1.0;

  double pauli_cap() const;
};

ScalingParams make_scaling(double b);

struct BasisIndex {
  int n = 0;
  int m = 0;
  friend bool operator==(BasisIndex, BasisIndex) = default;
};

// Index set {0..N_max} x {0..M_ang}, flattened level-major: i = n (M_ang + 1) + m.
class Truncation {
 public:
  Truncation(int n_max, int m_ang);

  int n_max() const { return n_max_; }
  int m_ang() const { return m_ang_; }
  int size() const { return (n_max_ + 1) * (m_ang_ + 1); }
  int flat(BasisIndex idx) const { return idx.n * (m_ang_ + 1) + idx.m; }
  int flat(int n, int m) const { return n * (m_ang_ + 1) + m; }
  BasisIndex index(int i) const { return {i / (m_ang_ + 1), i % (m_ang_ + 1)}; }
  bool contains(BasisIndex idx) const;
  // Indices whose ladder images stay inside the truncation.
  bool interior(int i) const;
  std::vector<int> interior_indices() const;
  // Angular momentum label m - n: phi_{n,m} picks up e^{i(m-n)theta} under rotation.
  int angular(int i) const;

  friend bool operator==(const Truncation&, const Truncation&) = default;

 private:
  int n_max_;
  int m_ang_;
};

enum class MatrixTag { hermitian, general };

struct CoeffMatrix {
  CoeffMatrix(Eigen::MatrixXcd data, MatrixTag tag, Truncation trunc);

  Eigen::MatrixXcd data;
  MatrixTag tag;
  Truncation truncation;

  bool trusted(int i) const { return truncation.interior(i); }
  // Restriction to interior indices, where truncated ladder algebra is exact.
  Eigen::MatrixXcd interior_block() const;
};

double hermitian_defect(const Eigen::MatrixXcd& a);

cplx eval_basis(BasisIndex idx, Vec2 x, const ScalingParams& s);

// phi_{n,m}(r, theta) = basis_phase(n, m) * g_{n,m}(r) * e^{i (m - n) theta}, g real.
cplx basis_phase(BasisIndex idx);

// Fills g[i] = g_{n,m}(r) for every flattened index; `g` must have trunc.size() entries.
void basis_radial_profiles(double r, const Truncation& t, const ScalingParams& s,
                           std::span<double> g);

// Fills out[i] = phi_i(x) for every flattened index.
void eval_basis_all(Vec2 x, const Truncation& t, const ScalingParams& s,
                    std::span<cplx> out);

// Radius beyond which every basis function of the truncation is below ~1e-17 of its peak.
double basis_support_radius(const Truncation& t, const ScalingParams& s);

enum class Ladder { a, a_dag, c, c_dag };

CoeffMatrix ladder_matrix(Ladder kind, const Truncation& t);

struct PositionMatrices {
  CoeffMatrix X1;
  CoeffMatrix X2;
};

PositionMatrices position_matrices(const Truncation& t, const ScalingParams& s);

CoeffMatrix kinetic_matrix(const Truncation& t, const ScalingParams& s);

}  // namespace gyro
