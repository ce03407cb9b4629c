#include "gyro/coherent.hpp"

#include <cmath>
#include <numbers>
#include <utility>

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

// (w)^n / sqrt(n!) evaluated in log space for the modulus.
cplx scaled_power(cplx w, int n) {
  if (n == 0) return 1.0;
  const double r = std::abs(w);
  if (r == 0.0) return 0.0;
  const double mag = std::exp(n * std::log(r) - 0.5 * log_factorial(n));
  return mag * std::pow(w / r, n);
}

}  // namespace

cplx eval_coherent(const CoherentLabel& lab, Vec2 x, const ScalingParams& s) {
  if (lab.n < 0) throw ValidationError("eval_coherent: negative level");
  const double l = s.l_b;
  const Vec2 d = x - to_vec(lab.z);
  const cplx w = std::conj(to_complex(d)) / (std::numbers::sqrt2 * l);
  const double zperp_x = dot(perp(to_vec(lab.z)), x);
  const cplx expo = (-norm2(d) + 2.0 * kI * zperp_x) / (4.0 * l * l);
  return ipow(lab.n) / (std::sqrt(2.0 * std::numbers::pi) * l) * scaled_power(w, lab.n) *
         std::exp(expo);
}

CoherentCoeffs coherent_coeffs_unchecked(cplx z, int m_ang, const ScalingParams& s) {
  const double l = s.l_b;
  const double tz = std::norm(z) / (2.0 * l * l);
  CoherentCoeffs out;
  out.c.resize(m_ang + 1);
  const double r = std::abs(z);
  const cplx e = r > 0.0 ? std::conj(z) / r : cplx(1.0, 0.0);
  cplx rot = 1.0;
  for (int m = 0; m <= m_ang; ++m) {
    double logmag = -0.5 * tz - 0.5 * log_factorial(m);
    if (m > 0) logmag += 0.5 * m * std::log(tz);
    out.c(m) = (m > 0 && tz == 0.0) ? cplx(0.0) : std::exp(logmag) * rot;
    rot *= e;
  }
  // Poisson(tz) mass above m_ang, summed term by term.
  double tail = 0.0;
  if (tz > 0.0) {
    for (int m = m_ang + 1;; ++m) {
      const double term = std::exp(-tz + m * std::log(tz) - log_factorial(m));
      tail += term;
      if (m > tz && term < 1e-18 * std::max(tail, 1e-300)) break;
      if (m > m_ang + 100000) break;
    }
  }
  out.tail = tail;
  return out;
}

CoherentCoeffs coherent_coeffs(const CoherentLabel& lab, const Truncation& t,
                               const ScalingParams& s, double tail_tolerance) {
  if (lab.n < 0 || lab.n > t.n_max()) throw ValidationError("coherent_coeffs: level outside truncation");
  CoherentCoeffs out = coherent_coeffs_unchecked(lab.z, t.m_ang(), s);
  if (out.tail > tail_tolerance) {
    throw TruncationInsufficient("coherent state tail exceeds tolerance: increase M_ang", out.tail);
  }
  return out;
}

Eigen::VectorXcd coherent_vector(const CoherentLabel& lab, const Truncation& t,
                                 const ScalingParams& s, double tail_tolerance) {
  const CoherentCoeffs cc = coherent_coeffs(lab, t, s, tail_tolerance);
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(t.size());
  for (int m = 0; m <= t.m_ang(); ++m) v(t.flat(lab.n, m)) = cc.c(m);
  return v;
}

cplx projector_kernel(const CoherentLabel& lab, Vec2 x, Vec2 y, const ScalingParams& s) {
  // Evaluate in a canonical argument order so that Pi(x,y) = conj(Pi(y,x)) holds bitwise.
  if (std::pair(y.x1, y.x2) < std::pair(x.x1, x.x2)) return std::conj(projector_kernel(lab, y, x, s));
  const double l = s.l_b;
  const Vec2 z = to_vec(lab.z);
  const cplx prod = std::conj(to_complex(x - z)) * to_complex(y - z) / (2.0 * l * l);
  cplx power = 1.0;
  if (lab.n > 0) {
    const double r = std::abs(prod);
    power = (r == 0.0) ? cplx(0.0)
                       : std::exp(lab.n * std::log(r) - log_factorial(lab.n)) * std::pow(prod / r, lab.n);
  }
  const cplx expo =
      (-(norm2(x - z) + norm2(y - z)) + 2.0 * kI * dot(perp(z), x - y)) / (4.0 * l * l);
  return power * std::exp(expo) / (2.0 * std::numbers::pi * l * l);
}

cplx truncated_projector_kernel(cplx z, int M, Vec2 x, Vec2 y, const ScalingParams& s) {
  cplx sum = 0.0;
  for (int n = 0; n <= M; ++n) sum += projector_kernel({z, n}, x, y, s);
  return sum;
}

cplx pi_z_kernel(cplx z, Vec2 x, Vec2 y, const ScalingParams& s) {
  const double l = s.l_b;
  const Vec2 zv = to_vec(z);
  const cplx expo =
      (-norm2(x - y) + 2.0 * kI * (dot(perp(x), y) + 2.0 * dot(perp(zv), x - y))) / (4.0 * l * l);
  return std::exp(expo) / (2.0 * std::numbers::pi * l * l);
}

std::array<cplx, 2> truncated_projector_perp_gradient(cplx z, int M, Vec2 x, Vec2 y,
                                                      const ScalingParams& s) {
  const double l = s.l_b;
  const cplx pi_m = truncated_projector_kernel(z, M, x, y, s);
  const Vec2 d = x - y;
  std::array<cplx, 2> out{kI * d.x1 / (l * l) * pi_m, kI * d.x2 / (l * l) * pi_m};
  // Dyads |psi_M><psi_{M+1}| and |psi_{M+1}><psi_M| as kernels.
  const cplx up = eval_coherent({z, M}, x, s) * std::conj(eval_coherent({z, M + 1}, y, s));
  const cplx down = eval_coherent({z, M + 1}, x, s) * std::conj(eval_coherent({z, M}, y, s));
  const double coef = std::sqrt(M + 1.0) / (std::numbers::sqrt2 * l);
  out[0] -= coef * (up + down);
  out[1] -= coef * (-kI * up + kI * down);
  return out;
}

double odd_gaussian_moment(int n, double a) {
  if (n < 0) throw ValidationError("odd_gaussian_moment: negative order");
  const double q = 0.5 * a * a;
  double term = 1.0;
  double sum = 1.0;
  for (int i = 1; i <= n; ++i) {
    term *= q / i;
    sum += term;
  }
  return std::exp(n * std::log(2.0) + log_factorial(n) - q) * sum;
}

double coherent_l1_norm(int n, const ScalingParams& s) {
  if (n < 0) throw ValidationError("coherent_l1_norm: negative level");
  const double log_val = 0.5 * (n + 3) * std::log(2.0) + 0.5 * std::log(std::numbers::pi) +
                         std::lgamma(0.5 * n + 1.0) - 0.5 * log_factorial(n);
  return std::exp(log_val) * s.l_b;
}

}  // namespace gyro
