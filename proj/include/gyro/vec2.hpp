#pragma once

#include <cmath>
#include <complex>

namespace gyro {

using cplx = std::complex<double>;

struct Vec2 {
  double x1 = 0.0;
  double x2 = 0.0;

  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x1 + b.x1, a.x2 + b.x2}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x1 - b.x1, a.x2 - b.x2}; }
  friend Vec2 operator-(Vec2 a) { return {-a.x1, -a.x2}; }
  friend Vec2 operator*(double s, Vec2 a) { return {s * a.x1, s * a.x2}; }
  friend Vec2 operator*(Vec2 a, double s) { return {s * a.x1, s * a.x2}; }
  friend Vec2 operator/(Vec2 a, double s) { return {a.x1 / s, a.x2 / s}; }
  Vec2& operator+=(Vec2 b) {
    x1 += b.x1;
    x2 += b.x2;
    return *this;
  }
  friend bool operator==(Vec2 a, Vec2 b) = default;
};

inline double dot(Vec2 a, Vec2 b) { return a.x1 * b.x1 + a.x2 * b.x2; }
inline double norm2(Vec2 a) { return dot(a, a); }
inline double norm(Vec2 a) { return std::hypot(a.x1, a.x2); }

// Rotation by +pi/2: (x1, x2)^perp = (-x2, x1).
inline Vec2 perp(Vec2 a) { return {-a.x2, a.x1}; }

inline cplx to_complex(Vec2 a) { return {a.x1, a.x2}; }
inline Vec2 to_vec(cplx z) { return {z.real(), z.imag()}; }

}  // namespace gyro
