#pragma once

#include <array>
#include <cmath>

namespace kfield {

struct Vec3 {
  double x = 0.0, y = 0.0, z = 0.0;

  Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }
  Vec3& operator-=(const Vec3& o) { x -= o.x; y -= o.y; z -= o.z; return *this; }
  Vec3& operator*=(double s) { x *= s; y *= s; z *= s; return *this; }

  double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }
  double& operator[](int i) { return i == 0 ? x : (i == 1 ? y : z); }
};

inline Vec3 operator+(Vec3 a, const Vec3& b) { return a += b; }
inline Vec3 operator-(Vec3 a, const Vec3& b) { return a -= b; }
inline Vec3 operator*(double s, Vec3 a) { return a *= s; }
inline Vec3 operator*(Vec3 a, double s) { return a *= s; }
inline Vec3 operator/(Vec3 a, double s) { return a *= (1.0 / s); }
inline Vec3 operator-(const Vec3& a) { return {-a.x, -a.y, -a.z}; }

inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline double norm2(const Vec3& a) { return dot(a, a); }
inline double norm(const Vec3& a) { return std::sqrt(norm2(a)); }

// Four-vector in the x^0 = c*t chart. Component o carries the time index.
struct Vec4 {
  double o = 0.0;
  Vec3 s{};

  double operator[](int mu) const { return mu == 0 ? o : s[mu - 1]; }
  double& operator[](int mu) { return mu == 0 ? o : s[mu - 1]; }
};

inline Vec4 operator+(const Vec4& a, const Vec4& b) { return {a.o + b.o, a.s + b.s}; }
inline Vec4 operator-(const Vec4& a, const Vec4& b) { return {a.o - b.o, a.s - b.s}; }
inline Vec4 operator*(double k, const Vec4& a) { return {k * a.o, k * a.s}; }

inline double max_abs(const Vec4& a) {
  return std::max(std::abs(a.o),
                  std::max(std::abs(a.s.x), std::max(std::abs(a.s.y), std::abs(a.s.z))));
}

// Raising/lowering with the diagonal metric diag(g00, -1, -1, -1).
inline Vec4 lower_index(const Vec4& v, double g00) { return {g00 * v.o, -v.s}; }
inline Vec4 raise_index(const Vec4& v, double g00) { return {v.o / g00, -v.s}; }

using Mat3 = std::array<std::array<double, 3>, 3>;

}  // namespace kfield
