#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace uzawa {

using Vector = std::vector<double>;

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

inline double dot(const Vector& u, const Vector& v) {
  require(u.size() == v.size(), "dot: length mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) acc += u[i] * v[i];
  return acc;
}

inline double norm2(const Vector& v) { return std::sqrt(dot(v, v)); }

inline double norm_inf(const Vector& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::fabs(x));
  return m;
}

// a*u + v
inline Vector axpy(double a, const Vector& u, const Vector& v) {
  require(u.size() == v.size(), "axpy: length mismatch");
  Vector out(v);
  for (std::size_t i = 0; i < u.size(); ++i) out[i] += a * u[i];
  return out;
}

// v += a*u
inline void axpy_inplace(double a, const Vector& u, Vector& v) {
  require(u.size() == v.size(), "axpy_inplace: length mismatch");
  for (std::size_t i = 0; i < u.size(); ++i) v[i] += a * u[i];
}

inline Vector scaled(const Vector& v, double a) {
  Vector out(v);
  for (double& x : out) x *= a;
  return out;
}

inline Vector vsub(const Vector& u, const Vector& v) {
  require(u.size() == v.size(), "vsub: length mismatch");
  Vector out(u);
  for (std::size_t i = 0; i < v.size(); ++i) out[i] -= v[i];
  return out;
}

inline bool all_finite(const Vector& v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

inline void require_finite(const Vector& v, const char* where) {
  if (!all_finite(v)) throw std::runtime_error(std::string(where) + ": non-finite entry");
}

// Deterministic portable RNG: splitmix64 stream, Box-Muller normals.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // [0, 1)
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = 0.0;
    do {
      u1 = uniform();
    } while (u1 <= 1e-300);
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

  Vector gaussian_vector(int n) {
    Vector v(static_cast<std::size_t>(n));
    for (double& x : v) x = gaussian();
    return v;
  }

  Vector uniform_vector(int n) {
    Vector v(static_cast<std::size_t>(n));
    for (double& x : v) x = uniform();
    return v;
  }

 private:
  std::uint64_t state_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace uzawa
