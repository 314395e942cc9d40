// Copyright (c) 2026 The snapddm Authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef SNAPDDM_CORE_HPP
#define SNAPDDM_CORE_HPP

#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace snapddm {

using cdouble = std::complex<double>;

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw Error(msg);
}

// 2D array on a uniform grid, row-major with (x, y) indexing: v[ix * ny + iy].
template <typename T>
struct Grid2D {
  int nx = 0, ny = 0;
  std::vector<T> v;

  Grid2D() = default;
  Grid2D(int nx_, int ny_, T fill = T{}) : nx(nx_), ny(ny_), v(size_t(nx_) * ny_, fill) {
    require(nx_ > 0 && ny_ > 0, "Grid2D: nonpositive shape");
  }

  T& at(int ix, int iy) { return v[size_t(ix) * ny + iy]; }
  const T& at(int ix, int iy) const { return v[size_t(ix) * ny + iy]; }
  size_t size() const { return v.size(); }
  template <typename U>
  bool same_shape(const Grid2D<U>& o) const {
    return nx == o.nx && ny == o.ny;
  }
  bool in_bounds(int ix, int iy) const { return ix >= 0 && ix < nx && iy >= 0 && iy < ny; }

  bool all_finite() const {
    for (const T& x : v)
      if (!is_finite_value(x)) return false;
    return true;
  }

 private:
  static bool is_finite_value(double x) { return std::isfinite(x); }
  static bool is_finite_value(float x) { return std::isfinite(x); }
  static bool is_finite_value(const cdouble& z) {
    return std::isfinite(z.real()) && std::isfinite(z.imag());
  }
};

using ComplexField2D = Grid2D<cdouble>;
using RealField2D = Grid2D<double>;

// Relative permittivity map. Generated data stays within [1, 16]; eps >= 1 always.
struct MaterialMap {
  Grid2D<double> eps;

  MaterialMap() = default;
  MaterialMap(int nx, int ny, double fill = 1.0) : eps(nx, ny, fill) {}
  int nx() const { return eps.nx; }
  int ny() const { return eps.ny; }
  double& at(int ix, int iy) { return eps.at(ix, iy); }
  double at(int ix, int iy) const { return eps.at(ix, iy); }

  void validate() const {
    for (double e : eps.v) require(e >= 1.0, "MaterialMap: eps < 1");
  }
};

// Magnetic current density J (nondimensional); sparse support on source lines.
struct SourceMap {
  ComplexField2D j;

  SourceMap() = default;
  SourceMap(int nx, int ny) : j(nx, ny, cdouble(0.0, 0.0)) {}
  int nx() const { return j.nx; }
  int ny() const { return j.ny; }
  cdouble& at(int ix, int iy) { return j.at(ix, iy); }
  const cdouble& at(int ix, int iy) const { return j.at(ix, iy); }
};

// Grid geometry and the nondimensionalization contract. All solver modules work
// in units where mu0 = 1 and lengths are in cells; the only physical constants
// live here. kappa() = k0 * delta is the nondimensional vacuum wavenumber.
struct GridSpec {
  int nx = 64, ny = 64;
  double delta = 6.25e-9;    // cell size [m]
  double lambda0 = 1.05e-6;  // vacuum wavelength [m]

  GridSpec() = default;
  GridSpec(int nx_, int ny_) : nx(nx_), ny(ny_) { validate(); }
  GridSpec(int nx_, int ny_, double delta_, double lambda0_)
      : nx(nx_), ny(ny_), delta(delta_), lambda0(lambda0_) {
    validate();
  }

  double k0() const { return 2.0 * M_PI / lambda0; }
  double kappa() const { return k0() * delta; }

  void validate() const {
    require(nx >= 8 && ny >= 8, "GridSpec: nx, ny must be >= 8");
    require(delta > 0.0 && lambda0 > 0.0, "GridSpec: delta, lambda0 must be positive");
    require(kappa() < 1.0, "GridSpec: k0*delta >= 1 (needs >6 cells per vacuum wavelength)");
  }
};

// k(r) map convention. The default follows the source formula k = k0*eps;
// `sqrt_eps` is the physical-convention alternative, selectable in config.
enum class WavevectorConvention { paper_linear_eps, sqrt_eps };

inline const char* to_string(WavevectorConvention c) {
  return c == WavevectorConvention::paper_linear_eps ? "paper_linear_eps" : "sqrt_eps";
}

inline WavevectorConvention wavevector_convention_from_string(const std::string& s) {
  if (s == "paper_linear_eps") return WavevectorConvention::paper_linear_eps;
  if (s == "sqrt_eps") return WavevectorConvention::sqrt_eps;
  throw Error("unknown wavevector convention: " + s);
}

inline double mean_abs(const ComplexField2D& f) {
  double s = 0.0;
  for (const cdouble& z : f.v) s += std::abs(z);
  return s / double(f.size());
}

// mean(|a - b|) / mean(|b|), dimensionless.
inline double relative_l1(const ComplexField2D& a, const ComplexField2D& b) {
  require(a.same_shape(b), "relative_l1: shape mismatch");
  double num = 0.0, den = 0.0;
  for (size_t i = 0; i < a.v.size(); ++i) {
    num += std::abs(a.v[i] - b.v[i]);
    den += std::abs(b.v[i]);
  }
  require(den > 0.0, "relative_l1: degenerate reference (b identically zero)");
  return num / den;
}

}  // namespace snapddm

#endif  // SNAPDDM_CORE_HPP
