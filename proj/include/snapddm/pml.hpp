// Copyright (c) 2026 The snapddm Authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef SNAPDDM_PML_HPP
#define SNAPDDM_PML_HPP

#include <cmath>
#include <complex>

#include "snapddm/core.hpp"

namespace snapddm {

// Uniaxial PML via complex coordinate stretching s(d) = 1 + i*sigma_max*(d/T)^m
// with d the depth into the layer in cells. sigma_max is chosen for a target
// round-trip reflection R0 of the polynomial-graded profile.
struct PMLSpec {
  int thickness = 40;
  double exponent = 3.0;           // polynomial grade m
  double target_reflection = 1e-12;
  bool left = true, right = true, bottom = true, top = true;

  static PMLSpec none() { return PMLSpec{0, 3.0, 1e-12, false, false, false, false}; }
  static PMLSpec all_sides(int thickness) {
    PMLSpec p;
    p.thickness = thickness;
    return p;
  }

  bool any_side() const { return left || right || bottom || top; }

  void validate(int nx, int ny) const {
    if (!any_side()) return;
    require(thickness >= 8, "PMLSpec: thickness < 8");
    int need_x = (left ? thickness : 0) + (right ? thickness : 0);
    int need_y = (bottom ? thickness : 0) + (top ? thickness : 0);
    require(need_x < nx && need_y < ny, "PMLSpec: PML thicker than half the domain");
    require(exponent >= 2.0 && exponent <= 4.0, "PMLSpec: exponent outside [2,4]");
    require(target_reflection > 0.0 && target_reflection < 1.0, "PMLSpec: bad target reflection");
  }

  double sigma_max(double kappa) const {
    return -(exponent + 1.0) * std::log(target_reflection) / (2.0 * thickness * kappa);
  }

  // Stretch along one axis at continuous position pos (cells; cell i spans
  // [i, i+1)), for an axis of n cells with layers enabled at either end.
  cdouble stretch(bool side_lo, bool side_hi, double pos, int n, double kappa) const {
    double depth = 0.0;
    if (side_lo && pos < thickness) depth = double(thickness) - pos;
    if (side_hi && pos > n - thickness) depth = std::max(depth, pos - double(n - thickness));
    if (depth <= 0.0) return {1.0, 0.0};
    double rho = std::min(depth / thickness, 1.0);
    return {1.0, sigma_max(kappa) * std::pow(rho, exponent)};
  }

  cdouble stretch_x(double pos, int nx, double kappa) const {
    return stretch(left, right, pos, nx, kappa);
  }
  cdouble stretch_y(double pos, int ny, double kappa) const {
    return stretch(bottom, top, pos, ny, kappa);
  }
};

// Periodic wraparound with fixed phase: H(x + n) = phase * H(x) on the axis.
struct BlochSpec {
  int axis = 0;  // 0 = x, 1 = y
  cdouble phase = {1.0, 0.0};

  void validate() const {
    require(axis == 0 || axis == 1, "BlochSpec: axis must be x(0) or y(1)");
    require(std::abs(std::abs(phase) - 1.0) <= 1e-12, "BlochSpec: |phase| != 1");
  }
};

}  // namespace snapddm

#endif  // SNAPDDM_PML_HPP
