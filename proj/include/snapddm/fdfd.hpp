// Copyright (c) 2026 The snapddm Authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0
//
// Global finite-difference frequency-domain reference solver for the 2D scalar
// Hz wave equation in nondimensional form,
//
//   (1/s_x) d_x ( (1/(eps s_x)) d_x H ) + (1/s_y) d_y ( (1/(eps s_y)) d_y H )
//     + kappa^2 H = -i kappa J,      kappa = k0 * delta,
//
// discretized on cell centers with a 5-point stencil. 1/eps at faces is the
// arithmetic mean of the two adjacent cells' 1/eps. The outermost ring is
// Dirichlet H = 0 except on Bloch axes, which wrap with a fixed phase.

#ifndef SNAPDDM_FDFD_HPP
#define SNAPDDM_FDFD_HPP

#include <sys/resource.h>

#include <chrono>
#include <optional>
#include <vector>

#include "snapddm/core.hpp"
#include "snapddm/pml.hpp"
#include "snapddm/sparse.hpp"

namespace snapddm {

// 5-point discretization of the wave operator; N = nx*ny rows, CSR storage.
struct SparseOperator {
  int nx = 0, ny = 0;
  SparseMatrixC mat;
};

namespace fdfd_detail {

inline bool is_bloch(const std::vector<BlochSpec>& blochs, int axis) {
  for (const auto& b : blochs)
    if (b.axis == axis) return true;
  return false;
}

inline cdouble bloch_phase(const std::vector<BlochSpec>& blochs, int axis) {
  for (const auto& b : blochs)
    if (b.axis == axis) return b.phase;
  return {1.0, 0.0};
}

}  // namespace fdfd_detail

inline bool on_dirichlet_ring(int ix, int iy, int nx, int ny,
                              const std::vector<BlochSpec>& blochs) {
  bool bx = fdfd_detail::is_bloch(blochs, 0);
  bool by = fdfd_detail::is_bloch(blochs, 1);
  if (!bx && (ix == 0 || ix == nx - 1)) return true;
  if (!by && (iy == 0 || iy == ny - 1)) return true;
  return false;
}

inline SparseOperator assemble_operator(const MaterialMap& eps, const GridSpec& grid,
                                        const PMLSpec& pml,
                                        const std::vector<BlochSpec>& blochs = {}) {
  const int nx = grid.nx, ny = grid.ny;
  require(eps.nx() == nx && eps.ny() == ny, "assemble_operator: eps shape mismatch");
  pml.validate(nx, ny);
  for (double e : eps.eps.v) require(e >= 1.0, "assemble_operator: eps < 1");
  for (const auto& b : blochs) {
    b.validate();
    if (b.axis == 0) require(!pml.left && !pml.right, "Bloch x-axis overlaps PML sides");
    if (b.axis == 1) require(!pml.bottom && !pml.top, "Bloch y-axis overlaps PML sides");
  }

  const double kd = grid.kappa();
  const bool bx = fdfd_detail::is_bloch(blochs, 0);
  const bool by = fdfd_detail::is_bloch(blochs, 1);
  const cdouble phx = fdfd_detail::bloch_phase(blochs, 0);
  const cdouble phy = fdfd_detail::bloch_phase(blochs, 1);

  // Per-axis stretch values at cell centers (i + 0.5) and faces (i).
  std::vector<cdouble> sxc(nx), sxf(nx + 1), syc(ny), syf(ny + 1);
  for (int i = 0; i < nx; ++i) sxc[i] = pml.stretch_x(i + 0.5, nx, kd);
  for (int i = 0; i <= nx; ++i) sxf[i] = pml.stretch_x(double(i), nx, kd);
  for (int j = 0; j < ny; ++j) syc[j] = pml.stretch_y(j + 0.5, ny, kd);
  for (int j = 0; j <= ny; ++j) syf[j] = pml.stretch_y(double(j), ny, kd);

  auto id = [&](int i, int j) { return i * ny + j; };
  auto inv_eps = [&](int i, int j) { return 1.0 / eps.at(i, j); };

  std::vector<Eigen::Triplet<cdouble>> trips;
  trips.reserve(size_t(5) * nx * ny);

  for (int i = 0; i < nx; ++i) {
    for (int j = 0; j < ny; ++j) {
      if (on_dirichlet_ring(i, j, nx, ny, blochs)) {
        trips.emplace_back(id(i, j), id(i, j), cdouble(1.0, 0.0));
        continue;
      }
      cdouble diag = cdouble(kd * kd, 0.0);

      // x couplings
      {
        int il = i - 1, ih = i + 1;
        cdouble wl(1.0, 0.0), wh(1.0, 0.0);
        if (il < 0) { il = nx - 1; wl = std::conj(phx); }    // only when bx
        if (ih >= nx) { ih = 0; wh = phx; }
        double fel = 0.5 * (inv_eps(il, j) + inv_eps(i, j));
        double feh = 0.5 * (inv_eps(i, j) + inv_eps(ih, j));
        cdouble al = fel / (sxf[i] * sxc[i]);
        cdouble ah = feh / (sxf[i + 1] * sxc[i]);
        diag -= al + ah;
        trips.emplace_back(id(i, j), id(il, j), al * wl);
        trips.emplace_back(id(i, j), id(ih, j), ah * wh);
      }
      // y couplings
      {
        int jl = j - 1, jh = j + 1;
        cdouble wl(1.0, 0.0), wh(1.0, 0.0);
        if (jl < 0) { jl = ny - 1; wl = std::conj(phy); }    // only when by
        if (jh >= ny) { jh = 0; wh = phy; }
        double fel = 0.5 * (inv_eps(i, jl) + inv_eps(i, j));
        double feh = 0.5 * (inv_eps(i, j) + inv_eps(i, jh));
        cdouble al = fel / (syf[j] * syc[j]);
        cdouble ah = feh / (syf[j + 1] * syc[j]);
        diag -= al + ah;
        trips.emplace_back(id(i, j), id(i, jl), al * wl);
        trips.emplace_back(id(i, j), id(i, jh), ah * wh);
      }
      trips.emplace_back(id(i, j), id(i, j), diag);
    }
  }

  SparseOperator op;
  op.nx = nx;
  op.ny = ny;
  op.mat.resize(nx * ny, nx * ny);
  op.mat.setFromTriplets(trips.begin(), trips.end());
  op.mat.makeCompressed();
  return op;
}

inline ComplexField2D apply_operator(const SparseOperator& op, const ComplexField2D& h) {
  require(h.nx == op.nx && h.ny == op.ny, "apply_operator: shape mismatch");
  Eigen::Map<const VectorC> x(h.v.data(), Eigen::Index(h.v.size()));
  VectorC y = op.mat * x;
  ComplexField2D out(op.nx, op.ny);
  Eigen::Map<VectorC>(out.v.data(), y.size()) = y;
  return out;
}

// rhs = -i*kappa*J, zeroed on Dirichlet rows.
inline VectorC assemble_rhs(const SourceMap& src, const GridSpec& grid,
                            const std::vector<BlochSpec>& blochs = {}) {
  require(src.nx() == grid.nx && src.ny() == grid.ny, "assemble_rhs: source shape mismatch");
  const double kd = grid.kappa();
  VectorC b(grid.nx * grid.ny);
  for (int i = 0; i < grid.nx; ++i)
    for (int j = 0; j < grid.ny; ++j)
      b[i * grid.ny + j] = on_dirichlet_ring(i, j, grid.nx, grid.ny, blochs)
                               ? cdouble(0.0, 0.0)
                               : cdouble(0.0, -kd) * src.at(i, j);
  return b;
}

struct SolveInfo {
  double rel_residual = 0.0;
  double assemble_seconds = 0.0;
  double factor_seconds = 0.0;
  double solve_seconds = 0.0;
  long nnz = 0;
  long peak_rss_delta_kb = 0;  // factorization memory estimate
};

inline long current_max_rss_kb() {
  rusage ru{};
  getrusage(RUSAGE_SELF, &ru);
  return ru.ru_maxrss;
}

inline ComplexField2D solve_global(const MaterialMap& eps, const SourceMap& src,
                                   const GridSpec& grid, const PMLSpec& pml,
                                   const std::vector<BlochSpec>& blochs = {},
                                   SolveInfo* info = nullptr) {
  using clock = std::chrono::steady_clock;
  auto t0 = clock::now();
  SparseOperator op = assemble_operator(eps, grid, pml, blochs);
  VectorC b = assemble_rhs(src, grid, blochs);
  auto t1 = clock::now();

  ComplexField2D h(grid.nx, grid.ny);
  if (b.cwiseAbs().sum() == 0.0) {
    // homogeneous system with a Dirichlet ring: H = 0
    if (info) *info = SolveInfo{0.0, std::chrono::duration<double>(t1 - t0).count(), 0, 0,
                                op.mat.nonZeros(), 0};
    return h;
  }

  long rss0 = current_max_rss_kb();
  DirectSolver lu;
  lu.factor(op.mat);
  auto t2 = clock::now();
  VectorC x = lu.solve(b);
  auto t3 = clock::now();

  double rr = rel_l1_residual(op.mat, x, b);
  require(rr < 1e-8, "solve_global: residual " + std::to_string(rr) + " exceeds 1e-8");

  Eigen::Map<VectorC>(h.v.data(), x.size()) = x;
  require(h.all_finite(), "solve_global: non-finite field");
  if (info) {
    info->rel_residual = rr;
    info->assemble_seconds = std::chrono::duration<double>(t1 - t0).count();
    info->factor_seconds = std::chrono::duration<double>(t2 - t1).count();
    info->solve_seconds = std::chrono::duration<double>(t3 - t2).count();
    info->nnz = op.mat.nonZeros();
    info->peak_rss_delta_kb = current_max_rss_kb() - rss0;
  }
  return h;
}

// Per-cell residual of the unstretched operator on interior cells (one-cell
// margin), border ring zero:
//   r = div((1/eps) grad H) + kappa^2 H + i kappa J.
// Zero wherever the field solves the source-bearing wave equation outside PML.
inline ComplexField2D pde_residual_map(const MaterialMap& eps, const ComplexField2D& h,
                                       const SourceMap& src, const GridSpec& grid) {
  const int nx = grid.nx, ny = grid.ny;
  require(eps.nx() == nx && eps.ny() == ny && h.nx == nx && h.ny == ny && src.nx() == nx &&
              src.ny() == ny,
          "pde_residual_map: shape mismatch");
  const double kd = grid.kappa();
  ComplexField2D r(nx, ny);
  auto inv_eps = [&](int i, int j) { return 1.0 / eps.at(i, j); };
  for (int i = 1; i < nx - 1; ++i) {
    for (int j = 1; j < ny - 1; ++j) {
      double aw = 0.5 * (inv_eps(i - 1, j) + inv_eps(i, j));
      double ae = 0.5 * (inv_eps(i, j) + inv_eps(i + 1, j));
      double as = 0.5 * (inv_eps(i, j - 1) + inv_eps(i, j));
      double an = 0.5 * (inv_eps(i, j) + inv_eps(i, j + 1));
      cdouble lap = ae * (h.at(i + 1, j) - h.at(i, j)) - aw * (h.at(i, j) - h.at(i - 1, j)) +
                    an * (h.at(i, j + 1) - h.at(i, j)) - as * (h.at(i, j) - h.at(i, j - 1));
      r.at(i, j) = lap + kd * kd * h.at(i, j) + cdouble(0.0, kd) * src.at(i, j);
    }
  }
  return r;
}

// Mean |residual| over interior cells that are outside every PML layer.
inline double mean_interior_residual(const ComplexField2D& resid, const PMLSpec& pml) {
  int x0 = 1, x1 = resid.nx - 1, y0 = 1, y1 = resid.ny - 1;
  if (pml.left) x0 = std::max(x0, pml.thickness);
  if (pml.right) x1 = std::min(x1, resid.nx - pml.thickness);
  if (pml.bottom) y0 = std::max(y0, pml.thickness);
  if (pml.top) y1 = std::min(y1, resid.ny - pml.thickness);
  require(x1 > x0 && y1 > y0, "mean_interior_residual: empty interior");
  double s = 0.0;
  for (int i = x0; i < x1; ++i)
    for (int j = y0; j < y1; ++j) s += std::abs(resid.at(i, j));
  return s / (double(x1 - x0) * double(y1 - y0));
}

}  // namespace snapddm

#endif  // SNAPDDM_FDFD_HPP
