// Copyright (c) 2026 The snapddm Authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0
//
// Robin boundary algebra. The trace value on an edge with outward normal n is
//
//   g = i k H - dH/dn,
//
// with the normal derivative taken as the one-sided two-point difference in
// cell units: dH/dn ~ H(line) - H(line - n). k follows the configured
// wavevector convention (default k = kappa * eps).

#ifndef SNAPDDM_ROBIN_HPP
#define SNAPDDM_ROBIN_HPP

#include <array>
#include <vector>

#include "snapddm/core.hpp"

namespace snapddm {

enum class Edge : int { W = 0, E = 1, N = 2, S = 3 };
constexpr std::array<Edge, 4> kEdges = {Edge::W, Edge::E, Edge::N, Edge::S};

inline const char* to_string(Edge e) {
  switch (e) {
    case Edge::W: return "W";
    case Edge::E: return "E";
    case Edge::N: return "N";
    default: return "S";
  }
}

// Robin data on the four edges of a rectangular patch. W/E vectors are indexed
// by y, N/S by x.
struct BoundaryTraceSet {
  std::array<std::vector<cdouble>, 4> g;

  BoundaryTraceSet() = default;
  BoundaryTraceSet(int len_x, int len_y) {
    g[int(Edge::W)].assign(len_y, cdouble(0, 0));
    g[int(Edge::E)].assign(len_y, cdouble(0, 0));
    g[int(Edge::N)].assign(len_x, cdouble(0, 0));
    g[int(Edge::S)].assign(len_x, cdouble(0, 0));
  }
  explicit BoundaryTraceSet(int n) : BoundaryTraceSet(n, n) {}

  std::vector<cdouble>& edge(Edge e) { return g[int(e)]; }
  const std::vector<cdouble>& edge(Edge e) const { return g[int(e)]; }

  bool all_finite() const {
    for (const auto& v : g)
      for (const cdouble& z : v)
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
    return true;
  }
};

inline double wavevector_value(double kappa, double eps, WavevectorConvention conv) {
  return conv == WavevectorConvention::paper_linear_eps ? kappa * eps : kappa * std::sqrt(eps);
}

// kd(r) = kappa * eps (paper_linear_eps) or kappa * sqrt(eps), per cell.
inline RealField2D wavevector_map_kappa(const MaterialMap& eps, double kappa,
                                        WavevectorConvention conv) {
  RealField2D k(eps.nx(), eps.ny());
  for (size_t i = 0; i < k.v.size(); ++i) k.v[i] = wavevector_value(kappa, eps.eps.v[i], conv);
  return k;
}

inline RealField2D wavevector_map(const MaterialMap& eps, const GridSpec& grid,
                                  WavevectorConvention conv) {
  require(eps.nx() == grid.nx && eps.ny() == grid.ny, "wavevector_map: shape mismatch");
  return wavevector_map_kappa(eps, grid.kappa(), conv);
}

// g[t] = i*k[t]*H[t] - (H[t] - H_inward[t]) along the given trace line, where
// H_inward is one cell inward along the edge's outward normal.
inline std::vector<cdouble> extract_g(const ComplexField2D& h, const RealField2D& k_map,
                                      Edge edge, int trace_line) {
  require(h.same_shape(k_map), "extract_g: k map shape mismatch");
  bool x_edge = edge == Edge::W || edge == Edge::E;
  int axis_len = x_edge ? h.nx : h.ny;
  int cross_len = x_edge ? h.ny : h.nx;
  int inward = (edge == Edge::W || edge == Edge::S) ? trace_line + 1 : trace_line - 1;
  require(trace_line >= 0 && trace_line < axis_len && inward >= 0 && inward < axis_len,
          "extract_g: trace line or inward neighbor outside the domain");

  std::vector<cdouble> g(cross_len);
  for (int t = 0; t < cross_len; ++t) {
    int ix = x_edge ? trace_line : t;
    int iy = x_edge ? t : trace_line;
    int jx = x_edge ? inward : t;
    int jy = x_edge ? t : inward;
    cdouble hb = h.at(ix, iy);
    g[t] = cdouble(0.0, k_map.at(ix, iy)) * hb - (hb - h.at(jx, jy));
  }
  return g;
}

// Traces on all four boundary lines of a patch.
inline BoundaryTraceSet extract_boundary_traces(const ComplexField2D& h,
                                                const RealField2D& k_map) {
  BoundaryTraceSet out(h.nx, h.ny);
  out.edge(Edge::W) = extract_g(h, k_map, Edge::W, 0);
  out.edge(Edge::E) = extract_g(h, k_map, Edge::E, h.nx - 1);
  out.edge(Edge::S) = extract_g(h, k_map, Edge::S, 0);
  out.edge(Edge::N) = extract_g(h, k_map, Edge::N, h.ny - 1);
  return out;
}

// Re/Im of g written onto the one-cell perimeter frame of zero images; corners
// take the mean of the two adjacent edge values.
inline std::pair<RealField2D, RealField2D> rasterize_traces(const BoundaryTraceSet& bt) {
  int len_x = int(bt.edge(Edge::N).size());
  int len_y = int(bt.edge(Edge::W).size());
  RealField2D re(len_x, len_y, 0.0), im(len_x, len_y, 0.0);
  auto put = [&](int ix, int iy, cdouble z) {
    re.at(ix, iy) = z.real();
    im.at(ix, iy) = z.imag();
  };
  for (int y = 1; y < len_y - 1; ++y) {
    put(0, y, bt.edge(Edge::W)[y]);
    put(len_x - 1, y, bt.edge(Edge::E)[y]);
  }
  for (int x = 1; x < len_x - 1; ++x) {
    put(x, 0, bt.edge(Edge::S)[x]);
    put(x, len_y - 1, bt.edge(Edge::N)[x]);
  }
  put(0, 0, 0.5 * (bt.edge(Edge::W)[0] + bt.edge(Edge::S)[0]));
  put(0, len_y - 1, 0.5 * (bt.edge(Edge::W)[len_y - 1] + bt.edge(Edge::N)[0]));
  put(len_x - 1, 0, 0.5 * (bt.edge(Edge::E)[0] + bt.edge(Edge::S)[len_x - 1]));
  put(len_x - 1, len_y - 1, 0.5 * (bt.edge(Edge::E)[len_y - 1] + bt.edge(Edge::N)[len_x - 1]));
  return {std::move(re), std::move(im)};
}

// Inverse of rasterize_traces away from corners (corner cells are ambiguous by
// construction; each edge reads the shared corner pixel back).
inline BoundaryTraceSet derasterize_traces(const RealField2D& re, const RealField2D& im) {
  require(re.same_shape(im), "derasterize: shape mismatch");
  BoundaryTraceSet bt(re.nx, re.ny);
  auto get = [&](int ix, int iy) { return cdouble(re.at(ix, iy), im.at(ix, iy)); };
  for (int y = 0; y < re.ny; ++y) {
    bt.edge(Edge::W)[y] = get(0, y);
    bt.edge(Edge::E)[y] = get(re.nx - 1, y);
  }
  for (int x = 0; x < re.nx; ++x) {
    bt.edge(Edge::S)[x] = get(x, 0);
    bt.edge(Edge::N)[x] = get(x, re.ny - 1);
  }
  return bt;
}

// Mean |g - (i k H - dH/dn)| over all four boundary lines.
inline double bc_residual(const ComplexField2D& h, const RealField2D& k_map,
                          const BoundaryTraceSet& bt) {
  BoundaryTraceSet own = extract_boundary_traces(h, k_map);
  double s = 0.0;
  size_t count = 0;
  for (Edge e : kEdges) {
    const auto& a = bt.edge(e);
    const auto& b = own.edge(e);
    require(a.size() == b.size(), "bc_residual: trace length mismatch");
    for (size_t t = 0; t < a.size(); ++t) s += std::abs(a[t] - b[t]);
    count += a.size();
  }
  return s / double(count);
}

}  // namespace snapddm

#endif  // SNAPDDM_ROBIN_HPP
