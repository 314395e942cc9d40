// Copyright (c) 2026 The snapddm Authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0
//
// Overlapping 64x64 tilings of a global domain. On ordinary axes the layout
// is origins {0, stride, ..., n-64} (requires (n-64) % stride == 0); on Bloch
// axes tiles wrap around (requires n % stride == 0) and donated traces carry
// the Bloch phase. Tiles are classified by content: PML wins, then source,
// else material; a tile holding both PML and source cells is rejected.

#ifndef SNAPDDM_TILING_HPP
#define SNAPDDM_TILING_HPP

#include <vector>

#include "snapddm/geom.hpp"
#include "snapddm/subdomain.hpp"

namespace snapddm {

struct TileEdgeLink {
  bool has_donor = false;
  int donor = -1;      // tile index
  int donor_line = 0;  // receiver's trace line in donor-local coordinates
  cdouble phase = {1.0, 0.0};
};

struct Tile {
  int ax = 0, ay = 0;  // tile-grid coordinates
  int ox = 0, oy = 0;  // cell origin (wrap tiles may extend past the domain)
  SubdomainClass klass = SubdomainClass::material;
  std::array<TileEdgeLink, 4> link;  // indexed by Edge
};

struct Tiling {
  int size = kSub;
  int overlap = 4, stride = 60;
  int nx = 0, ny = 0, tx = 0, ty = 0;
  bool bloch_x = false, bloch_y = false;
  cdouble phase_x = {1, 0}, phase_y = {1, 0};
  std::vector<Tile> tiles;

  int index(int ax, int ay) const { return ax * ty + ay; }
  const Tile& at(int ax, int ay) const { return tiles[size_t(index(ax, ay))]; }
  int count() const { return int(tiles.size()); }
};

namespace tiling_detail {

inline int axis_tiles(int n, int stride, bool bloch, const char* axis) {
  if (bloch) {
    require(n >= kSub, std::string("tile: Bloch axis ") + axis + " smaller than a subdomain");
    require(n % stride == 0, std::string("tile: Bloch axis ") + axis + " size " +
                                 std::to_string(n) + " not divisible by stride " +
                                 std::to_string(stride));
    return n / stride;
  }
  int span = n - kSub;
  require(span >= 0, std::string("tile: axis ") + axis + " smaller than a subdomain");
  if (span % stride != 0) {
    int lo = kSub + (span / stride) * stride;
    int hi = lo + stride;
    throw Error(std::string("tile: axis ") + axis + " size " + std::to_string(n) +
                " not tileable with overlap " + std::to_string(kSub - stride) +
                "; nearest valid sizes are " + std::to_string(lo) + " and " +
                std::to_string(hi));
  }
  return span / stride + 1;
}

inline bool cell_in_pml(const PMLSpec& pml, int i, int j, int nx, int ny) {
  if (!pml.any_side()) return false;
  if (pml.left && i < pml.thickness) return true;
  if (pml.right && i >= nx - pml.thickness) return true;
  if (pml.bottom && j < pml.thickness) return true;
  if (pml.top && j >= ny - pml.thickness) return true;
  return false;
}

}  // namespace tiling_detail

inline Tiling tile(int nx, int ny, int overlap, const MaterialMap& eps, const SourceMap& src,
                   const PMLSpec& pml, const std::vector<BlochSpec>& blochs = {}) {
  require(overlap >= 2 && overlap <= 32, "tile: overlap must be in [2, 32]");
  require(eps.nx() == nx && eps.ny() == ny && src.nx() == nx && src.ny() == ny,
          "tile: shape mismatch");
  Tiling t;
  t.overlap = overlap;
  t.stride = kSub - overlap;
  t.nx = nx;
  t.ny = ny;
  for (const auto& b : blochs) {
    b.validate();
    if (b.axis == 0) { t.bloch_x = true; t.phase_x = b.phase; }
    if (b.axis == 1) { t.bloch_y = true; t.phase_y = b.phase; }
  }
  t.tx = tiling_detail::axis_tiles(nx, t.stride, t.bloch_x, "x");
  t.ty = tiling_detail::axis_tiles(ny, t.stride, t.bloch_y, "y");

  t.tiles.resize(size_t(t.tx) * t.ty);
  for (int ax = 0; ax < t.tx; ++ax) {
    for (int ay = 0; ay < t.ty; ++ay) {
      Tile& tl = t.tiles[size_t(t.index(ax, ay))];
      tl.ax = ax;
      tl.ay = ay;
      tl.ox = ax * t.stride;
      tl.oy = ay * t.stride;

      bool has_pml = false, has_src = false;
      for (int i = 0; i < kSub && !(has_pml && has_src); ++i) {
        int gx = t.bloch_x ? (tl.ox + i) % nx : tl.ox + i;
        for (int j = 0; j < kSub; ++j) {
          int gy = t.bloch_y ? (tl.oy + j) % ny : tl.oy + j;
          has_pml = has_pml || tiling_detail::cell_in_pml(pml, gx, gy, nx, ny);
          has_src = has_src || src.at(gx, gy) != cdouble(0, 0);
        }
      }
      require(!(has_pml && has_src),
              "tile: subdomain (" + std::to_string(ax) + "," + std::to_string(ay) +
                  ") intersects both PML and source cells; increase margin");
      tl.klass = has_pml ? SubdomainClass::pml
                         : (has_src ? SubdomainClass::source : SubdomainClass::material);

      // Donor links. The receiver's boundary line maps `stride` cells into the
      // donor (or size-1-stride from the donor's far edge), deep enough for
      // the inward neighbor whenever overlap >= 2.
      auto make_link = [&](Edge e, int a, int count, bool bloch, cdouble phase) {
        TileEdgeLink link;
        bool low_edge = e == Edge::W || e == Edge::S;
        int na = low_edge ? a - 1 : a + 1;
        int wraps = 0;
        if (na < 0) {
          if (!bloch) return link;
          na = count - 1;
          wraps = 1;  // receiver coordinate = donor frame - n: data * phase^-1
        } else if (na >= count) {
          if (!bloch) return link;
          na = 0;
          wraps = -1;
        }
        link.has_donor = true;
        link.donor = na;  // caller turns the axis index into a tile id
        link.donor_line = low_edge ? t.stride : kSub - 1 - t.stride;
        link.phase = wraps == 0 ? cdouble(1, 0) : (wraps == 1 ? std::conj(phase) : phase);
        return link;
      };

      TileEdgeLink w = make_link(Edge::W, ax, t.tx, t.bloch_x, t.phase_x);
      if (w.has_donor) w.donor = t.index(w.donor, ay);
      TileEdgeLink e = make_link(Edge::E, ax, t.tx, t.bloch_x, t.phase_x);
      if (e.has_donor) e.donor = t.index(e.donor, ay);
      TileEdgeLink s = make_link(Edge::S, ay, t.ty, t.bloch_y, t.phase_y);
      if (s.has_donor) s.donor = t.index(ax, s.donor);
      TileEdgeLink n = make_link(Edge::N, ay, t.ty, t.bloch_y, t.phase_y);
      if (n.has_donor) n.donor = t.index(ax, n.donor);
      tl.link[int(Edge::W)] = w;
      tl.link[int(Edge::E)] = e;
      tl.link[int(Edge::S)] = s;
      tl.link[int(Edge::N)] = n;
    }
  }
  return t;
}

// Partition-of-unity weights along one tile axis: linear hat ramps across the
// overlap on sides with a neighbor, flat 1 elsewhere.
inline std::vector<double> stitch_ramp(const Tiling& t, bool has_lo, bool has_hi) {
  std::vector<double> w(kSub, 1.0);
  for (int l = 0; l < t.overlap; ++l) {
    if (has_lo) w[l] = (l + 0.5) / t.overlap;
    if (has_hi) w[kSub - 1 - l] = (l + 0.5) / t.overlap;
  }
  return w;
}

}  // namespace snapddm

#endif  // SNAPDDM_TILING_HPP
