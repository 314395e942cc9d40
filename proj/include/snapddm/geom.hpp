// Copyright (c) 2026 The snapddm Authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0
//
// Random device generation: freeform binary masks (noise -> threshold ->
// Gaussian erode -> tilted elliptic dilate -> smooth), grayscale materials
// (Gaussian random field or Voronoi fill), and randomized line sources.

#ifndef SNAPDDM_GEOM_HPP
#define SNAPDDM_GEOM_HPP

#include <cmath>

#include "snapddm/core.hpp"
#include "snapddm/fft.hpp"
#include "snapddm/pml.hpp"
#include "snapddm/rng.hpp"

namespace snapddm {

struct GeometryParams {
  double threshold = 0.5;       // noise keep level, in (0.05, 0.95)
  double erode_sigma = 2.0;     // Gaussian erosion radius [cells]
  double erode_level = 0.62;    // density needed to survive erosion
  double dilate_a = 7.0;        // elliptic dilation semi-axes [cells]
  double dilate_b = 3.0;
  double dilate_angle = 0.6;    // tilt [rad]
  double smooth_sigma = 1.5;    // final smoothing [cells]
  uint64_t rng_seed = 0;

  void validate() const {
    require(threshold > 0.05 && threshold < 0.95, "GeometryParams: threshold outside (0.05,0.95)");
    require(erode_sigma > 0 && dilate_a > 0 && dilate_b > 0 && smooth_sigma > 0,
            "GeometryParams: lengths must be positive");
  }
};

namespace geom_detail {

inline void gaussian_blur(Grid2D<double>& f, double sigma) {
  int r = int(std::ceil(3.0 * sigma));
  std::vector<double> k(2 * r + 1);
  double sum = 0;
  for (int i = -r; i <= r; ++i) sum += k[i + r] = std::exp(-0.5 * i * i / (sigma * sigma));
  for (double& w : k) w /= sum;

  Grid2D<double> tmp(f.nx, f.ny, 0.0);
  for (int i = 0; i < f.nx; ++i)
    for (int j = 0; j < f.ny; ++j) {
      double acc = 0;
      for (int d = -r; d <= r; ++d) {
        int ii = i + d;
        if (ii >= 0 && ii < f.nx) acc += k[d + r] * f.at(ii, j);
      }
      tmp.at(i, j) = acc;
    }
  for (int i = 0; i < f.nx; ++i)
    for (int j = 0; j < f.ny; ++j) {
      double acc = 0;
      for (int d = -r; d <= r; ++d) {
        int jj = j + d;
        if (jj >= 0 && jj < f.ny) acc += k[d + r] * tmp.at(i, jj);
      }
      f.at(i, j) = acc;
    }
}

inline Grid2D<uint8_t> dilate_elliptic(const Grid2D<uint8_t>& m, double a, double b,
                                       double angle) {
  int r = int(std::ceil(std::max(a, b)));
  double ca = std::cos(angle), sa = std::sin(angle);
  std::vector<std::pair<int, int>> offsets;
  for (int dx = -r; dx <= r; ++dx)
    for (int dy = -r; dy <= r; ++dy) {
      double u = dx * ca + dy * sa, v = -dx * sa + dy * ca;
      if (u * u / (a * a) + v * v / (b * b) <= 1.0) offsets.emplace_back(dx, dy);
    }
  Grid2D<uint8_t> out(m.nx, m.ny, 0);
  for (int i = 0; i < m.nx; ++i)
    for (int j = 0; j < m.ny; ++j) {
      if (!m.at(i, j)) continue;
      for (auto [dx, dy] : offsets) {
        int ii = i + dx, jj = j + dy;
        if (ii >= 0 && ii < m.nx && jj >= 0 && jj < m.ny) out.at(ii, jj) = 1;
      }
    }
  return out;
}

inline Grid2D<uint8_t> mask_attempt(int nx, int ny, const GeometryParams& p, uint64_t seed) {
  Rng rng(seed);
  Grid2D<double> f(nx, ny, 0.0);
  for (double& x : f.v) x = rng.uniform() > p.threshold ? 1.0 : 0.0;

  gaussian_blur(f, p.erode_sigma);
  Grid2D<uint8_t> m(nx, ny, 0);
  for (size_t i = 0; i < f.v.size(); ++i) m.v[i] = f.v[i] >= p.erode_level ? 1 : 0;

  m = dilate_elliptic(m, p.dilate_a, p.dilate_b, p.dilate_angle);

  Grid2D<double> s(nx, ny, 0.0);
  for (size_t i = 0; i < s.v.size(); ++i) s.v[i] = double(m.v[i]);
  gaussian_blur(s, p.smooth_sigma);
  for (size_t i = 0; i < s.v.size(); ++i) m.v[i] = s.v[i] >= 0.5 ? 1 : 0;
  return m;
}

}  // namespace geom_detail

// Binary structure mask. Degenerate all-0/all-1 outcomes retry with a fresh
// sub-seed up to 8 times before erroring.
inline Grid2D<uint8_t> gen_binary_mask(int nx, int ny, const GeometryParams& params,
                                       int* attempts_out = nullptr) {
  params.validate();
  for (int attempt = 0; attempt < 8; ++attempt) {
    uint64_t seed = attempt == 0 ? params.rng_seed
                                 : Rng::fork(params.rng_seed, uint64_t(attempt)).next_u64();
    Grid2D<uint8_t> m = geom_detail::mask_attempt(nx, ny, params, seed);
    size_t fill = 0;
    for (uint8_t b : m.v) fill += b;
    if (fill == 0 || fill == m.v.size()) continue;
    if (attempts_out) *attempts_out = attempt + 1;
    return m;
  }
  throw Error("gen_binary_mask: degenerate mask after 8 attempts");
}

enum class MaterialMode { grf, voronoi, constant };

struct MaterialModeParams {
  MaterialMode mode = MaterialMode::grf;
  double eps_min = 1.0, eps_max = 16.0;
  double grf_corr_len = 16.0;  // correlation length [cells]
  int voronoi_sites = 16;
};

namespace geom_detail {

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

// Gaussian random field by spectral synthesis: white noise filtered with a
// power-law cutoff above 2*pi/corr_len, standardized in real space.
inline Grid2D<double> grf(int nx, int ny, double corr_len, uint64_t seed) {
  Rng rng(seed);
  std::vector<cdouble> noise(size_t(nx) * ny), spec(noise.size());
  for (cdouble& z : noise) z = rng.normal();
  fft::forward2d(nx, ny, noise.data(), spec.data());
  for (int kx = 0; kx < nx; ++kx)
    for (int ky = 0; ky < ny; ++ky) {
      double fx = std::min(kx, nx - kx) / double(nx);
      double fy = std::min(ky, ny - ky) / double(ny);
      double t = corr_len * std::sqrt(fx * fx + fy * fy);  // |k| * len / (2 pi)
      spec[size_t(kx) * ny + ky] *= 1.0 / (1.0 + t * t * t * t);
    }
  fft::backward2d(nx, ny, spec.data(), noise.data());
  Grid2D<double> out(nx, ny, 0.0);
  double mean = 0;
  for (size_t i = 0; i < out.v.size(); ++i) mean += out.v[i] = noise[i].real() / double(nx * ny);
  mean /= double(out.v.size());
  double var = 0;
  for (double x : out.v) var += (x - mean) * (x - mean);
  double sd = std::sqrt(var / double(out.v.size()));
  require(sd > 0, "grf: degenerate field");
  for (double& x : out.v) x = (x - mean) / sd;
  return out;
}

}  // namespace geom_detail

// Grayscale permittivity inside the mask; eps = 1 outside.
inline MaterialMap gen_grayscale_material(const Grid2D<uint8_t>& mask,
                                          const MaterialModeParams& mp, uint64_t seed) {
  MaterialMap out(mask.nx, mask.ny, 1.0);
  double lo = mp.eps_min, span = mp.eps_max - mp.eps_min;
  if (mp.mode == MaterialMode::constant) {
    for (size_t i = 0; i < mask.v.size(); ++i)
      if (mask.v[i]) out.eps.v[i] = mp.eps_max;
    return out;
  }
  if (mp.mode == MaterialMode::grf) {
    Grid2D<double> z = geom_detail::grf(mask.nx, mask.ny, mp.grf_corr_len, seed);
    for (size_t i = 0; i < mask.v.size(); ++i)
      if (mask.v[i]) out.eps.v[i] = lo + span * geom_detail::normal_cdf(z.v[i]);
    return out;
  }
  // Voronoi: piecewise-constant cells, one value per site
  Rng rng(seed);
  int ns = std::max(1, mp.voronoi_sites);
  std::vector<double> sx(ns), sy(ns), val(ns);
  for (int s = 0; s < ns; ++s) {
    sx[s] = rng.uniform(0.0, double(mask.nx));
    sy[s] = rng.uniform(0.0, double(mask.ny));
    val[s] = rng.uniform(lo, lo + span);
  }
  for (int i = 0; i < mask.nx; ++i)
    for (int j = 0; j < mask.ny; ++j) {
      if (!mask.at(i, j)) continue;
      int best = 0;
      double bd = 1e300;
      for (int s = 0; s < ns; ++s) {
        double d = (i - sx[s]) * (i - sx[s]) + (j - sy[s]) * (j - sy[s]);
        if (d < bd) { bd = d; best = s; }
      }
      out.eps.at(i, j) = val[best];
    }
  return out;
}

struct LineSourceParams {
  int offset = 64;      // distance of each line from its domain edge [cells]
  int harmonics = 8;    // K sinusoid terms
  double bloch_ramp = 0.0;  // phase advance per cell along each line
};

// Four 1-cell line sources, one per side at the configured inset, each a
// random sinusoid superposition; the composite is normalized to unit mean |j|
// over the source support.
inline SourceMap gen_line_sources(const GridSpec& grid, const LineSourceParams& p,
                                  uint64_t seed) {
  const int nx = grid.nx, ny = grid.ny, off = p.offset;
  require(off >= 40, "gen_line_sources: need >= 40-cell margin reserved for the PML");
  require(2 * off + 8 < std::min(nx, ny), "gen_line_sources: offset too large for the grid");
  SourceMap src(nx, ny);
  Rng rng(seed);

  auto profile = [&](int len) {
    std::vector<double> a(p.harmonics), ph(p.harmonics);
    for (int k = 0; k < p.harmonics; ++k) {
      a[k] = rng.uniform();
      ph[k] = rng.uniform(0.0, 2.0 * M_PI);
    }
    std::vector<cdouble> line(len);
    for (int t = 0; t < len; ++t) {
      double v = 0;
      for (int k = 0; k < p.harmonics; ++k)
        v += a[k] * std::sin(2.0 * M_PI * (k + 1) * t / double(len) + ph[k]);
      line[t] = std::polar(1.0, p.bloch_ramp * t) * v;
    }
    return line;
  };

  int len_y = ny - 2 * off, len_x = nx - 2 * off;
  auto w = profile(len_y), e = profile(len_y), s = profile(len_x), n = profile(len_x);
  for (int t = 0; t < len_y; ++t) {
    src.at(off, off + t) += w[t];
    src.at(nx - 1 - off, off + t) += e[t];
  }
  for (int t = 0; t < len_x; ++t) {
    src.at(off + t, off) += s[t];
    src.at(off + t, ny - 1 - off) += n[t];
  }

  double mean = 0;
  size_t support = 0;
  for (const cdouble& z : src.j.v)
    if (z != cdouble(0, 0)) { mean += std::abs(z); ++support; }
  require(support > 0, "gen_line_sources: empty support");
  mean /= double(support);
  require(mean > 0, "gen_line_sources: zero-mean profile");
  for (cdouble& z : src.j.v) z /= mean;
  return src;
}

// A complete randomized scattering problem: PML frame, source ring, and a
// grayscale structure confined to the tile-compatible interior box.
struct Problem {
  GridSpec grid;
  MaterialMap eps;
  SourceMap src;
  PMLSpec pml;
  std::vector<BlochSpec> blochs;
};

struct DeviceParams {
  int size = 304;
  double eps_max = 16.0;
  MaterialMode mode = MaterialMode::grf;
  int pml_thickness = 40;
  int source_offset = 64;       // start of the second tile ring at overlap 4
  int structure_margin = 60;    // extra clearance between sources and structures
  GeometryParams geometry;
  LineSourceParams sources;
};

inline Problem make_random_device(const DeviceParams& dp, uint64_t seed) {
  const int n = dp.size;
  int lo = dp.source_offset + dp.structure_margin;
  int hi = n - lo;
  require(hi - lo >= 16, "make_random_device: domain too small for a structure box");

  Problem prob;
  prob.grid = GridSpec(n, n);
  prob.pml = PMLSpec::all_sides(dp.pml_thickness);

  GeometryParams gp = dp.geometry;
  gp.rng_seed = Rng::fork(seed, 1).next_u64();
  Grid2D<uint8_t> box_mask = gen_binary_mask(hi - lo, hi - lo, gp);

  MaterialModeParams mp;
  mp.mode = dp.mode;
  mp.eps_max = dp.eps_max;
  MaterialMap box_eps = gen_grayscale_material(box_mask, mp, Rng::fork(seed, 2).next_u64());

  prob.eps = MaterialMap(n, n, 1.0);
  for (int i = 0; i < hi - lo; ++i)
    for (int j = 0; j < hi - lo; ++j) prob.eps.at(lo + i, lo + j) = box_eps.at(i, j);

  LineSourceParams sp = dp.sources;
  sp.offset = dp.source_offset;
  prob.src = gen_line_sources(prob.grid, sp, Rng::fork(seed, 3).next_u64());
  return prob;
}

}  // namespace snapddm

#endif  // SNAPDDM_GEOM_HPP
