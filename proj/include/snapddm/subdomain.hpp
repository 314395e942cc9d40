// Copyright (c) 2026 The snapddm Authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0
//
// Exact sparse direct solver for 64x64 Robin boundary-value problems. Interior
// cells carry the 5-point wave stencil (with PML stretch for pml-class
// problems); perimeter cells are replaced by Robin rows matching extract_g's
// two-point stencil,
//
//   (i k - 1) H_b + H_{b-1} = g_b,
//
// except on global outer edges of pml subdomains, which are Dirichlet H = 0.
// Corner cells shared by two Robin edges take the mean of the two equations.

#ifndef SNAPDDM_SUBDOMAIN_HPP
#define SNAPDDM_SUBDOMAIN_HPP

#include <algorithm>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <unordered_map>

#include "snapddm/hash.hpp"
#include "snapddm/pml.hpp"
#include "snapddm/robin.hpp"
#include "snapddm/sparse.hpp"

namespace snapddm {

constexpr int kSub = 64;  // subdomain grid size

enum class SubdomainClass : uint8_t { material = 0, source = 1, pml = 2 };

inline const char* to_string(SubdomainClass c) {
  switch (c) {
    case SubdomainClass::material: return "material";
    case SubdomainClass::source: return "source";
    default: return "pml";
  }
}

inline SubdomainClass subdomain_class_from_string(const std::string& s) {
  if (s == "material") return SubdomainClass::material;
  if (s == "source") return SubdomainClass::source;
  if (s == "pml") return SubdomainClass::pml;
  throw Error("unknown subdomain class: " + s);
}

// Complex coordinate stretches sampled on one local axis (identity outside
// PML). Face k sits between cells k-1 and k.
struct AxisStretch {
  std::vector<cdouble> center;  // n values
  std::vector<cdouble> face;    // n+1 values

  static AxisStretch identity(int n) {
    AxisStretch s;
    s.center.assign(n, cdouble(1, 0));
    s.face.assign(n + 1, cdouble(1, 0));
    return s;
  }

  // Sampled from a global PML layout at local offset `origin` (positions may
  // wrap on Bloch axes, where the stretch is identity anyway).
  static AxisStretch from_pml(const PMLSpec& pml, bool side_lo, bool side_hi, int origin,
                              int n_local, int n_global, double kappa) {
    AxisStretch s;
    s.center.resize(n_local);
    s.face.resize(n_local + 1);
    for (int i = 0; i < n_local; ++i)
      s.center[i] = pml.stretch(side_lo, side_hi, origin + i + 0.5, n_global, kappa);
    for (int i = 0; i <= n_local; ++i)
      s.face[i] = pml.stretch(side_lo, side_hi, double(origin + i), n_global, kappa);
    return s;
  }

  bool is_identity() const {
    for (const cdouble& z : center)
      if (z != cdouble(1, 0)) return false;
    for (const cdouble& z : face)
      if (z != cdouble(1, 0)) return false;
    return true;
  }
};

struct SubdomainProblem {
  SubdomainClass klass = SubdomainClass::material;
  double kappa = 0.0;
  WavevectorConvention convention = WavevectorConvention::paper_linear_eps;
  MaterialMap eps;        // n x n
  ComplexField2D source;  // local J, zero unless source class
  AxisStretch sx, sy;     // identity unless pml class
  std::array<bool, 4> outer_dirichlet = {false, false, false, false};  // by Edge
  BoundaryTraceSet g;

  int n() const { return eps.nx(); }

  // Conditioning image for the pml class: total imaginary stretch per cell.
  RealField2D pml_profile() const {
    RealField2D p(eps.nx(), eps.ny(), 0.0);
    for (int i = 0; i < eps.nx(); ++i)
      for (int j = 0; j < eps.ny(); ++j) p.at(i, j) = sx.center[i].imag() + sy.center[j].imag();
    return p;
  }

  // Everything that determines the factorization (g and source enter only the
  // right-hand side).
  std::string factor_key() const {
    Sha256 h;
    uint8_t k = uint8_t(klass), c = uint8_t(convention);
    h.update_value(k);
    h.update_value(c);
    h.update_value(kappa);
    h.update_vector(eps.eps.v);
    h.update_vector(sx.center);
    h.update_vector(sx.face);
    h.update_vector(sy.center);
    h.update_vector(sy.face);
    h.update(outer_dirichlet.data(), outer_dirichlet.size());
    return h.hex();
  }
};

namespace subdomain_detail {

inline bool edge_outer(const SubdomainProblem& p, Edge e) {
  return p.outer_dirichlet[int(e)];
}

struct RobinRow {
  int inward_count = 0;
  int inward[2] = {0, 0};
  cdouble rhs = {0, 0};
};

}  // namespace subdomain_detail

inline SparseMatrixC assemble_subdomain_matrix(const SubdomainProblem& p) {
  const int n = p.n();
  require(p.eps.ny() == n, "subdomain must be square");
  require(int(p.sx.center.size()) == n && int(p.sy.center.size()) == n,
          "stretch vectors must match subdomain size");
  const double kd = p.kappa;
  RealField2D kmap = wavevector_map_kappa(p.eps, kd, p.convention);

  auto id = [&](int i, int j) { return i * n + j; };
  auto inv_eps = [&](int i, int j) { return 1.0 / p.eps.at(i, j); };

  std::vector<Eigen::Triplet<cdouble>> trips;
  trips.reserve(size_t(5) * n * n);

  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      bool w = i == 0, e = i == n - 1, s = j == 0, nn = j == n - 1;
      if (!(w || e || s || nn)) {
        cdouble diag = cdouble(kd * kd, 0.0);
        cdouble al = 0.5 * (inv_eps(i - 1, j) + inv_eps(i, j)) / (p.sx.face[i] * p.sx.center[i]);
        cdouble ah =
            0.5 * (inv_eps(i, j) + inv_eps(i + 1, j)) / (p.sx.face[i + 1] * p.sx.center[i]);
        cdouble bl = 0.5 * (inv_eps(i, j - 1) + inv_eps(i, j)) / (p.sy.face[j] * p.sy.center[j]);
        cdouble bh =
            0.5 * (inv_eps(i, j) + inv_eps(i, j + 1)) / (p.sy.face[j + 1] * p.sy.center[j]);
        diag -= al + ah + bl + bh;
        trips.emplace_back(id(i, j), id(i - 1, j), al);
        trips.emplace_back(id(i, j), id(i + 1, j), ah);
        trips.emplace_back(id(i, j), id(i, j - 1), bl);
        trips.emplace_back(id(i, j), id(i, j + 1), bh);
        trips.emplace_back(id(i, j), id(i, j), diag);
        continue;
      }

      bool dirichlet = (w && subdomain_detail::edge_outer(p, Edge::W)) ||
                       (e && subdomain_detail::edge_outer(p, Edge::E)) ||
                       (s && subdomain_detail::edge_outer(p, Edge::S)) ||
                       (nn && subdomain_detail::edge_outer(p, Edge::N));
      if (dirichlet) {
        trips.emplace_back(id(i, j), id(i, j), cdouble(1, 0));
        continue;
      }

      // Robin row; corners average the two participating edge equations.
      int inw[2], cnt = 0;
      if (w) inw[cnt++] = id(i + 1, j);
      if (e) inw[cnt++] = id(i - 1, j);
      if (s) inw[cnt++] = id(i, j + 1);
      if (nn) inw[cnt++] = id(i, j - 1);
      trips.emplace_back(id(i, j), id(i, j), cdouble(0.0, kmap.at(i, j)) - 1.0);
      for (int q = 0; q < cnt; ++q)
        trips.emplace_back(id(i, j), inw[q], cdouble(1.0 / cnt, 0.0));
    }
  }

  SparseMatrixC m(n * n, n * n);
  m.setFromTriplets(trips.begin(), trips.end());
  m.makeCompressed();
  return m;
}

inline VectorC assemble_subdomain_rhs(const SubdomainProblem& p) {
  const int n = p.n();
  const double kd = p.kappa;
  VectorC b = VectorC::Zero(n * n);
  for (int i = 1; i < n - 1; ++i)
    for (int j = 1; j < n - 1; ++j) b[i * n + j] = cdouble(0.0, -kd) * p.source.at(i, j);

  auto robin_rhs = [&](int i, int j) -> cdouble {
    bool w = i == 0, e = i == n - 1, s = j == 0, nn = j == n - 1;
    cdouble acc(0, 0);
    int count = 0;
    if (w) { acc += p.g.edge(Edge::W)[j]; ++count; }
    if (e) { acc += p.g.edge(Edge::E)[j]; ++count; }
    if (s) { acc += p.g.edge(Edge::S)[i]; ++count; }
    if (nn) { acc += p.g.edge(Edge::N)[i]; ++count; }
    return acc / double(count);
  };

  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      bool w = i == 0, e = i == n - 1, s = j == 0, nn = j == n - 1;
      if (!(w || e || s || nn)) continue;
      bool dirichlet = (w && subdomain_detail::edge_outer(p, Edge::W)) ||
                       (e && subdomain_detail::edge_outer(p, Edge::E)) ||
                       (s && subdomain_detail::edge_outer(p, Edge::S)) ||
                       (nn && subdomain_detail::edge_outer(p, Edge::N));
      b[i * n + j] = dirichlet ? cdouble(0, 0) : robin_rhs(i, j);
    }
  }
  return b;
}

// Factorizations keyed by problem geometry (eps, class, stretches, convention):
// within a DDM run only g changes between iterations. Concurrent readers share
// factored objects; insertion is single-writer.
class SubdomainFactorCache {
 public:
  std::shared_ptr<const DirectSolver> get_or_factor(const SubdomainProblem& p) {
    std::string key = p.factor_key();
    {
      std::shared_lock lock(mu_);
      auto it = map_.find(key);
      if (it != map_.end()) return it->second;
    }
    auto solver = std::make_shared<DirectSolver>();
    solver->factor(assemble_subdomain_matrix(p));
    std::unique_lock lock(mu_);
    auto [it, inserted] = map_.emplace(key, std::move(solver));
    return it->second;
  }

  size_t size() const {
    std::shared_lock lock(mu_);
    return map_.size();
  }

  void clear() {
    std::unique_lock lock(mu_);
    map_.clear();
  }

 private:
  mutable std::shared_mutex mu_;
  std::unordered_map<std::string, std::shared_ptr<const DirectSolver>> map_;
};

inline ComplexField2D solve_subdomain_exact(const SubdomainProblem& p,
                                            SubdomainFactorCache* cache = nullptr) {
  const int n = p.n();
  VectorC b = assemble_subdomain_rhs(p);
  ComplexField2D h(n, n);
  if (b.cwiseAbs().sum() == 0.0) return h;  // homogeneous Robin problem

  VectorC x;
  if (cache != nullptr) {
    auto solver = cache->get_or_factor(p);
    x = solver->solve(b);
  } else {
    SparseMatrixC a = assemble_subdomain_matrix(p);
    DirectSolver solver;
    solver.factor(a);
    x = solver.solve(b);
    double rr = rel_l1_residual(a, x, b);
    require(rr < 1e-10, "solve_subdomain_exact: residual " + std::to_string(rr) +
                            " (eps range " + std::to_string(*std::min_element(
                                                 p.eps.eps.v.begin(), p.eps.eps.v.end())) +
                            ".." +
                            std::to_string(*std::max_element(p.eps.eps.v.begin(),
                                                             p.eps.eps.v.end())) +
                            "; near-resonant subdomain?)");
  }
  Eigen::Map<VectorC>(h.v.data(), x.size()) = x;
  require(h.all_finite(), "solve_subdomain_exact: non-finite field");
  return h;
}

// Subdomain problem for an n x n crop of a global layout at origin (ox, oy).
// Crops may wrap on Bloch axes (modular indexing; the source picks up the
// Bloch phase on wrapped cells). g is left zero for the caller to fill.
inline SubdomainProblem make_crop_problem(const MaterialMap& geps, const SourceMap& gsrc,
                                          const GridSpec& grid, const PMLSpec& pml,
                                          const std::vector<BlochSpec>& blochs, int ox, int oy,
                                          int n, WavevectorConvention conv) {
  bool bloch_x = false, bloch_y = false;
  cdouble phx(1, 0), phy(1, 0);
  for (const auto& b : blochs) {
    if (b.axis == 0) { bloch_x = true; phx = b.phase; }
    if (b.axis == 1) { bloch_y = true; phy = b.phase; }
  }
  require(ox >= 0 && oy >= 0, "make_crop_problem: negative origin");
  require(bloch_x ? ox < grid.nx : ox + n <= grid.nx, "make_crop_problem: x range");
  require(bloch_y ? oy < grid.ny : oy + n <= grid.ny, "make_crop_problem: y range");

  SubdomainProblem p;
  p.kappa = grid.kappa();
  p.convention = conv;
  p.eps = MaterialMap(n, n);
  p.source = ComplexField2D(n, n);
  p.g = BoundaryTraceSet(n);
  for (int i = 0; i < n; ++i) {
    int gx = ox + i;
    cdouble wx = (bloch_x && gx >= grid.nx) ? phx : cdouble(1, 0);
    gx = bloch_x ? gx % grid.nx : gx;
    for (int j = 0; j < n; ++j) {
      int gy = oy + j;
      cdouble wy = (bloch_y && gy >= grid.ny) ? phy : cdouble(1, 0);
      gy = bloch_y ? gy % grid.ny : gy;
      p.eps.at(i, j) = geps.at(gx, gy);
      p.source.at(i, j) = wx * wy * gsrc.at(gx, gy);
    }
  }
  p.sx = AxisStretch::from_pml(pml, pml.left, pml.right, ox, n, grid.nx, p.kappa);
  p.sy = AxisStretch::from_pml(pml, pml.bottom, pml.top, oy, n, grid.ny, p.kappa);
  p.outer_dirichlet[int(Edge::W)] = !bloch_x && ox == 0;
  p.outer_dirichlet[int(Edge::E)] = !bloch_x && ox + n == grid.nx;
  p.outer_dirichlet[int(Edge::S)] = !bloch_y && oy == 0;
  p.outer_dirichlet[int(Edge::N)] = !bloch_y && oy + n == grid.ny;
  return p;
}

inline bool crop_has_pml(const SubdomainProblem& p) {
  return !p.sx.is_identity() || !p.sy.is_identity();
}

inline bool crop_has_source(const SubdomainProblem& p) {
  for (const cdouble& z : p.source.v)
    if (z != cdouble(0, 0)) return true;
  return false;
}

// Content rule: PML cells win, then source cells, else material. `mixed` is
// set when the crop holds both PML and source cells (callers discard or error).
inline SubdomainClass classify_crop(const SubdomainProblem& p, bool* mixed = nullptr) {
  bool has_pml = crop_has_pml(p), has_src = crop_has_source(p);
  if (mixed) *mixed = has_pml && has_src;
  if (has_pml) return SubdomainClass::pml;
  if (has_src) return SubdomainClass::source;
  return SubdomainClass::material;
}

// Interior residual of the (possibly stretched) local stencil:
//   r = (1/sx) dx((1/(eps sx)) dx H) + (1/sy) dy((1/(eps sy)) dy H)
//       + kappa^2 H + i kappa J
// on cells [1, n-2]^2; border ring zero.
inline ComplexField2D local_residual_map(const MaterialMap& eps, const ComplexField2D& h,
                                         const ComplexField2D& src, double kappa,
                                         const AxisStretch& sx, const AxisStretch& sy) {
  const int nx = eps.nx(), ny = eps.ny();
  require(h.nx == nx && h.ny == ny && src.nx == nx && src.ny == ny,
          "local_residual_map: shape mismatch");
  ComplexField2D r(nx, ny);
  auto inv_eps = [&](int i, int j) { return 1.0 / eps.at(i, j); };
  for (int i = 1; i < nx - 1; ++i) {
    for (int j = 1; j < ny - 1; ++j) {
      cdouble al = 0.5 * (inv_eps(i - 1, j) + inv_eps(i, j)) / (sx.face[i] * sx.center[i]);
      cdouble ah = 0.5 * (inv_eps(i, j) + inv_eps(i + 1, j)) / (sx.face[i + 1] * sx.center[i]);
      cdouble bl = 0.5 * (inv_eps(i, j - 1) + inv_eps(i, j)) / (sy.face[j] * sy.center[j]);
      cdouble bh = 0.5 * (inv_eps(i, j) + inv_eps(i, j + 1)) / (sy.face[j + 1] * sy.center[j]);
      r.at(i, j) = ah * (h.at(i + 1, j) - h.at(i, j)) - al * (h.at(i, j) - h.at(i - 1, j)) +
                   bh * (h.at(i, j + 1) - h.at(i, j)) - bl * (h.at(i, j) - h.at(i, j - 1)) +
                   kappa * kappa * h.at(i, j) + cdouble(0.0, kappa) * src.at(i, j);
    }
  }
  return r;
}

}  // namespace snapddm

#endif  // SNAPDDM_SUBDOMAIN_HPP
