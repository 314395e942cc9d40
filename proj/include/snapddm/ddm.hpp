// Copyright (c) 2026 The snapddm Authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0
//
// Overlapping Schwarz iteration: batched per-class subdomain solves (Jacobi
// sweep - every tile solves from iteration-k traces, then all traces update
// from the fresh fields), partition-of-unity stitching, and residual-based
// termination.

#ifndef SNAPDDM_DDM_HPP
#define SNAPDDM_DDM_HPP

#include <chrono>
#include <functional>
#include <limits>
#include <map>
#include <memory>

#include "snapddm/fdfd.hpp"
#include "snapddm/parallel.hpp"
#include "snapddm/tiling.hpp"

namespace snapddm {

// Solves one class's subdomains as a batch. Outputs go to preassigned slots,
// so results cannot depend on scheduling order.
class SubdomainBackend {
 public:
  virtual ~SubdomainBackend() = default;
  virtual std::string name() const = 0;
  virtual void solve_batch(SubdomainClass klass,
                           const std::vector<const SubdomainProblem*>& problems,
                           std::vector<ComplexField2D*>& out) = 0;
};

class ExactBackend : public SubdomainBackend {
 public:
  std::string name() const override { return "exact"; }

  void solve_batch(SubdomainClass, const std::vector<const SubdomainProblem*>& problems,
                   std::vector<ComplexField2D*>& out) override {
    require(problems.size() == out.size(), "ExactBackend: slot mismatch");
    parallel_for(problems.size(), [&](size_t i) {
      try {
        *out[i] = solve_subdomain_exact(*problems[i], &cache_);
      } catch (const std::exception& e) {
        throw Error("subdomain " + std::to_string(i) + ": " + e.what());
      }
    });
  }

  SubdomainFactorCache& cache() { return cache_; }

 private:
  SubdomainFactorCache cache_;
};

struct DDMConfig {
  int overlap = 4;
  int max_iters = 500;
  double residual_tol = 0.0;   // physics-residue stop; 0 disables
  double stop_rel_l1 = 0.0;    // oracle-error stop; 0 disables (needs oracle)
  WavevectorConvention convention = WavevectorConvention::paper_linear_eps;
};

struct DDMIterRecord {
  int iter = 0;
  double mean_pde_residual = 0.0;
  double rel_l1 = -1.0;  // vs oracle; -1 when no oracle supplied
  double wall_ms = 0.0;
};

struct DDMState {
  int iteration = 0;
  std::vector<ComplexField2D> fields;
  std::vector<BoundaryTraceSet> traces;
  std::vector<DDMIterRecord> log;
};

// Immutable per-run data: tiling, per-tile base problems and wavevector maps.
class DDMContext {
 public:
  DDMContext(const Problem& prob, const DDMConfig& cfg)
      : problem_(prob),
        tiling_(tile(prob.grid.nx, prob.grid.ny, cfg.overlap, prob.eps, prob.src, prob.pml,
                     prob.blochs)) {
    base_.reserve(size_t(tiling_.count()));
    kmaps_.reserve(size_t(tiling_.count()));
    for (const Tile& t : tiling_.tiles) {
      SubdomainProblem p = make_crop_problem(prob.eps, prob.src, prob.grid, prob.pml,
                                             prob.blochs, t.ox, t.oy, kSub, cfg.convention);
      p.klass = t.klass;
      base_.push_back(std::move(p));
      kmaps_.push_back(
          wavevector_map_kappa(base_.back().eps, base_.back().kappa, cfg.convention));
    }
  }

  const Tiling& tiling() const { return tiling_; }
  const Problem& problem() const { return problem_; }
  const SubdomainProblem& base(int t) const { return base_[size_t(t)]; }
  const RealField2D& kmap(int t) const { return kmaps_[size_t(t)]; }

  DDMState initial_state() const {
    DDMState s;
    s.fields.assign(size_t(tiling_.count()), ComplexField2D(kSub, kSub));
    s.traces.assign(size_t(tiling_.count()), BoundaryTraceSet(kSub));
    return s;
  }

 private:
  Problem problem_;
  Tiling tiling_;
  std::vector<SubdomainProblem> base_;
  std::vector<RealField2D> kmaps_;
};

// One Jacobi sweep: batched per-class solves from the current traces, then the
// boundary-value update from the fresh fields.
inline void ddm_iterate(DDMState& state, const DDMContext& ctx,
                        const std::map<SubdomainClass, SubdomainBackend*>& backends) {
  const Tiling& tl = ctx.tiling();
  int n_tiles = tl.count();

  std::vector<SubdomainProblem> probs{size_t(n_tiles)};
  for (int t = 0; t < n_tiles; ++t) {
    probs[size_t(t)] = ctx.base(t);
    probs[size_t(t)].g = state.traces[size_t(t)];
  }

  std::vector<ComplexField2D> fresh(size_t(n_tiles), ComplexField2D(kSub, kSub));
  for (SubdomainClass klass :
       {SubdomainClass::material, SubdomainClass::source, SubdomainClass::pml}) {
    std::vector<const SubdomainProblem*> batch;
    std::vector<ComplexField2D*> slots;
    for (int t = 0; t < n_tiles; ++t)
      if (tl.tiles[size_t(t)].klass == klass) {
        batch.push_back(&probs[size_t(t)]);
        slots.push_back(&fresh[size_t(t)]);
      }
    if (batch.empty()) continue;
    auto it = backends.find(klass);
    require(it != backends.end() && it->second != nullptr,
            std::string("ddm_iterate: no backend registered for class ") + to_string(klass));
    try {
      it->second->solve_batch(klass, batch, slots);
    } catch (const std::exception& e) {
      throw Error(std::string("ddm_iterate: ") + to_string(klass) + " batch failed at iteration " +
                  std::to_string(state.iteration + 1) + ": " + e.what());
    }
  }

  // Boundary value update (iteration k+1 inputs from iteration k+1... fields
  // solved this sweep; receivers sample donors' fresh fields on their own
  // boundary lines).
  std::vector<BoundaryTraceSet> next{size_t(n_tiles), BoundaryTraceSet(kSub)};
  for (int t = 0; t < n_tiles; ++t) {
    const Tile& tile_r = tl.tiles[size_t(t)];
    for (Edge e : kEdges) {
      const TileEdgeLink& link = tile_r.link[int(e)];
      if (!link.has_donor) continue;  // outer edges keep g = 0
      std::vector<cdouble> g =
          extract_g(fresh[size_t(link.donor)], ctx.kmap(link.donor), e, link.donor_line);
      if (link.phase != cdouble(1, 0))
        for (cdouble& z : g) z *= link.phase;
      next[size_t(t)].edge(e) = std::move(g);
    }
  }

  state.fields = std::move(fresh);
  state.traces = std::move(next);
  state.iteration += 1;
}

// Partition-of-unity blend of the per-tile fields onto the global grid.
inline ComplexField2D stitch(const DDMState& state, const Tiling& tl) {
  ComplexField2D out(tl.nx, tl.ny);
  require(state.fields.size() == size_t(tl.count()), "stitch: field count mismatch");
  for (int t = 0; t < tl.count(); ++t) {
    const Tile& tile = tl.tiles[size_t(t)];
    std::vector<double> wx =
        stitch_ramp(tl, tile.link[int(Edge::W)].has_donor, tile.link[int(Edge::E)].has_donor);
    std::vector<double> wy =
        stitch_ramp(tl, tile.link[int(Edge::S)].has_donor, tile.link[int(Edge::N)].has_donor);
    const ComplexField2D& f = state.fields[size_t(t)];
    for (int i = 0; i < kSub; ++i) {
      int gx = tile.ox + i;
      cdouble px(1, 0);
      if (tl.bloch_x && gx >= tl.nx) { gx -= tl.nx; px = std::conj(tl.phase_x); }
      for (int j = 0; j < kSub; ++j) {
        int gy = tile.oy + j;
        cdouble py(1, 0);
        if (tl.bloch_y && gy >= tl.ny) { gy -= tl.ny; py = std::conj(tl.phase_y); }
        out.at(gx, gy) += wx[size_t(i)] * wy[size_t(j)] * px * py * f.at(i, j);
      }
    }
  }
  return out;
}

struct DDMResult {
  ComplexField2D field;
  DDMState state;
  bool converged = false;
  std::string stop_reason;
};

inline DDMResult run_ddm(const Problem& prob, const DDMConfig& cfg,
                         const std::map<SubdomainClass, SubdomainBackend*>& backends,
                         const ComplexField2D* oracle = nullptr) {
  DDMContext ctx(prob, cfg);
  DDMState state = ctx.initial_state();
  DDMResult res;
  res.stop_reason = "max_iters";

  double min_residual = std::numeric_limits<double>::infinity();
  int growing = 0;
  using clock = std::chrono::steady_clock;
  auto t0 = clock::now();

  for (int k = 0; k < cfg.max_iters; ++k) {
    ddm_iterate(state, ctx, backends);
    ComplexField2D stitched = stitch(state, ctx.tiling());

    DDMIterRecord rec;
    rec.iter = state.iteration;
    ComplexField2D resid = pde_residual_map(prob.eps, stitched, prob.src, prob.grid);
    rec.mean_pde_residual = mean_interior_residual(resid, prob.pml);
    if (oracle != nullptr) rec.rel_l1 = relative_l1(stitched, *oracle);
    rec.wall_ms = std::chrono::duration<double, std::milli>(clock::now() - t0).count();
    state.log.push_back(rec);

    min_residual = std::min(min_residual, rec.mean_pde_residual);
    growing = rec.mean_pde_residual > 10.0 * min_residual ? growing + 1 : 0;
    if (growing >= 20)
      throw Error("run_ddm: diverging - residual " + std::to_string(rec.mean_pde_residual) +
                  " grew 10x above its minimum " + std::to_string(min_residual) +
                  " for 20 consecutive iterations (iteration " + std::to_string(rec.iter) + ")");

    if (cfg.residual_tol > 0.0 && rec.mean_pde_residual < cfg.residual_tol) {
      res.converged = true;
      res.stop_reason = "residual_tol";
      res.field = std::move(stitched);
      res.state = std::move(state);
      return res;
    }
    if (cfg.stop_rel_l1 > 0.0 && oracle != nullptr && rec.rel_l1 < cfg.stop_rel_l1) {
      res.converged = true;
      res.stop_reason = "rel_l1";
      res.field = std::move(stitched);
      res.state = std::move(state);
      return res;
    }
  }

  res.field = cfg.max_iters > 0 ? stitch(state, ctx.tiling()) : ComplexField2D(prob.grid.nx,
                                                                               prob.grid.ny);
  res.state = std::move(state);
  return res;
}

}  // namespace snapddm

#endif  // SNAPDDM_DDM_HPP
