// Copyright (c) 2026 The snapddm Authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch_amalgamated.hpp>

#include "snapddm/ddm.hpp"

using namespace snapddm;

namespace {

std::map<SubdomainClass, SubdomainBackend*> all_classes(SubdomainBackend* b) {
  return {{SubdomainClass::material, b}, {SubdomainClass::source, b}, {SubdomainClass::pml, b}};
}

// 184x64 strip: PML left/right, Dirichlet top/bottom, source line mid-strip.
Problem strip_problem() {
  Problem p;
  p.grid = GridSpec(184, 64);
  p.eps = MaterialMap(184, 64, 1.0);
  for (int i = 100; i < 140; ++i)
    for (int j = 20; j < 44; ++j) p.eps.at(i, j) = 2.0;
  p.src = SourceMap(184, 64);
  for (int j = 8; j < 56; ++j) p.src.at(80, j) = {1.0, 0.0};
  p.pml = PMLSpec::none();
  p.pml.left = p.pml.right = true;
  p.pml.thickness = 16;
  return p;
}

// Serial backend that walks its batch in reverse order.
class ReversedExactBackend : public SubdomainBackend {
 public:
  std::string name() const override { return "exact-reversed"; }
  void solve_batch(SubdomainClass, const std::vector<const SubdomainProblem*>& problems,
                   std::vector<ComplexField2D*>& out) override {
    for (size_t q = problems.size(); q-- > 0;)
      *out[q] = solve_subdomain_exact(*problems[q], &cache_);
  }

 private:
  SubdomainFactorCache cache_;
};

// Pathological backend: amplifies the previous iterate.
class ExplodingBackend : public SubdomainBackend {
 public:
  std::string name() const override { return "exploding"; }
  void solve_batch(SubdomainClass, const std::vector<const SubdomainProblem*>& problems,
                   std::vector<ComplexField2D*>& out) override {
    ++calls_;
    for (size_t q = 0; q < problems.size(); ++q)
      for (cdouble& z : out[q]->v) z = std::pow(4.0, calls_) * cdouble(1.0, 0.5);
  }

 private:
  int calls_ = 0;
};

}  // namespace

TEST_CASE("tile reproduces the 15x15 layout on a 904-cell domain") {
  MaterialMap eps(904, 904, 1.0);
  SourceMap src(904, 904);
  for (int t = 80; t < 824; ++t) {
    src.at(64, t) = src.at(839, t) = {1, 0};
    src.at(t, 64) = src.at(t, 839) = {1, 0};
  }
  Tiling t = tile(904, 904, 4, eps, src, PMLSpec::all_sides(40));
  CHECK(t.tx == 15);
  CHECK(t.ty == 15);
  // the whole outer ring of subdomains is pml class
  for (int a = 0; a < 15; ++a)
    for (int b = 0; b < 15; ++b) {
      bool ring = a == 0 || b == 0 || a == 14 || b == 14;
      if (ring) CHECK(t.at(a, b).klass == SubdomainClass::pml);
    }
  // second ring holds the sources
  CHECK(t.at(1, 7).klass == SubdomainClass::source);
  CHECK(t.at(7, 7).klass == SubdomainClass::material);
}

TEST_CASE("single subdomain tiling has no donors") {
  MaterialMap eps(64, 64, 1.0);
  SourceMap src(64, 64);
  Tiling t = tile(64, 64, 8, eps, src, PMLSpec::none());
  REQUIRE(t.count() == 1);
  for (Edge e : kEdges) CHECK_FALSE(t.tiles[0].link[int(e)].has_donor);
}

TEST_CASE("indivisible sizes error with suggestions") {
  MaterialMap eps(320, 320, 1.0);
  SourceMap src(320, 320);
  CHECK_THROWS_WITH(tile(320, 320, 4, eps, src, PMLSpec::all_sides(40)),
                    Catch::Matchers::ContainsSubstring("304") &&
                        Catch::Matchers::ContainsSubstring("364"));
  CHECK_THROWS_AS(tile(304, 304, 1, eps, src, PMLSpec::none()), Error);
  CHECK_THROWS_AS(tile(304, 304, 40, eps, src, PMLSpec::none()), Error);
}

TEST_CASE("tiles holding both PML and source cells are rejected") {
  MaterialMap eps(304, 304, 1.0);
  SourceMap src(304, 304);
  src.at(45, 150) = {1, 0};  // inside the PML ring's tile
  CHECK_THROWS_WITH(tile(304, 304, 4, eps, src, PMLSpec::all_sides(40)),
                    Catch::Matchers::ContainsSubstring("increase margin"));
}

TEST_CASE("stitch weights form a partition of unity") {
  DeviceParams dp;
  dp.size = 304;
  Problem prob = make_random_device(dp, 3);
  for (int overlap : {2, 4, 16, 32}) {
    DDMConfig cfg;
    cfg.overlap = overlap;
    DDMContext ctx(prob, cfg);
    DDMState s = ctx.initial_state();
    for (auto& f : s.fields)
      for (cdouble& z : f.v) z = {1.0, 0.0};
    ComplexField2D out = stitch(s, ctx.tiling());
    for (const cdouble& z : out.v) CHECK(std::abs(z - cdouble(1, 0)) < 1e-12);
  }
}

TEST_CASE("stitching restrictions of one field reproduces it exactly") {
  Problem p = strip_problem();
  ComplexField2D truth = solve_global(p.eps, p.src, p.grid, p.pml);
  DDMConfig cfg;
  DDMContext ctx(p, cfg);
  DDMState s = ctx.initial_state();
  for (int t = 0; t < ctx.tiling().count(); ++t) {
    const Tile& tl = ctx.tiling().tiles[size_t(t)];
    for (int i = 0; i < kSub; ++i)
      for (int j = 0; j < kSub; ++j) s.fields[size_t(t)].at(i, j) = truth.at(tl.ox + i, tl.oy + j);
  }
  ComplexField2D out = stitch(s, ctx.tiling());
  double scale = mean_abs(truth);
  for (size_t i = 0; i < out.v.size(); ++i)
    CHECK(std::abs(out.v[i] - truth.v[i]) <= 1e-12 * std::max(1.0, scale));
}

TEST_CASE("zero source is a fixed point of the iteration") {
  Problem p = strip_problem();
  p.src = SourceMap(184, 64);  // J = 0
  ExactBackend exact;
  DDMConfig cfg;
  DDMContext ctx(p, cfg);
  DDMState s = ctx.initial_state();
  for (int k = 0; k < 3; ++k) {
    ddm_iterate(s, ctx, all_classes(&exact));
    for (const auto& f : s.fields)
      for (const cdouble& z : f.v) CHECK(z == cdouble(0, 0));
  }
}

TEST_CASE("single-subdomain DDM reproduces the global solve") {
  Problem p;
  p.grid = GridSpec(64, 64);
  p.eps = MaterialMap(64, 64, 1.0);
  for (int i = 24; i < 44; ++i)
    for (int j = 18; j < 40; ++j) p.eps.at(i, j) = 3.0;
  p.src = SourceMap(64, 64);
  p.src.at(14, 30) = {1.0, 0.0};
  p.pml = PMLSpec::none();  // Dirichlet box on all sides

  ComplexField2D truth = solve_global(p.eps, p.src, p.grid, p.pml);
  ExactBackend exact;
  DDMConfig cfg;
  cfg.max_iters = 1;
  DDMResult r = run_ddm(p, cfg, all_classes(&exact), &truth);
  CHECK(relative_l1(r.field, truth) < 1e-10);
}

TEST_CASE("the restriction of the global solution is a DDM fixed point") {
  Problem p = strip_problem();
  ComplexField2D truth = solve_global(p.eps, p.src, p.grid, p.pml);
  DDMConfig cfg;
  DDMContext ctx(p, cfg);
  const Tiling& tl = ctx.tiling();

  DDMState s = ctx.initial_state();
  for (int t = 0; t < tl.count(); ++t) {
    const Tile& tile_ = tl.tiles[size_t(t)];
    for (int i = 0; i < kSub; ++i)
      for (int j = 0; j < kSub; ++j)
        s.fields[size_t(t)].at(i, j) = truth.at(tile_.ox + i, tile_.oy + j);
  }
  // traces exactly as the engine would derive them from these fields
  for (int t = 0; t < tl.count(); ++t)
    for (Edge e : kEdges) {
      const TileEdgeLink& link = tl.tiles[size_t(t)].link[int(e)];
      if (!link.has_donor) continue;
      s.traces[size_t(t)].edge(e) =
          extract_g(s.fields[size_t(link.donor)], ctx.kmap(link.donor), e, link.donor_line);
    }

  std::vector<ComplexField2D> before = s.fields;
  ExactBackend exact;
  ddm_iterate(s, ctx, all_classes(&exact));
  for (int t = 0; t < tl.count(); ++t) {
    double num = 0, den = 0;
    for (size_t i = 0; i < before[size_t(t)].v.size(); ++i) {
      num += std::abs(s.fields[size_t(t)].v[i] - before[size_t(t)].v[i]);
      den += std::abs(before[size_t(t)].v[i]);
    }
    CHECK(num / std::max(den, 1e-300) < 1e-8);
  }
}

TEST_CASE("iteration output does not depend on subdomain processing order") {
  Problem p = strip_problem();
  ExactBackend parallel;
  ReversedExactBackend reversed;
  DDMConfig cfg;
  DDMContext ctx(p, cfg);

  DDMState a = ctx.initial_state(), b = ctx.initial_state();
  for (int k = 0; k < 3; ++k) {
    ddm_iterate(a, ctx, all_classes(&parallel));
    ddm_iterate(b, ctx, all_classes(&reversed));
  }
  for (int t = 0; t < ctx.tiling().count(); ++t)
    CHECK(a.fields[size_t(t)].v == b.fields[size_t(t)].v);
}

TEST_CASE("strip DDM converges geometrically to the global solution") {
  Problem p = strip_problem();
  ComplexField2D truth = solve_global(p.eps, p.src, p.grid, p.pml);
  ExactBackend exact;
  DDMConfig cfg;
  cfg.max_iters = 40;
  DDMResult r = run_ddm(p, cfg, all_classes(&exact), &truth);

  const auto& log = r.state.log;
  REQUIRE(log.size() == 40);
  CHECK(log.back().rel_l1 < 1e-6);
  // per-iteration contraction once the sweep has crossed the strip
  for (size_t k = 3; k + 1 < log.size(); ++k)
    if (log[k].rel_l1 > 1e-12) CHECK(log[k + 1].rel_l1 < log[k].rel_l1);
}

TEST_CASE("uniform strip with a Dirichlet box converges too") {
  Problem p;
  p.grid = GridSpec(124, 64);
  p.eps = MaterialMap(124, 64, 1.0);
  p.src = SourceMap(124, 64);
  p.src.at(30, 32) = {1.0, 0.0};
  p.pml = PMLSpec::none();
  ComplexField2D truth = solve_global(p.eps, p.src, p.grid, p.pml);
  ExactBackend exact;
  DDMConfig cfg;
  cfg.max_iters = 60;
  DDMResult r = run_ddm(p, cfg, all_classes(&exact), &truth);
  double first = r.state.log.front().rel_l1, last = r.state.log.back().rel_l1;
  CHECK(last < 1e-4);
  CHECK(last < first);
}

TEST_CASE("max_iters = 0 returns the zero field and an empty trace") {
  Problem p = strip_problem();
  ExactBackend exact;
  DDMConfig cfg;
  cfg.max_iters = 0;
  DDMResult r = run_ddm(p, cfg, all_classes(&exact));
  CHECK(r.state.log.empty());
  for (const cdouble& z : r.field.v) CHECK(z == cdouble(0, 0));
}

TEST_CASE("residual clearly growing for 20 iterations aborts with a diagnostic") {
  Problem p = strip_problem();
  ExplodingBackend bad;
  DDMConfig cfg;
  cfg.max_iters = 100;
  CHECK_THROWS_WITH(run_ddm(p, cfg, all_classes(&bad)),
                    Catch::Matchers::ContainsSubstring("diverging"));
}

TEST_CASE("missing backend for a present class errors") {
  Problem p = strip_problem();
  ExactBackend exact;
  std::map<SubdomainClass, SubdomainBackend*> only_pml = {{SubdomainClass::pml, &exact}};
  DDMConfig cfg;
  cfg.max_iters = 1;
  CHECK_THROWS_WITH(run_ddm(p, cfg, only_pml),
                    Catch::Matchers::ContainsSubstring("no backend"));
}

TEST_CASE("Bloch-periodic DDM matches the global Bloch solve") {
  Problem p;
  p.grid = GridSpec(120, 184);
  p.eps = MaterialMap(120, 184, 1.0);
  for (int i = 30; i < 72; ++i)
    for (int j = 84; j < 108; ++j) p.eps.at(i, j) = 2.25;
  p.src = SourceMap(120, 184);
  cdouble ramp = std::polar(1.0, 2.0 * M_PI * 3.0 / 120.0);  // 3 periods across
  cdouble amp(1.0, 0.0);
  for (int i = 0; i < 120; ++i) {
    p.src.at(i, 40) = amp;
    amp *= ramp;
  }
  p.pml = PMLSpec::none();
  p.pml.bottom = p.pml.top = true;
  p.pml.thickness = 40;
  p.blochs = {BlochSpec{0, std::polar(1.0, 2.0 * M_PI * 3.0)}};  // phase of the full period

  ComplexField2D truth = solve_global(p.eps, p.src, p.grid, p.pml, p.blochs);
  ExactBackend exact;
  DDMConfig cfg;
  cfg.max_iters = 120;
  cfg.stop_rel_l1 = 0.02;
  DDMResult r = run_ddm(p, cfg, all_classes(&exact), &truth);
  CHECK(r.state.log.back().rel_l1 < 0.02);
}

TEST_CASE("higher-index devices converge strictly slower (15% ordering)") {
  auto iters_to_15 = [&](double eps_fill, uint64_t seed) {
    DeviceParams dp;
    dp.size = 424;
    dp.mode = MaterialMode::constant;
    dp.eps_max = eps_fill;
    Problem prob = make_random_device(dp, seed);
    ComplexField2D truth = solve_global(prob.eps, prob.src, prob.grid, prob.pml);
    ExactBackend exact;
    DDMConfig cfg;
    cfg.max_iters = 400;
    cfg.stop_rel_l1 = 0.15;
    DDMResult r = run_ddm(prob, cfg, all_classes(&exact), &truth);
    REQUIRE(r.converged);
    return r.state.log.back().iter;
  };
  CHECK(iters_to_15(2.48 * 2.48, 51) > iters_to_15(1.5 * 1.5, 51));
}
