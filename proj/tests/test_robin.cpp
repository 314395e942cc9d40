// Copyright (c) 2026 The snapddm Authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch_amalgamated.hpp>

#include "snapddm/rng.hpp"
#include "snapddm/robin.hpp"

using namespace snapddm;

namespace {

ComplexField2D random_field(int nx, int ny, uint64_t seed) {
  Rng rng(seed);
  ComplexField2D f(nx, ny);
  for (cdouble& z : f.v) z = {rng.uniform(-1, 1), rng.uniform(-1, 1)};
  return f;
}

}  // namespace

TEST_CASE("wavevector_map conventions") {
  GridSpec grid(16, 16);
  double kd = grid.kappa();

  MaterialMap air(16, 16, 1.0);
  auto k_paper = wavevector_map(air, grid, WavevectorConvention::paper_linear_eps);
  auto k_sqrt = wavevector_map(air, grid, WavevectorConvention::sqrt_eps);
  for (size_t i = 0; i < k_paper.v.size(); ++i) {
    CHECK_THAT(k_paper.v[i], Catch::Matchers::WithinRel(kd, 1e-15));
    CHECK_THAT(k_sqrt.v[i], Catch::Matchers::WithinRel(kd, 1e-15));
  }

  MaterialMap four(16, 16, 4.0);
  CHECK_THAT(wavevector_map(four, grid, WavevectorConvention::paper_linear_eps).at(3, 5),
             Catch::Matchers::WithinRel(4.0 * kd, 1e-15));
  CHECK_THAT(wavevector_map(four, grid, WavevectorConvention::sqrt_eps).at(3, 5),
             Catch::Matchers::WithinRel(2.0 * kd, 1e-15));
}

TEST_CASE("extract_g on constant and zero fields") {
  const int n = 16;
  const double kappa = 0.2;
  RealField2D kmap(n, n, kappa);
  cdouble c(0.7, -0.4);
  ComplexField2D h(n, n, c);
  for (Edge e : kEdges) {
    int line = (e == Edge::W || e == Edge::S) ? 0 : n - 1;
    auto g = extract_g(h, kmap, e, line);
    for (const cdouble& z : g) CHECK(std::abs(z - cdouble(0.0, kappa) * c) < 1e-15);
  }

  ComplexField2D zero(n, n);
  auto g0 = extract_g(zero, kmap, Edge::N, n - 1);
  for (const cdouble& z : g0) CHECK(z == cdouble(0, 0));
}

TEST_CASE("extract_g on a plane wave matches the closed form") {
  const int n = 32;
  const double kappa = 0.15;
  RealField2D kmap(n, n, kappa);
  ComplexField2D h(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) h.at(i, j) = std::polar(1.0, kappa * i);

  auto g = extract_g(h, kmap, Edge::E, n - 1);
  cdouble factor = cdouble(0.0, kappa) - (1.0 - std::polar(1.0, -kappa));
  for (int t = 0; t < n; ++t) {
    CHECK(std::abs(g[t] - factor * h.at(n - 1, t)) < 1e-14);
    // analytic Robin data for an outgoing plane wave vanishes to O(kappa^2)
    CHECK(std::abs(g[t]) <= kappa * kappa);
  }
}

TEST_CASE("extract_g rejects traces without an inward neighbor") {
  ComplexField2D h(8, 8, cdouble(1, 0));
  RealField2D k(8, 8, 0.1);
  CHECK_THROWS_AS(extract_g(h, k, Edge::E, 0), Error);   // inward would be -1
  CHECK_THROWS_AS(extract_g(h, k, Edge::W, 7), Error);   // inward would be 8
  CHECK_THROWS_AS(extract_g(h, k, Edge::N, 9), Error);   // outside
}

TEST_CASE("extract_g is linear in H") {
  const int n = 24;
  RealField2D kmap(n, n, 0.12);
  ComplexField2D h1 = random_field(n, n, 1), h2 = random_field(n, n, 2);
  cdouble a(0.3, 1.1), b(-0.8, 0.2);
  ComplexField2D hc(n, n);
  for (size_t i = 0; i < hc.v.size(); ++i) hc.v[i] = a * h1.v[i] + b * h2.v[i];
  for (Edge e : kEdges) {
    int line = (e == Edge::W || e == Edge::S) ? 0 : n - 1;
    auto g1 = extract_g(h1, kmap, e, line);
    auto g2 = extract_g(h2, kmap, e, line);
    auto gc = extract_g(hc, kmap, e, line);
    for (size_t t = 0; t < gc.size(); ++t)
      CHECK(std::abs(gc[t] - (a * g1[t] + b * g2[t])) < 1e-13);
  }
}

TEST_CASE("rasterize zero traces gives zero channels") {
  BoundaryTraceSet bt(16);
  auto [re, im] = rasterize_traces(bt);
  for (double x : re.v) CHECK(x == 0.0);
  for (double x : im.v) CHECK(x == 0.0);
}

TEST_CASE("single nonzero W-edge entry hits exactly one pixel per channel") {
  BoundaryTraceSet bt(16);
  bt.edge(Edge::W)[7] = {1.5, -2.5};
  auto [re, im] = rasterize_traces(bt);
  int nonzero_re = 0, nonzero_im = 0;
  for (double x : re.v) nonzero_re += x != 0.0;
  for (double x : im.v) nonzero_im += x != 0.0;
  CHECK(nonzero_re == 1);
  CHECK(nonzero_im == 1);
  CHECK(re.at(0, 7) == 1.5);
  CHECK(im.at(0, 7) == -2.5);
}

TEST_CASE("rasterize/derasterize round trip matches except corners") {
  const int n = 16;
  Rng rng(8);
  BoundaryTraceSet bt(n);
  for (Edge e : kEdges)
    for (cdouble& z : bt.edge(e)) z = {rng.uniform(-1, 1), rng.uniform(-1, 1)};
  auto [re, im] = rasterize_traces(bt);
  BoundaryTraceSet back = derasterize_traces(re, im);
  for (Edge e : kEdges)
    for (size_t t = 1; t + 1 < back.edge(e).size(); ++t)
      CHECK(std::abs(back.edge(e)[t] - bt.edge(e)[t]) < 1e-15);
}

TEST_CASE("bc_residual is definitionally zero for self-extracted traces") {
  const int n = 20;
  GridSpec grid(n, n);
  Rng rng(3);
  MaterialMap eps(n, n, 1.0);
  for (double& e : eps.eps.v) e = rng.uniform(1.0, 6.0);
  auto kmap = wavevector_map(eps, grid, WavevectorConvention::paper_linear_eps);
  ComplexField2D h = random_field(n, n, 12);
  BoundaryTraceSet bt = extract_boundary_traces(h, kmap);
  CHECK(bc_residual(h, kmap, bt) < 1e-14);

  // convention switch changes g but the round trip still closes
  auto kmap2 = wavevector_map(eps, grid, WavevectorConvention::sqrt_eps);
  BoundaryTraceSet bt2 = extract_boundary_traces(h, kmap2);
  CHECK(bc_residual(h, kmap2, bt2) < 1e-14);
  double diff = 0;
  for (size_t t = 0; t < bt.edge(Edge::W).size(); ++t)
    diff = std::max(diff, std::abs(bt.edge(Edge::W)[t] - bt2.edge(Edge::W)[t]));
  CHECK(diff > 1e-6);
}

TEST_CASE("bc_residual with zero traces equals the mean Robin magnitude") {
  const int n = 64;
  RealField2D kmap(n, n, 0.08);
  ComplexField2D h = random_field(n, n, 77);
  BoundaryTraceSet zero(n);
  BoundaryTraceSet own = extract_boundary_traces(h, kmap);
  double expect = 0;
  for (Edge e : kEdges)
    for (const cdouble& z : own.edge(e)) expect += std::abs(z);
  expect /= 4.0 * n;
  CHECK_THAT(bc_residual(h, kmap, zero), Catch::Matchers::WithinRel(expect, 1e-12));
}

TEST_CASE("bc_residual responds Lipschitz-boundedly to one-cell edge perturbations") {
  const int n = 64;
  const double kappa = 0.3;
  RealField2D kmap(n, n, kappa);
  ComplexField2D h = random_field(n, n, 5);
  BoundaryTraceSet bt = extract_boundary_traces(h, kmap);

  double delta = 1e-3;
  ComplexField2D hp = h;
  hp.at(32, 0) += delta;  // mid-cell of the S edge
  double r = bc_residual(hp, kmap, bt);
  CHECK(r <= (kappa + 2.0) * delta / 256.0 + 1e-15);
}
