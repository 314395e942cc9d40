// Copyright (c) 2026 The snapddm Authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch_amalgamated.hpp>
#include <sstream>

#include "snapddm/core.hpp"
#include "snapddm/io.hpp"
#include "snapddm/rng.hpp"

using namespace snapddm;

namespace {

ComplexField2D random_field(int nx, int ny, uint64_t seed) {
  Rng rng(seed);
  ComplexField2D f(nx, ny);
  for (cdouble& z : f.v) z = {rng.uniform(-1, 1), rng.uniform(-1, 1)};
  return f;
}

}  // namespace

TEST_CASE("relative_l1 identity and scaling") {
  ComplexField2D b = random_field(16, 16, 7);
  CHECK(relative_l1(b, b) == 0.0);

  ComplexField2D a = b;
  for (cdouble& z : a.v) z *= 1.05;
  CHECK_THAT(relative_l1(a, b), Catch::Matchers::WithinAbs(0.05, 1e-12));
}

TEST_CASE("relative_l1 matches brute-force loop") {
  ComplexField2D a = random_field(64, 64, 1), b = random_field(64, 64, 2);
  // independent oracle: plain double loop
  double num = 0, den = 0;
  for (int i = 0; i < 64; ++i)
    for (int j = 0; j < 64; ++j) {
      num += std::abs(a.at(i, j) - b.at(i, j));
      den += std::abs(b.at(i, j));
    }
  CHECK_THAT(relative_l1(a, b), Catch::Matchers::WithinAbs(num / den, 1e-14));
}

TEST_CASE("relative_l1 errors") {
  ComplexField2D a(8, 8), b(8, 9);
  CHECK_THROWS_AS(relative_l1(a, b), Error);
  ComplexField2D z(8, 8);  // identically zero reference
  CHECK_THROWS_WITH(relative_l1(a, z), Catch::Matchers::ContainsSubstring("degenerate"));
}

TEST_CASE("relative_l1 is phase-rotation invariant and positive") {
  Rng rng(33);
  for (int trial = 0; trial < 20; ++trial) {
    ComplexField2D a = random_field(12, 10, 100 + trial), b = random_field(12, 10, 200 + trial);
    double base = relative_l1(a, b);
    CHECK(base >= 0.0);
    cdouble phase = std::polar(1.0, rng.uniform(0, 2 * M_PI));
    ComplexField2D ar = a, br = b;
    for (cdouble& z : ar.v) z *= phase;
    for (cdouble& z : br.v) z *= phase;
    CHECK_THAT(relative_l1(ar, br), Catch::Matchers::WithinRel(base, 1e-12));
  }
}

TEST_CASE("GridSpec defaults reproduce the nominal resolution") {
  GridSpec g(64, 64);
  CHECK_THAT(g.kappa(), Catch::Matchers::WithinAbs(2.0 * M_PI * 6.25e-9 / 1.05e-6, 1e-6));
  CHECK_THAT(g.kappa(), Catch::Matchers::WithinAbs(0.037400, 1e-6));
}

TEST_CASE("GridSpec invariants") {
  CHECK_THROWS_AS(GridSpec(4, 64), Error);
  CHECK_THROWS_AS(GridSpec(64, 64, -1.0, 1.05e-6), Error);
  // 4 cells per wavelength -> k0*delta > 1
  CHECK_THROWS_AS(GridSpec(64, 64, 3e-7, 1.05e-6), Error);
}

TEST_CASE("CF2D round trip") {
  ComplexField2D f = random_field(9, 17, 42);
  std::stringstream ss;
  write_cf2d(ss, f);
  ComplexField2D g = read_cf2d(ss);
  REQUIRE(g.same_shape(f));
  for (size_t i = 0; i < f.v.size(); ++i) CHECK(g.v[i] == f.v[i]);
}

TEST_CASE("CF2D rejects truncation and bad magic") {
  ComplexField2D f = random_field(8, 8, 5);
  std::stringstream ss;
  write_cf2d(ss, f);
  std::string bytes = ss.str();
  {
    std::stringstream cut(bytes.substr(0, bytes.size() / 2));
    CHECK_THROWS_WITH(read_cf2d(cut), Catch::Matchers::ContainsSubstring("truncated"));
  }
  {
    bytes[0] = 'X';
    std::stringstream bad(bytes);
    CHECK_THROWS_AS(read_cf2d(bad), Error);
  }
}

TEST_CASE("EPS2 round trip") {
  MaterialMap m(7, 5);
  Rng rng(9);
  for (double& e : m.eps.v) e = rng.uniform(1.0, 16.0);
  std::stringstream ss;
  write_eps2(ss, m);
  MaterialMap r = read_eps2(ss);
  REQUIRE(r.nx() == 7);
  REQUIRE(r.ny() == 5);
  for (size_t i = 0; i < m.eps.v.size(); ++i) CHECK(r.eps.v[i] == m.eps.v[i]);
}

TEST_CASE("CSV round trip is bit-identical") {
  ComplexField2D f = random_field(6, 4, 11);
  std::stringstream csv1;
  write_field_csv(csv1, f);
  std::stringstream in(csv1.str());
  ComplexField2D g = read_field_csv(in);
  std::stringstream csv2;
  write_field_csv(csv2, g);
  CHECK(csv1.str() == csv2.str());
}
