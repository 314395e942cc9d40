// Copyright (c) 2026 The snapddm Authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch_amalgamated.hpp>
#include <vector>

#include "snapddm/fft.hpp"
#include "snapddm/rng.hpp"

using namespace snapddm;

namespace {

// O(N^2) reference DFT
std::vector<cdouble> naive_dft2(int nx, int ny, const std::vector<cdouble>& in, int sign) {
  std::vector<cdouble> out(size_t(nx) * ny);
  for (int kx = 0; kx < nx; ++kx)
    for (int ky = 0; ky < ny; ++ky) {
      cdouble acc(0, 0);
      for (int x = 0; x < nx; ++x)
        for (int y = 0; y < ny; ++y) {
          double ph = 2.0 * M_PI * (double(kx) * x / nx + double(ky) * y / ny);
          acc += in[size_t(x) * ny + y] * std::polar(1.0, sign * ph);
        }
      out[size_t(kx) * ny + ky] = acc;
    }
  return out;
}

std::vector<cdouble> random_signal(int n, uint64_t seed) {
  Rng rng(seed);
  std::vector<cdouble> v(n);
  for (cdouble& z : v) z = {rng.uniform(-1, 1), rng.uniform(-1, 1)};
  return v;
}

}  // namespace

TEST_CASE("forward2d matches the naive DFT, including non-power-of-2 sizes") {
  for (auto [nx, ny] : {std::pair{8, 8}, {13, 7}, {16, 12}, {26, 10}}) {
    auto x = random_signal(nx * ny, 17 * nx + ny);
    std::vector<cdouble> got(x.size());
    fft::forward2d(nx, ny, x.data(), got.data());
    auto want = naive_dft2(nx, ny, x, -1);
    double err = 0;
    for (size_t i = 0; i < got.size(); ++i) err = std::max(err, std::abs(got[i] - want[i]));
    INFO("shape " << nx << "x" << ny);
    CHECK(err < 1e-10);
  }
}

TEST_CASE("backward2d is N times the inverse of forward2d") {
  int nx = 14, ny = 6;
  auto x = random_signal(nx * ny, 3);
  std::vector<cdouble> spec(x.size()), back(x.size());
  fft::forward2d(nx, ny, x.data(), spec.data());
  fft::backward2d(nx, ny, spec.data(), back.data());
  for (size_t i = 0; i < x.size(); ++i)
    CHECK(std::abs(back[i] / double(nx * ny) - x[i]) < 1e-12);
}

TEST_CASE("transforms are deterministic run to run") {
  int nx = 104, ny = 104;
  auto x = random_signal(nx * ny, 5);
  std::vector<cdouble> a(x.size()), b(x.size());
  fft::forward2d(nx, ny, x.data(), a.data());
  fft::forward2d(nx, ny, x.data(), b.data());
  CHECK(std::memcmp(a.data(), b.data(), a.size() * sizeof(cdouble)) == 0);
}
