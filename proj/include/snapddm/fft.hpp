// Copyright (c) 2026 The snapddm Authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0
//
// Thin FFTW3 wrapper: unnormalized complex 2D DFTs on row-major (x outer)
// arrays. Plans are cached per shape/sign (FFTW_ESTIMATE, so planning is
// deterministic); execution copies through per-thread fftw-aligned scratch,
// which keeps fftw_execute_dft thread-safe across concurrent callers.

#ifndef SNAPDDM_FFT_HPP
#define SNAPDDM_FFT_HPP

#include <fftw3.h>

#include <complex>
#include <map>
#include <mutex>

#include "snapddm/core.hpp"

namespace snapddm::fft {

namespace detail {

inline fftw_plan plan_for(int nx, int ny, int sign) {
  static std::mutex mu;
  static std::map<std::tuple<int, int, int>, fftw_plan> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto key = std::make_tuple(nx, ny, sign);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  fftw_complex* proto = fftw_alloc_complex(size_t(nx) * ny);
  require(proto != nullptr, "fftw_alloc_complex failed");
  fftw_plan p = fftw_plan_dft_2d(nx, ny, proto, proto, sign, FFTW_ESTIMATE);
  fftw_free(proto);
  require(p != nullptr, "fftw_plan_dft_2d failed");
  cache.emplace(key, p);
  return p;
}

struct Scratch {
  fftw_complex* buf = nullptr;
  size_t cap = 0;
  ~Scratch() {
    if (buf) fftw_free(buf);
  }
  fftw_complex* ensure(size_t n) {
    if (n > cap) {
      if (buf) fftw_free(buf);
      buf = fftw_alloc_complex(n);
      require(buf != nullptr, "fftw_alloc_complex failed");
      cap = n;
    }
    return buf;
  }
};

inline void dft2(int nx, int ny, int sign, const cdouble* in, cdouble* out) {
  size_t n = size_t(nx) * ny;
  fftw_plan p = plan_for(nx, ny, sign);
  thread_local Scratch scratch;
  fftw_complex* b = scratch.ensure(n);
  for (size_t i = 0; i < n; ++i) {
    b[i][0] = in[i].real();
    b[i][1] = in[i].imag();
  }
  fftw_execute_dft(p, b, b);
  for (size_t i = 0; i < n; ++i) out[i] = {b[i][0], b[i][1]};
}

}  // namespace detail

// X[k] = sum_n x[n] exp(-2*pi*i*k.n/N), unnormalized.
inline void forward2d(int nx, int ny, const cdouble* in, cdouble* out) {
  detail::dft2(nx, ny, FFTW_FORWARD, in, out);
}

// x[n] = sum_k X[k] exp(+2*pi*i*k.n/N), unnormalized (caller scales by 1/N
// when an inverse transform is wanted).
inline void backward2d(int nx, int ny, const cdouble* in, cdouble* out) {
  detail::dft2(nx, ny, FFTW_BACKWARD, in, out);
}

}  // namespace snapddm::fft

#endif  // SNAPDDM_FFT_HPP
