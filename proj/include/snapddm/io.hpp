// Copyright (c) 2026 The snapddm Authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0
//
// Binary field containers. All formats are little-endian with versioned
// headers:
//   CF2D: 'C','F','2','D', u16 version, u32 nx, u32 ny, nx*ny (f64 re, f64 im)
//   EPS2: 'E','P','S','2', u16 version, u32 nx, u32 ny, nx*ny f64
// Payload order is row-major with x outer, y inner.

#ifndef SNAPDDM_IO_HPP
#define SNAPDDM_IO_HPP

#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "snapddm/core.hpp"

namespace snapddm {

namespace detail {

static_assert(sizeof(double) == 8, "f64 doubles required");

inline void put_bytes(std::ostream& os, const void* p, size_t n) {
  os.write(static_cast<const char*>(p), std::streamsize(n));
}

inline void get_bytes(std::istream& is, void* p, size_t n, const char* what) {
  is.read(static_cast<char*>(p), std::streamsize(n));
  if (is.gcount() != std::streamsize(n)) throw Error(std::string("truncated file: ") + what);
}

template <typename T>
void put_le(std::ostream& os, T x) {
  // this codebase targets little-endian hosts only
  put_bytes(os, &x, sizeof(T));
}

template <typename T>
T get_le(std::istream& is, const char* what) {
  T x;
  get_bytes(is, &x, sizeof(T), what);
  return x;
}

}  // namespace detail

constexpr uint16_t kFieldFormatVersion = 1;

inline void write_cf2d(std::ostream& os, const ComplexField2D& f) {
  os.write("CF2D", 4);
  detail::put_le<uint16_t>(os, kFieldFormatVersion);
  detail::put_le<uint32_t>(os, uint32_t(f.nx));
  detail::put_le<uint32_t>(os, uint32_t(f.ny));
  for (const cdouble& z : f.v) {
    detail::put_le<double>(os, z.real());
    detail::put_le<double>(os, z.imag());
  }
}

inline void write_cf2d(const std::string& path, const ComplexField2D& f) {
  std::ofstream os(path, std::ios::binary);
  require(bool(os), "cannot open for write: " + path);
  write_cf2d(os, f);
  require(bool(os), "write failed: " + path);
}

inline ComplexField2D read_cf2d(std::istream& is) {
  char magic[4];
  detail::get_bytes(is, magic, 4, "CF2D magic");
  require(std::memcmp(magic, "CF2D", 4) == 0, "not a CF2D file");
  uint16_t ver = detail::get_le<uint16_t>(is, "CF2D version");
  require(ver == kFieldFormatVersion, "unsupported CF2D version");
  uint32_t nx = detail::get_le<uint32_t>(is, "CF2D nx");
  uint32_t ny = detail::get_le<uint32_t>(is, "CF2D ny");
  require(nx > 0 && ny > 0, "CF2D: empty shape");
  ComplexField2D f{int(nx), int(ny)};
  for (cdouble& z : f.v) {
    double re = detail::get_le<double>(is, "CF2D payload");
    double im = detail::get_le<double>(is, "CF2D payload");
    z = {re, im};
  }
  return f;
}

inline ComplexField2D read_cf2d(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  require(bool(is), "cannot open: " + path);
  return read_cf2d(is);
}

inline void write_eps2(std::ostream& os, const MaterialMap& m) {
  os.write("EPS2", 4);
  detail::put_le<uint16_t>(os, kFieldFormatVersion);
  detail::put_le<uint32_t>(os, uint32_t(m.nx()));
  detail::put_le<uint32_t>(os, uint32_t(m.ny()));
  for (double e : m.eps.v) detail::put_le<double>(os, e);
}

inline void write_eps2(const std::string& path, const MaterialMap& m) {
  std::ofstream os(path, std::ios::binary);
  require(bool(os), "cannot open for write: " + path);
  write_eps2(os, m);
  require(bool(os), "write failed: " + path);
}

inline MaterialMap read_eps2(std::istream& is) {
  char magic[4];
  detail::get_bytes(is, magic, 4, "EPS2 magic");
  require(std::memcmp(magic, "EPS2", 4) == 0, "not an EPS2 file");
  uint16_t ver = detail::get_le<uint16_t>(is, "EPS2 version");
  require(ver == kFieldFormatVersion, "unsupported EPS2 version");
  uint32_t nx = detail::get_le<uint32_t>(is, "EPS2 nx");
  uint32_t ny = detail::get_le<uint32_t>(is, "EPS2 ny");
  require(nx > 0 && ny > 0, "EPS2: empty shape");
  MaterialMap m{int(nx), int(ny)};
  for (double& e : m.eps.v) e = detail::get_le<double>(is, "EPS2 payload");
  return m;
}

inline MaterialMap read_eps2(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  require(bool(is), "cannot open: " + path);
  return read_eps2(is);
}

// CSV exchange format: header "x,y,re,im", one row per cell, %.17g floats so a
// CSV -> CF2D -> CSV round trip is bit-identical.
inline void write_field_csv(std::ostream& os, const ComplexField2D& f) {
  os << "x,y,re,im\n";
  char buf[96];
  for (int ix = 0; ix < f.nx; ++ix)
    for (int iy = 0; iy < f.ny; ++iy) {
      const cdouble& z = f.at(ix, iy);
      std::snprintf(buf, sizeof(buf), "%d,%d,%.17g,%.17g\n", ix, iy, z.real(), z.imag());
      os << buf;
    }
}

inline ComplexField2D read_field_csv(std::istream& is) {
  std::string line;
  require(bool(std::getline(is, line)), "empty CSV");
  require(line.rfind("x,y", 0) == 0, "CSV missing x,y,re,im header");
  struct Row {
    int x, y;
    double re, im;
  };
  std::vector<Row> rows;
  int max_x = -1, max_y = -1;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    Row r;
    require(std::sscanf(line.c_str(), "%d,%d,%lg,%lg", &r.x, &r.y, &r.re, &r.im) == 4,
            "malformed CSV row: " + line);
    max_x = std::max(max_x, r.x);
    max_y = std::max(max_y, r.y);
    rows.push_back(r);
  }
  require(max_x >= 0 && max_y >= 0, "CSV has no data rows");
  ComplexField2D f(max_x + 1, max_y + 1);
  for (const Row& r : rows) f.at(r.x, r.y) = {r.re, r.im};
  return f;
}

// 16-bit PGM of |H| normalized to its maximum. PGM payloads are MSB-first per
// the netpbm spec; the header comment records the normalization constant.
inline void write_field_pgm16(std::ostream& os, const ComplexField2D& f) {
  double peak = 0.0;
  for (const cdouble& z : f.v) peak = std::max(peak, std::abs(z));
  char hdr[128];
  std::snprintf(hdr, sizeof(hdr), "P5\n# max |H| = %.17g\n%d %d\n65535\n", peak, f.ny, f.nx);
  os << hdr;
  for (int ix = 0; ix < f.nx; ++ix)
    for (int iy = 0; iy < f.ny; ++iy) {
      double a = peak > 0.0 ? std::abs(f.at(ix, iy)) / peak : 0.0;
      auto q = uint16_t(std::lround(a * 65535.0));
      char b[2] = {char(q >> 8), char(q & 0xff)};
      os.write(b, 2);
    }
}

}  // namespace snapddm

#endif  // SNAPDDM_IO_HPP
