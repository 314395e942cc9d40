// Copyright (c) 2026 The snapddm Authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0
//
// Subdomain training samples and the SNDS dataset container.
//
// SNDS layout (little-endian): magic 'S','N','D','S', u32 header length, a
// fixed 4096-byte JSON header block (counts per class, grid, seeds, format
// version), then fixed-size records:
//   eps   f32 x 4096
//   src   c64 x 4096      (complex64 = f32 re, f32 im)
//   pml   f32 x 4096
//   g     c64 x 256       (edges W, E, N, S; 64 entries each)
//   H     c64 x 4096
//   class u8              (0 material, 1 source, 2 pml)

#ifndef SNAPDDM_DATASET_HPP
#define SNAPDDM_DATASET_HPP

#include <nlohmann/json.hpp>

#include <fstream>

#include "snapddm/fdfd.hpp"
#include "snapddm/geom.hpp"
#include "snapddm/subdomain.hpp"

namespace snapddm {

struct SubdomainSample {
  SubdomainClass klass = SubdomainClass::material;
  MaterialMap eps;          // 64x64
  ComplexField2D source;    // zero unless source class
  RealField2D pml_profile;  // zero unless pml class
  BoundaryTraceSet g;
  ComplexField2D h;  // ground truth

  // exact-solver metadata (in memory only, not serialized)
  double kappa = 0.0;
  WavevectorConvention convention = WavevectorConvention::paper_linear_eps;
  AxisStretch sx, sy;
  std::array<bool, 4> outer_dirichlet = {false, false, false, false};

  SubdomainProblem to_problem() const {
    SubdomainProblem p;
    p.klass = klass;
    p.kappa = kappa;
    p.convention = convention;
    p.eps = eps;
    p.source = source;
    p.sx = sx;
    p.sy = sy;
    p.outer_dirichlet = outer_dirichlet;
    p.g = g;
    return p;
  }
};

namespace dataset_detail {

template <typename T>
Grid2D<T> rot90(const Grid2D<T>& in) {
  // (i, j) -> (n-1-j, i): +90 degrees in the (x, y) plane
  Grid2D<T> out(in.ny, in.nx);
  for (int i = 0; i < in.nx; ++i)
    for (int j = 0; j < in.ny; ++j) out.at(in.ny - 1 - j, i) = in.at(i, j);
  return out;
}

}  // namespace dataset_detail

// Rotates every channel coherently by one quarter turn. Edges relabel as
// W<-N, E<-S, S<-reverse(W), N<-reverse(E); the x stretch becomes the
// reversed y stretch.
inline SubdomainSample rotate90(const SubdomainSample& s) {
  SubdomainSample r = s;
  r.eps.eps = dataset_detail::rot90(s.eps.eps);
  r.source = dataset_detail::rot90(s.source);
  r.pml_profile = dataset_detail::rot90(s.pml_profile);
  r.h = dataset_detail::rot90(s.h);

  r.g.edge(Edge::W) = s.g.edge(Edge::N);
  r.g.edge(Edge::E) = s.g.edge(Edge::S);
  r.g.edge(Edge::S) = s.g.edge(Edge::W);
  std::reverse(r.g.edge(Edge::S).begin(), r.g.edge(Edge::S).end());
  r.g.edge(Edge::N) = s.g.edge(Edge::E);
  std::reverse(r.g.edge(Edge::N).begin(), r.g.edge(Edge::N).end());

  int n = s.eps.nx();
  r.sx.center.assign(n, cdouble(1, 0));
  r.sx.face.assign(n + 1, cdouble(1, 0));
  for (int i = 0; i < n; ++i) r.sx.center[i] = s.sy.center[n - 1 - i];
  for (int k = 0; k <= n; ++k) r.sx.face[k] = s.sy.face[n - k];
  r.sy = s.sx;

  r.outer_dirichlet[int(Edge::W)] = s.outer_dirichlet[int(Edge::N)];
  r.outer_dirichlet[int(Edge::E)] = s.outer_dirichlet[int(Edge::S)];
  r.outer_dirichlet[int(Edge::S)] = s.outer_dirichlet[int(Edge::W)];
  r.outer_dirichlet[int(Edge::N)] = s.outer_dirichlet[int(Edge::E)];
  return r;
}

inline SubdomainSample rotate(const SubdomainSample& s, int quarter_turns) {
  SubdomainSample r = s;
  for (int q = 0; q < (quarter_turns % 4 + 4) % 4; ++q) r = rotate90(r);
  return r;
}

// Class-aware interior residual of a sample's ground truth (PML crops check
// the stretched stencil; others the plain one with forcing).
inline double sample_interior_residual(const SubdomainSample& s) {
  ComplexField2D r = local_residual_map(s.eps, s.h, s.source, s.kappa, s.sx, s.sy);
  double mean = 0;
  for (const cdouble& z : r.v) mean += std::abs(z);
  return mean / double(r.size());
}

struct CropOptions {
  int count = 100;
  uint64_t seed = 0;
  bool augment_rot = false;
  WavevectorConvention convention = WavevectorConvention::paper_linear_eps;
  int max_attempts_factor = 64;  // resample budget per requested crop
};

// Random 64x64 crops of one solved simulation. Crops straddling both PML and
// source cells are discarded and resampled. g comes from the ground-truth
// field on the crop perimeter.
inline std::vector<SubdomainSample> crop_subdomains(const Problem& prob,
                                                    const ComplexField2D& h,
                                                    const CropOptions& opt) {
  const int nx = prob.grid.nx, ny = prob.grid.ny;
  require(h.nx == nx && h.ny == ny, "crop_subdomains: field shape mismatch");
  require(nx >= kSub && ny >= kSub, "crop_subdomains: domain smaller than a subdomain");
  Rng rng(opt.seed);
  std::vector<SubdomainSample> out;
  out.reserve(opt.count);
  long budget = long(opt.count) * opt.max_attempts_factor;

  while (int(out.size()) < opt.count && budget-- > 0) {
    int ox = int(rng.uniform_index(uint64_t(nx - kSub + 1)));
    int oy = int(rng.uniform_index(uint64_t(ny - kSub + 1)));
    SubdomainProblem p = make_crop_problem(prob.eps, prob.src, prob.grid, prob.pml, prob.blochs,
                                           ox, oy, kSub, opt.convention);
    bool mixed = false;
    SubdomainClass klass = classify_crop(p, &mixed);
    if (mixed) continue;

    SubdomainSample s;
    s.klass = klass;
    s.kappa = p.kappa;
    s.convention = opt.convention;
    s.eps = p.eps;
    s.source = klass == SubdomainClass::source ? p.source : ComplexField2D(kSub, kSub);
    s.sx = p.sx;
    s.sy = p.sy;
    s.outer_dirichlet = p.outer_dirichlet;
    s.pml_profile = klass == SubdomainClass::pml ? p.pml_profile() : RealField2D(kSub, kSub, 0.0);
    s.h = ComplexField2D(kSub, kSub);
    for (int i = 0; i < kSub; ++i)
      for (int j = 0; j < kSub; ++j) s.h.at(i, j) = h.at(ox + i, oy + j);
    auto kmap = wavevector_map_kappa(s.eps, s.kappa, opt.convention);
    s.g = extract_boundary_traces(s.h, kmap);

    if (opt.augment_rot) s = rotate(s, int(rng.uniform_index(4)));
    out.push_back(std::move(s));
  }
  require(int(out.size()) == opt.count,
          "crop_subdomains: resample budget exhausted (domain layout leaves too few "
          "single-class crops)");
  return out;
}

// ---- SNDS container ----------------------------------------------------

constexpr size_t kSndsHeaderBytes = 4096;
constexpr size_t kSndsCells = size_t(kSub) * kSub;
constexpr size_t kSndsRecordBytes = kSndsCells * 4    // eps f32
                                    + kSndsCells * 8  // src c64
                                    + kSndsCells * 4  // pml f32
                                    + 256 * 8         // g c64
                                    + kSndsCells * 8  // H c64
                                    + 1;              // class u8

struct SndsHeader {
  int format_version = 1;
  double kappa = GridSpec(64, 64).kappa();
  std::string convention = "paper_linear_eps";
  long count_material = 0, count_source = 0, count_pml = 0;
  std::vector<uint64_t> seeds;

  long total() const { return count_material + count_source + count_pml; }

  nlohmann::json to_json() const {
    return {{"format", "SNDS"},
            {"format_version", format_version},
            {"grid", {{"n", kSub}, {"kappa", kappa}}},
            {"convention", convention},
            {"counts",
             {{"material", count_material}, {"source", count_source}, {"pml", count_pml}}},
            {"seeds", seeds},
            {"record_bytes", kSndsRecordBytes}};
  }

  static SndsHeader from_json(const nlohmann::json& j) {
    require(j.value("format", "") == "SNDS", "SNDS: bad header format tag");
    SndsHeader h;
    h.format_version = j.at("format_version").get<int>();
    require(h.format_version == 1, "SNDS: unsupported format version");
    h.kappa = j.at("grid").at("kappa").get<double>();
    h.convention = j.at("convention").get<std::string>();
    h.count_material = j.at("counts").at("material").get<long>();
    h.count_source = j.at("counts").at("source").get<long>();
    h.count_pml = j.at("counts").at("pml").get<long>();
    h.seeds = j.at("seeds").get<std::vector<uint64_t>>();
    require(j.at("record_bytes").get<size_t>() == kSndsRecordBytes, "SNDS: record size mismatch");
    return h;
  }
};

namespace dataset_detail {

inline void put_f32(std::ostream& os, float x) { os.write(reinterpret_cast<char*>(&x), 4); }

inline void put_c64(std::ostream& os, cdouble z) {
  put_f32(os, float(z.real()));
  put_f32(os, float(z.imag()));
}

inline void write_padded_header(std::ostream& os, const SndsHeader& h) {
  std::string j = h.to_json().dump();
  require(j.size() + 1 <= kSndsHeaderBytes, "SNDS: header too large");
  os.write("SNDS", 4);
  uint32_t len = uint32_t(j.size());
  os.write(reinterpret_cast<char*>(&len), 4);
  os.write(j.data(), std::streamsize(j.size()));
  std::string pad(kSndsHeaderBytes - j.size(), '\0');
  os.write(pad.data(), std::streamsize(pad.size()));
}

}  // namespace dataset_detail

// Single-writer appender; the padded header is rewritten with final counts on
// close so output bytes depend only on the written records.
class SndsWriter {
 public:
  SndsWriter(const std::string& path, SndsHeader header)
      : os_(path, std::ios::binary), header_(std::move(header)), path_(path) {
    require(bool(os_), "SNDS: cannot open for write: " + path);
    dataset_detail::write_padded_header(os_, header_);
  }

  void append(const SubdomainSample& s) {
    require(s.eps.nx() == kSub && s.eps.ny() == kSub, "SNDS: sample must be 64x64");
    using dataset_detail::put_c64;
    using dataset_detail::put_f32;
    for (double e : s.eps.eps.v) put_f32(os_, float(e));
    for (const cdouble& z : s.source.v) put_c64(os_, z);
    for (double x : s.pml_profile.v) put_f32(os_, float(x));
    for (Edge e : kEdges) {
      require(s.g.edge(e).size() == kSub, "SNDS: trace length must be 64");
      for (const cdouble& z : s.g.edge(e)) put_c64(os_, z);
    }
    for (const cdouble& z : s.h.v) put_c64(os_, z);
    char cls = char(uint8_t(s.klass));
    os_.write(&cls, 1);
    switch (s.klass) {
      case SubdomainClass::material: ++header_.count_material; break;
      case SubdomainClass::source: ++header_.count_source; break;
      case SubdomainClass::pml: ++header_.count_pml; break;
    }
  }

  void close() {
    if (!os_.is_open()) return;
    os_.seekp(0);
    dataset_detail::write_padded_header(os_, header_);
    os_.close();
    require(bool(os_), "SNDS: write failed: " + path_);
  }

  const SndsHeader& header() const { return header_; }

  ~SndsWriter() {
    try {
      close();
    } catch (...) {
    }
  }

 private:
  std::ofstream os_;
  SndsHeader header_;
  std::string path_;
};

class SndsReader {
 public:
  explicit SndsReader(const std::string& path) : is_(path, std::ios::binary) {
    require(bool(is_), "SNDS: cannot open: " + path);
    char magic[4];
    is_.read(magic, 4);
    require(is_.gcount() == 4 && std::memcmp(magic, "SNDS", 4) == 0, "not an SNDS file");
    uint32_t len = 0;
    is_.read(reinterpret_cast<char*>(&len), 4);
    require(bool(is_) && len > 0 && len <= kSndsHeaderBytes, "SNDS: bad header length");
    std::string j(len, '\0');
    is_.read(j.data(), len);
    require(bool(is_), "SNDS: truncated header");
    header_ = SndsHeader::from_json(nlohmann::json::parse(j));
    is_.seekg(0, std::ios::end);
    size_t payload = size_t(is_.tellg()) - 8 - kSndsHeaderBytes;
    require(payload == size_t(header_.total()) * kSndsRecordBytes,
            "SNDS: truncated or oversized payload");
  }

  const SndsHeader& header() const { return header_; }
  long size() const { return header_.total(); }

  // Loads record k. Channel data was stored in f32; stretch metadata is not
  // serialized, so pml-class samples round their stretches from the profile.
  SubdomainSample read(long k) {
    require(k >= 0 && k < size(), "SNDS: record index out of range");
    is_.clear();
    is_.seekg(std::streamoff(8 + kSndsHeaderBytes + size_t(k) * kSndsRecordBytes));
    std::vector<char> buf(kSndsRecordBytes);
    is_.read(buf.data(), std::streamsize(buf.size()));
    require(is_.gcount() == std::streamsize(buf.size()), "SNDS: truncated record");

    const char* p = buf.data();
    auto f32 = [&p]() {
      float x;
      std::memcpy(&x, p, 4);
      p += 4;
      return double(x);
    };
    auto c64 = [&]() {
      double re = f32(), im = f32();
      return cdouble(re, im);
    };

    SubdomainSample s;
    s.kappa = header_.kappa;
    s.convention = wavevector_convention_from_string(header_.convention);
    s.eps = MaterialMap(kSub, kSub);
    for (double& e : s.eps.eps.v) e = f32();
    s.source = ComplexField2D(kSub, kSub);
    for (cdouble& z : s.source.v) z = c64();
    s.pml_profile = RealField2D(kSub, kSub, 0.0);
    for (double& x : s.pml_profile.v) x = f32();
    s.g = BoundaryTraceSet(kSub);
    for (Edge e : kEdges)
      for (cdouble& z : s.g.edge(e)) z = c64();
    s.h = ComplexField2D(kSub, kSub);
    for (cdouble& z : s.h.v) z = c64();
    s.klass = SubdomainClass(uint8_t(*p));
    s.sx = AxisStretch::identity(kSub);
    s.sy = AxisStretch::identity(kSub);
    if (s.klass == SubdomainClass::pml) decode_pml_stretch(s);
    return s;
  }

  std::vector<SubdomainSample> read_all() {
    std::vector<SubdomainSample> out;
    out.reserve(size_t(size()));
    for (long k = 0; k < size(); ++k) out.push_back(read(k));
    return out;
  }

  // Separable decomposition profile(i,j) = fx(i) + fy(j); exact whenever the
  // crop has at least one stretch-free row and column (always true for layers
  // thinner than the subdomain).
  static void decode_pml_stretch(SubdomainSample& s) {
    const RealField2D& pr = s.pml_profile;
    double pmin = 1e300;
    for (double x : pr.v) pmin = std::min(pmin, x);
    std::vector<double> fx(kSub, 1e300), fy(kSub, 1e300);
    for (int i = 0; i < kSub; ++i)
      for (int j = 0; j < kSub; ++j) {
        fx[i] = std::min(fx[i], pr.at(i, j));
        fy[j] = std::min(fy[j], pr.at(i, j));
      }
    for (int i = 0; i < kSub; ++i) {
      s.sx.center[i] = cdouble(1.0, std::max(0.0, fx[i] - pmin));
      s.sy.center[i] = cdouble(1.0, std::max(0.0, fy[i] - pmin));
    }
    // midpoint faces; interior faces only (ends clamp)
    for (int k = 0; k <= kSub; ++k) {
      int a = std::max(0, k - 1), b = std::min(kSub - 1, k);
      s.sx.face[k] = 0.5 * (s.sx.center[a] + s.sx.center[b]);
      s.sy.face[k] = 0.5 * (s.sy.center[a] + s.sy.center[b]);
    }
  }

 private:
  std::ifstream is_;
  SndsHeader header_;
};

}  // namespace snapddm

#endif  // SNAPDDM_DATASET_HPP
