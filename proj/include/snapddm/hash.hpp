// Copyright (c) 2026 The snapddm Authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef SNAPDDM_HASH_HPP
#define SNAPDDM_HASH_HPP

#include <openssl/evp.h>

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "snapddm/core.hpp"

namespace snapddm {

class Sha256 {
 public:
  Sha256() : ctx_(EVP_MD_CTX_new()) {
    require(ctx_ != nullptr, "EVP_MD_CTX_new failed");
    require(EVP_DigestInit_ex(ctx_, EVP_sha256(), nullptr) == 1, "sha256 init failed");
  }
  ~Sha256() { EVP_MD_CTX_free(ctx_); }
  Sha256(const Sha256&) = delete;
  Sha256& operator=(const Sha256&) = delete;

  void update(const void* data, size_t n) {
    require(EVP_DigestUpdate(ctx_, data, n) == 1, "sha256 update failed");
  }
  void update(const std::string& s) { update(s.data(), s.size()); }
  template <typename T>
  void update_value(const T& v) {
    update(&v, sizeof(T));
  }
  template <typename T>
  void update_vector(const std::vector<T>& v) {
    if (!v.empty()) update(v.data(), v.size() * sizeof(T));
  }

  std::string hex() {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    require(EVP_DigestFinal_ex(ctx_, digest, &len) == 1, "sha256 final failed");
    static const char* k = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
      out.push_back(k[digest[i] >> 4]);
      out.push_back(k[digest[i] & 0xf]);
    }
    return out;
  }

 private:
  EVP_MD_CTX* ctx_ = nullptr;
};

inline std::string sha256_hex(const void* data, size_t n) {
  Sha256 h;
  h.update(data, n);
  return h.hex();
}

inline std::string sha256_file_hex(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  require(bool(is), "cannot open for hashing: " + path);
  Sha256 h;
  char buf[1 << 16];
  while (is) {
    is.read(buf, sizeof(buf));
    if (is.gcount() > 0) h.update(buf, size_t(is.gcount()));
  }
  return h.hex();
}

}  // namespace snapddm

#endif  // SNAPDDM_HASH_HPP
