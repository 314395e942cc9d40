// Copyright (c) 2026 The snapddm Authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include <cstdio>

int main() {
  std::printf("snapddm placeholder\n");
  return 0;
}
