// Copyright 2026 The AquaCast Authors
// SPDX-License-Identifier: Apache-2.0

#include <iostream>

#include "aquacast/cli/app.hpp"

#if defined(__GLIBC__)
#include <malloc.h>
#endif

int main(int argc, char** argv) {
#if defined(__GLIBC__)
  // Keep the large per-step activation buffers on the heap instead of fresh
  // mmap()ed pages; otherwise page faults dominate a training step.
  mallopt(M_MMAP_THRESHOLD, 1 << 30);
  mallopt(M_TRIM_THRESHOLD, 1 << 30);
#endif
  return aquacast::cli::run({argv + 1, argv + argc}, std::cout, std::cerr);
}
