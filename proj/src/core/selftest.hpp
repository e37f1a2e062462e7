// SPDX-License-Identifier: Apache-2.0
// Copyright (c) tinsum contributors

#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace tinsum {

struct SelftestCheck {
  std::string name;
  bool pass = false;
  std::string detail;  // filled on failure
};

struct SelftestResult {
  int passed = 0;
  int failed = 0;
  std::vector<SelftestCheck> checks;
};

/// Runs the library's invariant battery (eigensolver reconstruction, oracle
/// cross-checks, genie identities, threshold properties, optimizer sanity)
/// with deterministic draws from the given seed.
SelftestResult run_selftest(std::uint64_t seed);

} // namespace tinsum
