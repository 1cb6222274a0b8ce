// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace lpvtr {

struct SelftestCase {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Quick seeded property checks over every module (a few seconds).
std::vector<SelftestCase> run_selftest(std::uint64_t seed = 0);

}  // namespace lpvtr
