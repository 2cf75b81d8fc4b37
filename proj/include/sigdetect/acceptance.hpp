// acceptance.hpp - the end-to-end verification suite behind `sigdetect selftest`.
#pragma once

#include <cstdint>
#include <vector>

namespace sigdetect {

struct AcceptanceOptions {
  std::vector<int> criteria;  // empty: run all (1..11)
  int threads = 0;
  std::uint64_t seed = 20250809;
};

/// Runs the requested criteria, printing one PASS/FAIL line per criterion.
/// Returns the number of failed criteria.
int run_acceptance(const AcceptanceOptions& opts);

}  // namespace sigdetect
