#pragma once

#include <ostream>

namespace andersen {

// Quick deterministic invariant checks across every module, one line per
// suite.  Meant as a smoke test of a build; the full statistical validation
// lives in the test binaries.  Returns true when all suites pass.
bool selftest(std::ostream& out);

}  // namespace andersen
