#pragma once

// Fast self-check of the simulator's invariants, run by `gkp-readout validate`.

#include <string>
#include <vector>

namespace gkp {

struct InvariantCheck {
  std::string name;
  bool passed = false;
  std::string detail;  // measured quantity against its bound
};

std::vector<InvariantCheck> run_invariant_suite();

}  // namespace gkp
