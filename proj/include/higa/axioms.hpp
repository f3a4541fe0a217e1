#pragma once

// Randomized property suite over refinement scenarios. Checks structural
// mesh and basis properties only; no PDE is solved.

#include <cstdint>
#include <string>
#include <vector>

namespace higa {

struct AxiomOptions {
  int scenarios = 200;
  std::uint64_t seed = 1;
  /// Degrees cycled through the scenarios, p in both directions.
  std::vector<int> degrees{1, 2, 3};
  /// Mesh size at which a scenario stops refining.
  int max_elements = 160;
};

struct AxiomCheck {
  std::string name;
  long cases = 0;
  long failures = 0;
  /// Description of the first failure, empty when none.
  std::string first_failure;
};

struct AxiomReport {
  std::vector<AxiomCheck> checks;
  int scenarios = 0;
  double seconds = 0.0;
  /// Largest number of active elements seen in a first-order patch.
  long max_patch = 0;

  bool ok() const;
  std::string to_text() const;
};

AxiomReport verify_axioms(const AxiomOptions& opts = {});

}  // namespace higa
