#pragma once

// Benchmark runs as driven by the command-line tool.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "higa/adaptivity.hpp"
#include "higa/problems.hpp"

namespace higa {

struct RunConfig {
  std::string problem = "square";
  int degree = 2;
  /// Unset: the benchmark's default.
  std::optional<double> theta;
  Mode mode = Mode::adaptive;
  MarkingSum marking = MarkingSum::linear;
  StopRule stop;
  /// Extra Gauss points per direction beyond p+1.
  int assembly_extra_points = 0;
  int estimator_extra_points = 1;
  LinearSolveOptions solver;
};

/// Throws ConfigError naming the offending field.
void validate(const RunConfig& config);

LoopConfig make_loop_config(const RunConfig& config, const Benchmark& bench);

struct RunResult {
  Benchmark bench;
  std::vector<HistoryRow> history;
  /// Mesh of the last step.
  HierarchicalMesh final_mesh;
};

RunResult run(const RunConfig& config, const std::function<void(const AdaptiveState&)>& observer = {});

/// One line with the trailing estimator rate and, when known, the
/// energy-error rate, e.g. "rate estimator -1.012 energy_error -1.021".
std::string rate_summary(const std::vector<HistoryRow>& history);

Mode parse_mode(const std::string& s);
MarkingSum parse_marking(const std::string& s);

}  // namespace higa
