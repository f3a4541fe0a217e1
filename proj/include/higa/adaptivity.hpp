#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "higa/assembly.hpp"
#include "higa/estimator.hpp"

namespace higa {

/// Positions of a minimal set M with theta * sum(eta_sq) <= sum_M eta_sq:
/// largest indicators first, ties by position. Returned in ascending order.
std::vector<int> doerfler_mark(std::span<const double> eta_sq, double theta);

std::vector<ActiveElement> doerfler_mark(const ElementIndicators& ind, double theta);

enum class Mode { adaptive, uniform };

/// Quantity summed by the bulk criterion of the adaptive loop. `squared`
/// selects the minimal set with theta * sum eta^2 <= sum_M eta^2. `linear`
/// selects the minimal set with theta * sum eta <= sum_M eta; a largest-first
/// prefix of that kind also meets the squared criterion, with more elements.
enum class MarkingSum { squared, linear };

std::vector<int> doerfler_mark(std::span<const double> eta_sq, double theta, MarkingSum sum);

struct StopRule {
  long max_dofs = 30000;
  int max_steps = 30;
  double eta_tol = 0.0;
  /// Stop once the mesh has at least this many elements; 0 disables.
  long max_elements = 0;
  /// Stop once the finest level reaches this value; kMaxLevel is the hard limit.
  int max_level = kMaxLevel;
};

struct HistoryRow {
  int step = 0;
  long n_elements = 0;
  long n_dofs = 0;
  int max_level = 0;
  double estimator = 0.0;
  /// NaN when no exact solution is known.
  double energy_error = std::numeric_limits<double>::quiet_NaN();
  long n_marked = 0;
};

struct AdaptiveState {
  int step = 0;
  HierarchicalMesh mesh;
  std::vector<HierBasisFunction> basis;
  std::vector<double> coeffs;
  ElementIndicators indicators;
  HistoryRow row;
};

struct LoopConfig {
  PDEProblem problem;
  GeometryMap geometry;
  TensorKnotVector knots0;
  double theta = 0.5;
  Mode mode = Mode::adaptive;
  MarkingSum marking = MarkingSum::linear;
  StopRule stop;
  GradientFn exact_gradient;  // optional
  LinearSolveOptions solver;
  AssemblyOptions assembly;
  EstimatorOptions estimator;
};

/// Solve, estimate, mark, refine until a stop rule fires. The observer sees
/// every state; the returned history has one row per step.
std::vector<HistoryRow> adaptive_loop(const LoopConfig& config,
                                      const std::function<void(const AdaptiveState&)>& observer = {});

/// Least-squares slope of log y against log x.
double fit_slope(std::span<const double> x, std::span<const double> y);

enum class RateQuantity { estimator, energy_error };

/// Slope over the trailing rows that span at least `min_decades` of element
/// counts and hold at least `min_points` rows. Throws InvalidInput when the
/// history is too short.
double fit_rate(std::span<const HistoryRow> history, RateQuantity which = RateQuantity::estimator,
                int min_points = 6, double min_decades = 1.0);

std::string history_csv_header();
std::string history_csv_row(const HistoryRow& row);

}  // namespace higa
