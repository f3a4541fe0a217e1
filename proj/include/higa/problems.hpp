#pragma once

#include <functional>
#include <string>
#include <string_view>

#include "higa/assembly.hpp"

namespace higa {

struct Benchmark {
  std::string name;
  PDEProblem problem;
  GeometryMap geometry;
  TensorKnotVector knots0;
  /// Empty when no closed-form solution is known.
  std::function<double(const EvalPoint&)> exact_solution;
  GradientFn exact_gradient;
  double default_theta = 0.5;
};

/// "square", "lshape" or "quarter-ring" ("quarter_ring" also accepted) with
/// the initial ansatz knots for spline degree p in both directions.
Benchmark problem_library(std::string_view name, int degree);

/// Square solution u = x^2.3 (1-x) y^2.9 (1-y) and its derivatives.
double square_u(double x, double y);
Point square_grad(double x, double y);
double square_f(double x, double y);

}  // namespace higa
