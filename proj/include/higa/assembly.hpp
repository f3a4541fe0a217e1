#pragma once

#include <functional>
#include <span>
#include <vector>

#include "higa/element_eval.hpp"
#include "higa/geometry.hpp"
#include "higa/hierbasis.hpp"
#include "higa/linear_solver.hpp"
#include "higa/sparse.hpp"

namespace higa {

/// -div(A grad u) + b . grad u + c u = f with homogeneous Dirichlet data.
/// Empty callbacks mean A = I, b = 0, c = 0, div A = 0.
struct PDEProblem {
  std::function<Mat2(const EvalPoint&)> A;
  /// (div A)_j = sum_i dA_ij / dx_i; required by the estimator when A varies.
  std::function<Point(const EvalPoint&)> divA;
  std::function<Point(const EvalPoint&)> b;
  std::function<double(const EvalPoint&)> c;
  std::function<double(const EvalPoint&)> f;
  bool A_constant = true;

  bool symmetric() const { return !b; }
};

struct GalerkinSystem {
  CsrMatrix matrix;
  std::vector<double> rhs;
  std::vector<double> solution;
  bool symmetric = true;
};

struct AssemblyOptions {
  /// Gauss points per direction are degree + 1 + extra_points.
  int extra_points = 0;
};

/// Stiffness matrix and load vector over the functions of `space`.
GalerkinSystem assemble(const HierSpace& space, const GeometryMap& g, const PDEProblem& problem,
                        const AssemblyOptions& opts = {});

/// Solves the system in place and returns the solution.
const std::vector<double>& solve(GalerkinSystem& system, const LinearSolveOptions& opts = {},
                                 SolveReport* report = nullptr);

using GradientFn = std::function<Point(const EvalPoint&)>;

/// || grad u - grad U ||_{L2} with degree + 2 Gauss points per direction.
double energy_error(const HierSpace& space, const GeometryMap& g, std::span<const double> coeffs,
                    const GradientFn& exact_gradient);

/// || grad U ||_{L2}.
double energy_norm(const HierSpace& space, const GeometryMap& g, std::span<const double> coeffs);

}  // namespace higa
