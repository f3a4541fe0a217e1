#pragma once

#include <span>
#include <string>
#include <vector>

#include "higa/sparse.hpp"

namespace higa {

enum class Preconditioner { none, jacobi, ilu0 };

struct GmresOptions {
  int restart = 80;
  int max_iterations = 20000;
  double tolerance = 1e-10;
  Preconditioner preconditioner = Preconditioner::ilu0;
};

struct SolveReport {
  std::string method;
  int iterations = 0;
  double relative_residual = 0.0;
};

/// Restarted GMRES with right preconditioning. Returns the relative residual
/// reached; x holds the initial guess on entry.
SolveReport gmres(const CsrMatrix& a, std::span<const double> b, std::span<double> x, const GmresOptions& opts = {});

struct LinearSolveOptions {
  double tolerance = 1e-10;
  /// Systems above this size skip the direct factorization.
  int direct_limit = 200000;
  GmresOptions gmres;
};

/// Direct sparse factorization (LDL^T when symmetric, LU otherwise) with
/// iterative refinement, falling back to GMRES. Throws SolverError when the
/// tolerance is not met.
std::vector<double> solve_linear(const CsrMatrix& a, std::span<const double> b, bool symmetric,
                                 const LinearSolveOptions& opts = {}, SolveReport* report = nullptr);

double relative_residual(const CsrMatrix& a, std::span<const double> x, std::span<const double> b);

}  // namespace higa
