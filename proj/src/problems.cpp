#include "higa/problems.hpp"

#include <cmath>

namespace higa {

namespace {

// g(t) = t^a (1 - t) and its first two derivatives.
double g0(double t, double a) { return std::pow(t, a) - std::pow(t, a + 1.0); }
double g1(double t, double a) { return a * std::pow(t, a - 1.0) - (a + 1.0) * std::pow(t, a); }
double g2(double t, double a) { return a * (a - 1.0) * std::pow(t, a - 2.0) - (a + 1.0) * a * std::pow(t, a - 1.0); }

constexpr double kAx = 2.3;
constexpr double kAy = 2.9;

KnotVector interior_half(int p, int mult) {
  const double half[] = {0.5};
  return KnotVector::open(p, half, mult);
}

}  // namespace

double square_u(double x, double y) { return g0(x, kAx) * g0(y, kAy); }
Point square_grad(double x, double y) { return {g1(x, kAx) * g0(y, kAy), g0(x, kAx) * g1(y, kAy)}; }
double square_f(double x, double y) { return -(g2(x, kAx) * g0(y, kAy) + g0(x, kAx) * g2(y, kAy)); }

Benchmark problem_library(std::string_view name, int degree) {
  if (degree < 1 || degree > kMaxDegree) throw ConfigError("degree must lie in [1, " + std::to_string(kMaxDegree) + "]");
  Benchmark bm;
  if (name == "square") {
    bm.name = "square";
    bm.geometry = benchmark_geometry("square");
    bm.knots0.dirs = {KnotVector::open(degree), KnotVector::open(degree)};
    bm.problem.f = [](const EvalPoint& p) { return square_f(p.x[0], p.x[1]); };
    bm.exact_solution = [](const EvalPoint& p) { return square_u(p.x[0], p.x[1]); };
    bm.exact_gradient = [](const EvalPoint& p) { return square_grad(p.x[0], p.x[1]); };
    bm.default_theta = 0.5;
  } else if (name == "lshape") {
    bm.name = "lshape";
    bm.geometry = benchmark_geometry("lshape");
    bm.knots0.dirs = {interior_half(degree, degree), KnotVector::open(degree)};
    bm.problem.f = [](const EvalPoint&) { return 1.0; };
    bm.default_theta = 0.4;
  } else if (name == "quarter-ring" || name == "quarter_ring") {
    bm.name = "quarter-ring";
    bm.geometry = benchmark_geometry("quarter_ring");
    bm.knots0.dirs = {interior_half(degree, degree), interior_half(degree, degree)};
    // Indicator of gamma([0.5,1] x [0,0.5]), evaluated in parameter coordinates.
    bm.problem.f = [](const EvalPoint& p) { return (p.s[0] >= 0.5 && p.s[1] <= 0.5) ? 1.0 : 0.0; };
    bm.default_theta = 0.8;
  } else {
    throw ConfigError("unknown problem '" + std::string(name) + "' (expected square, lshape or quarter-ring)");
  }
  check_geometry_compatible(bm.knots0, bm.geometry);
  return bm;
}

}  // namespace higa
