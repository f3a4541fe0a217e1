#include <cmath>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "higa/estimator.hpp"
#include "higa/problems.hpp"

using namespace higa;

namespace {

struct Solved {
  HierarchicalMesh mesh;
  std::vector<HierBasisFunction> fns;
  std::vector<double> coeffs;
};

ElementIndicators solve_and_estimate(const HierarchicalMesh& m, const GeometryMap& g, const PDEProblem& pr,
                                     std::vector<double>* coeffs = nullptr) {
  const HierSpace space(m, boundary_basis(m));
  GalerkinSystem sys = assemble(space, g, pr);
  solve(sys);
  if (coeffs) *coeffs = sys.solution;
  return estimate(space, g, pr, sys.solution);
}

HierarchicalMesh uniform(const TensorKnotVector& kv, int k) {
  HierarchicalMesh m = initial_mesh(kv);
  for (int i = 0; i < k; ++i) m = refine(m, m.active());
  return m;
}

HierarchicalMesh corner_mesh(const TensorKnotVector& kv, int steps) {
  HierarchicalMesh m = initial_mesh(kv);
  m = refine(m, m.active());
  for (int i = 0; i < steps; ++i) m = refine(m, std::vector<ActiveElement>{m.locate({0.0, 0.0})});
  return m;
}

}  // namespace

TEST_CASE("bubble solution has a vanishing estimator") {
  const Benchmark sq = problem_library("square", 2);
  PDEProblem pr;
  pr.f = [](const EvalPoint& p) { return 2 * p.x[1] * (1 - p.x[1]) + 2 * p.x[0] * (1 - p.x[0]); };
  const ElementIndicators ind = solve_and_estimate(initial_mesh(sq.knots0), sq.geometry, pr);
  CHECK(ind.total() < 1e-8);
}

TEST_CASE("zero load gives a zero estimator") {
  const Benchmark bm = problem_library("quarter-ring", 2);
  PDEProblem pr;
  pr.f = [](const EvalPoint&) { return 0.0; };
  const ElementIndicators ind = solve_and_estimate(corner_mesh(bm.knots0, 2), bm.geometry, pr);
  CHECK(ind.total() == 0.0);
}

TEST_CASE("facet enumeration") {
  const Benchmark sq = problem_library("square", 2);
  CHECK(facets(initial_mesh(sq.knots0)).empty());

  const HierarchicalMesh m1 = uniform(sq.knots0, 1);
  const auto f1 = facets(m1);
  CHECK(f1.size() == 4);
  for (const auto& f : f1) {
    CHECK(f.hi - f.lo == doctest::Approx(0.5));
    CHECK(f.coord == doctest::Approx(0.5));
    CHECK(m1.box(m1.active()[static_cast<std::size_t>(f.left)]).hi[static_cast<std::size_t>(f.normal_dir)] == f.coord);
    CHECK(m1.box(m1.active()[static_cast<std::size_t>(f.right)]).lo[static_cast<std::size_t>(f.normal_dir)] == f.coord);
  }

  // Refining the lower-left child: its right side against the level-1
  // neighbour splits into two half segments.
  HierarchicalMesh m2 = refine(m1, std::vector<ActiveElement>{m1.locate({0.0, 0.0})});
  const auto f2 = facets(m2);
  const int coarse_right = m2.index_of({1, {1, 0}});
  int hanging = 0;
  for (const auto& f : f2)
    if (f.normal_dir == 0 && f.coord == 0.5 && f.right == coarse_right) {
      ++hanging;
      CHECK(f.hi - f.lo == doctest::Approx(0.25));
      CHECK(m2.active()[static_cast<std::size_t>(f.left)].level == 2);
    }
  CHECK(hanging == 2);

  // Each interior side of every element is covered exactly once.
  std::vector<double> covered(m2.num_elements(), 0.0);
  for (const auto& f : f2) {
    covered[static_cast<std::size_t>(f.left)] += f.hi - f.lo;
    covered[static_cast<std::size_t>(f.right)] += f.hi - f.lo;
  }
  for (std::size_t e = 0; e < m2.num_elements(); ++e) {
    const Box b = m2.box(m2.active()[e]);
    double interior = 0.0;
    if (b.lo[0] > 0.0) interior += b.hi[1] - b.lo[1];
    if (b.hi[0] < 1.0) interior += b.hi[1] - b.lo[1];
    if (b.lo[1] > 0.0) interior += b.hi[0] - b.lo[0];
    if (b.hi[1] < 1.0) interior += b.hi[0] - b.lo[0];
    CHECK(covered[e] == doctest::Approx(interior).epsilon(1e-15));
  }
}

TEST_CASE("indicator bookkeeping and jump symmetry") {
  for (const char* name : {"lshape", "quarter-ring"}) {
    const Benchmark bm = problem_library(name, 2);
    const HierarchicalMesh m = corner_mesh(bm.knots0, 3);
    const HierSpace space(m, boundary_basis(m));
    GalerkinSystem sys = assemble(space, bm.geometry, bm.problem);
    solve(sys);
    const ElementIndicators ind = estimate(space, bm.geometry, bm.problem, sys.solution);
    REQUIRE(ind.elements.size() == m.num_elements());
    double sum = 0.0;
    for (std::size_t e = 0; e < ind.elements.size(); ++e) {
      CHECK(ind.volume_sq[e] >= 0.0);
      CHECK(ind.jump_sq[e] >= 0.0);
      CHECK(ind.eta_sq[e] == doctest::Approx(ind.volume_sq[e] + ind.jump_sq[e]).epsilon(1e-14));
      sum += ind.eta_sq[e];
    }
    CHECK(ind.total_sq == doctest::Approx(sum).epsilon(1e-12));
    CHECK(ind.total() == doctest::Approx(std::sqrt(sum)).epsilon(1e-12));

    for (const auto& f : facets(m)) {
      const auto [l, r] = facet_jump_sides(space, bm.geometry, bm.problem, sys.solution, f);
      CHECK(std::abs(l - r) <= 1e-10 * std::max(std::abs(l), 1e-300) + 1e-30);
    }
  }
}

TEST_CASE("smooth splines have no interior jumps") {
  const Benchmark sq = problem_library("square", 3);
  const HierarchicalMesh m = corner_mesh(sq.knots0, 2);
  const ElementIndicators ind = solve_and_estimate(m, sq.geometry, sq.problem);
  double vol = 0.0, jump = 0.0;
  for (std::size_t e = 0; e < ind.elements.size(); ++e) {
    vol += ind.volume_sq[e];
    jump += ind.jump_sq[e];
  }
  CHECK(jump < 1e-16 * vol);
}

TEST_CASE("estimator scales linearly with the load") {
  const Benchmark bm = problem_library("lshape", 2);
  const HierarchicalMesh m = corner_mesh(bm.knots0, 2);
  PDEProblem ten = bm.problem;
  ten.f = [](const EvalPoint&) { return 10.0; };
  const double a = solve_and_estimate(m, bm.geometry, bm.problem).total();
  const double b = solve_and_estimate(m, bm.geometry, ten).total();
  CHECK(b == doctest::Approx(10.0 * a).epsilon(1e-8));
}

TEST_CASE("estimator decreases under uniform refinement") {
  const Benchmark sq = problem_library("square", 2);
  double prev = 1e300;
  for (int k = 0; k <= 6; ++k) {
    const double eta = solve_and_estimate(uniform(sq.knots0, k), sq.geometry, sq.problem).total();
    CHECK(eta < prev);
    prev = eta;
  }
}

TEST_CASE("varying diffusion needs its divergence") {
  const Benchmark sq = problem_library("square", 2);
  PDEProblem pr = sq.problem;
  pr.A = [](const EvalPoint& p) { return Mat2{{{1.0 + p.x[0], 0.0}, {0.0, 1.0}}}; };
  pr.A_constant = false;
  const HierarchicalMesh m = uniform(sq.knots0, 1);
  const HierSpace space(m, boundary_basis(m));
  GalerkinSystem sys = assemble(space, sq.geometry, pr);
  solve(sys);
  CHECK_THROWS_AS(estimate(space, sq.geometry, pr, sys.solution), ConfigError);
  pr.divA = [](const EvalPoint&) { return Point{1.0, 0.0}; };
  CHECK(estimate(space, sq.geometry, pr, sys.solution).total() > 0.0);
}

TEST_CASE("indicator dump") {
  const Benchmark sq = problem_library("square", 2);
  const HierarchicalMesh m = uniform(sq.knots0, 1);
  const ElementIndicators ind = solve_and_estimate(m, sq.geometry, sq.problem);
  std::istringstream in(indicators_to_text(ind));
  std::string line;
  int lines = 0;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    int level = -1;
    long i = -1, j = -1;
    double v = -1, jmp = -1;
    ls >> level >> i >> j >> v >> jmp;
    CHECK(level == 1);
    CHECK(v >= 0.0);
    CHECK(jmp >= 0.0);
    ++lines;
  }
  CHECK(lines == 4);
}
