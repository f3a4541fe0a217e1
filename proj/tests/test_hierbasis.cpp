#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "doctest.h"
#include "higa/hierbasis.hpp"
#include "oracles.hpp"

using namespace higa;

namespace {

TensorKnotVector knots(int p, std::vector<double> breaks = {}) {
  TensorKnotVector kv;
  kv.dirs = {KnotVector::open(p, breaks), KnotVector::open(p, breaks)};
  return kv;
}

TensorKnotVector level_knots(const HierarchicalMesh& m, int level) {
  TensorKnotVector kv;
  kv.dirs = {m.hierarchy(0).explicit_knots(level), m.hierarchy(1).explicit_knots(level)};
  kv.level = level;
  return kv;
}

double trunc_value(const HierarchicalMesh& m, const TruncatedFunction& t, const Point& s) {
  const TensorKnotVector kv = level_knots(m, t.base.level + 1);
  double v = 0.0;
  for (const auto& [idx, c] : t.fine_coeffs) v += c * eval_tensor(kv, idx, s);
  return v;
}

/// Random admissible mesh grown toward a random point.
HierarchicalMesh random_mesh(int p, std::mt19937_64& rng, int target, std::vector<double> breaks = {}) {
  HierarchicalMesh m = initial_mesh(knots(p, breaks));
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const Point focus{u(rng), u(rng)};
  while (static_cast<int>(m.num_elements()) < target) {
    std::vector<ActiveElement> marks{m.locate(focus)};
    for (const auto& e : oracle::random_marks(m, rng, 0.05)) marks.push_back(e);
    std::sort(marks.begin(), marks.end());
    marks.erase(std::unique(marks.begin(), marks.end()), marks.end());
    m = refine(m, marks);
  }
  return m;
}

Point random_point(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  return {u(rng), u(rng)};
}

/// Rank of the matrix of function values (rows: functions) at the points.
Eigen::Index collocation_rank(const std::vector<std::function<double(const Point&)>>& fns, const std::vector<Point>& pts) {
  Eigen::MatrixXd a(static_cast<Eigen::Index>(fns.size()), static_cast<Eigen::Index>(pts.size()));
  for (std::size_t i = 0; i < fns.size(); ++i)
    for (std::size_t q = 0; q < pts.size(); ++q) a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(q)) = fns[i](pts[q]);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
  lu.setThreshold(1e-10);
  return lu.rank();
}

/// Residual of the least-squares fit of `target` by `fns` at the points.
double fit_residual(const std::vector<std::function<double(const Point&)>>& fns, const std::function<double(const Point&)>& target,
                    const std::vector<Point>& pts) {
  Eigen::MatrixXd a(static_cast<Eigen::Index>(pts.size()), static_cast<Eigen::Index>(fns.size()));
  Eigen::VectorXd b(static_cast<Eigen::Index>(pts.size()));
  for (std::size_t q = 0; q < pts.size(); ++q) {
    for (std::size_t i = 0; i < fns.size(); ++i) a(static_cast<Eigen::Index>(q), static_cast<Eigen::Index>(i)) = fns[i](pts[q]);
    b(static_cast<Eigen::Index>(q)) = target(pts[q]);
  }
  const Eigen::VectorXd x = a.colPivHouseholderQr().solve(b);
  return (a * x - b).lpNorm<Eigen::Infinity>();
}

}  // namespace

TEST_CASE("hierarchical basis of uniform meshes") {
  const HierarchicalMesh m0 = initial_mesh(knots(1));
  const auto b0 = hierarchical_basis(m0);
  CHECK(b0.size() == 4);
  for (const auto& f : b0) CHECK(f.level == 0);

  for (int p = 1; p <= 3; ++p) {
    HierarchicalMesh m = initial_mesh(knots(p));
    for (int k = 0; k <= 3; ++k) {
      const auto b = hierarchical_basis(m);
      const long n1 = (1L << k) + p;
      CHECK(static_cast<long>(b.size()) == n1 * n1);
      for (const auto& f : b) CHECK(f.level == k);
      m = refine(m, m.active());
    }
  }
}

TEST_CASE("boundary basis") {
  CHECK(boundary_basis(initial_mesh(knots(1))).empty());
  const auto b2 = boundary_basis(initial_mesh(knots(2)));
  REQUIRE(b2.size() == 1);
  CHECK(b2[0].j == Cell{1, 1});
  const HierarchicalMesh m = initial_mesh(knots(1));
  const auto b1 = boundary_basis(refine(m, m.active()));
  REQUIRE(b1.size() == 1);
  CHECK(b1[0].level == 1);
  CHECK(b1[0].j == Cell{1, 1});
}

TEST_CASE("basis size equals collocation rank") {
  std::mt19937_64 rng(31);
  for (int p = 1; p <= 3; ++p)
    for (int trial = 0; trial < 3; ++trial) {
      const HierarchicalMesh m = random_mesh(p, rng, 25 + 10 * trial, trial == 2 ? std::vector<double>{0.5} : std::vector<double>{});
      const auto basis = hierarchical_basis(m);
      std::vector<std::function<double(const Point&)>> fns;
      for (const auto& f : basis) fns.push_back([&m, f](const Point& s) { return oracle::tensor_bspline(m, f.level, f.j, s); });
      // A unisolvent grid for tensor degree p on every element, so that
      // the rank of the samples is the rank of the functions.
      std::vector<Point> pts;
      for (const auto& t : m.active()) {
        const Box b = m.box(t);
        for (int i = 0; i <= p; ++i)
          for (int j = 0; j <= p; ++j)
            pts.push_back({b.lo[0] + (b.hi[0] - b.lo[0]) * (i + 0.5) / (p + 1),
                           b.lo[1] + (b.hi[1] - b.lo[1]) * (j + 0.5) / (p + 1)});
      }
      CHECK(collocation_rank(fns, pts) == static_cast<Eigen::Index>(basis.size()));
    }
}

TEST_CASE("local linear independence on every element") {
  std::mt19937_64 rng(32);
  for (int p = 1; p <= 3; ++p) {
    const HierarchicalMesh m = random_mesh(p, rng, 60);
    const auto basis = hierarchical_basis(m);
    const HierSpace space(m, basis);
    for (const auto& t : m.active()) {
      ElementBasis eb;
      eb.build(space, t, Representation::plain);
      std::vector<std::function<double(const Point&)>> fns;
      for (int i : eb.indices()) {
        const auto f = basis[static_cast<std::size_t>(i)];
        fns.push_back([&m, f](const Point& s) { return oracle::tensor_bspline(m, f.level, f.j, s); });
      }
      CHECK(static_cast<int>(fns.size()) <= 2 * (p + 1) * (p + 1));
      // On one element every function is a tensor polynomial of degree p,
      // so the restrictions have rank min(count, (p+1)^2).
      const Box b = m.box(t);
      const int n = p + 1;
      std::vector<Point> pts;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          const double x = 0.5 - 0.5 * std::cos((2 * i + 1) * std::numbers::pi / (2 * n));
          const double y = 0.5 - 0.5 * std::cos((2 * j + 1) * std::numbers::pi / (2 * n));
          pts.push_back({b.lo[0] + x * (b.hi[0] - b.lo[0]), b.lo[1] + y * (b.hi[1] - b.lo[1])});
        }
      CHECK(collocation_rank(fns, pts) == std::min<Eigen::Index>(static_cast<Eigen::Index>(fns.size()), n * n));
    }
  }
}

TEST_CASE("truncation") {
  std::mt19937_64 rng(41);
  // Uniform meshes: nothing to drop.
  {
    HierarchicalMesh m = initial_mesh(knots(2));
    m = refine(m, m.active());
    for (const auto& f : hierarchical_basis(m)) {
      const auto t = truncate(m, f);
      for (int n = 0; n < 20; ++n) {
        const Point s = random_point(rng);
        CHECK(trunc_value(m, t, s) == doctest::Approx(oracle::tensor_bspline(m, f.level, f.j, s)).epsilon(1e-13));
      }
    }
    CHECK_THROWS_AS(truncate(m, HierBasisFunction{0, {0, 0}}), InvalidInput);
  }
  // Graded meshes: bounds and the multi-level oracle.
  for (int p = 1; p <= 3; ++p)
    for (int trial = 0; trial < 2; ++trial) {
      const HierarchicalMesh m = random_mesh(p, rng, 30);
      for (const auto& f : hierarchical_basis(m)) {
        const auto t = truncate(m, f);
        for (const auto& [idx, c] : t.fine_coeffs) CHECK(c > 0.0);
        for (int n = 0; n < 25; ++n) {
          const Point s = random_point(rng);
          const double tv = trunc_value(m, t, s);
          const double bv = oracle::tensor_bspline(m, f.level, f.j, s);
          CHECK(tv >= -1e-14);
          CHECK(tv <= bv + 1e-14);
          CHECK(bv <= 1.0 + 1e-14);
          CHECK(std::abs(tv - oracle::full_truncation(m, f.level, f.j, s)) < 1e-12);
        }
      }
    }
}

TEST_CASE("evaluation of hierarchical combinations") {
  std::mt19937_64 rng(51);
  for (int p = 1; p <= 3; ++p) {
    HierarchicalMesh u = initial_mesh(knots(p));
    u = refine(u, u.active());
    const std::vector<double> ones_u(hierarchical_basis(u).size(), 1.0);
    for (int n = 0; n < 50; ++n) CHECK(eval_hier(u, ones_u, random_point(rng)) == doctest::Approx(1.0).epsilon(1e-13));

    const HierarchicalMesh m = random_mesh(p, rng, 50);
    const auto basis = hierarchical_basis(m);
    const std::vector<double> ones(basis.size(), 1.0);
    for (int n = 0; n < 200; ++n) {
      const Point s = random_point(rng);
      CHECK(eval_hier(m, ones, s, {0, 0}, Representation::truncated) == doctest::Approx(1.0).epsilon(1e-13));
      CHECK(std::abs(eval_hier(m, ones, s, {1, 0}, Representation::truncated)) < 1e-10);
    }
    // Single coefficients reproduce the tensor B-spline and its derivatives.
    std::vector<double> e(basis.size(), 0.0);
    for (std::size_t i = 0; i < basis.size(); i += 3) {
      e.assign(basis.size(), 0.0);
      e[i] = 1.0;
      const TensorKnotVector kv = level_knots(m, basis[i].level);
      for (int n = 0; n < 10; ++n) {
        const Point s = random_point(rng);
        CHECK(eval_hier(m, e, s) == doctest::Approx(oracle::tensor_bspline(m, basis[i].level, basis[i].j, s)).epsilon(1e-12));
        if (p >= 2)
          CHECK(eval_hier(m, e, s, {1, 1}) ==
                doctest::Approx(eval_tensor(kv, {basis[i].level, basis[i].j}, s, {1, 1})).epsilon(1e-10).scale(1.0));
      }
    }
  }
}

TEST_CASE("plain and truncated bases span the same space") {
  std::mt19937_64 rng(61);
  for (int p = 1; p <= 3; ++p) {
    const HierarchicalMesh m = random_mesh(p, rng, 30);
    const auto basis = hierarchical_basis(m);
    const HierSpace space(m, basis);
    std::vector<std::function<double(const Point&)>> plain;
    for (const auto& f : basis) plain.push_back([&m, f](const Point& s) { return oracle::tensor_bspline(m, f.level, f.j, s); });
    std::vector<Point> pts;
    for (std::size_t i = 0; i < 4 * basis.size(); ++i) pts.push_back(random_point(rng));
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> c(basis.size());
    for (double& x : c) x = u(rng);
    const auto thb = [&](const Point& s) { return eval_hier(space, c, s, {0, 0}, Representation::truncated); };
    CHECK(fit_residual(plain, thb, pts) < 1e-10);
  }
}

TEST_CASE("nestedness under refinement") {
  std::mt19937_64 rng(71);
  for (int p = 1; p <= 3; ++p) {
    const HierarchicalMesh m = random_mesh(p, rng, 20);
    const HierarchicalMesh r = refine(m, oracle::random_marks(m, rng, 0.3));
    const auto fine = hierarchical_basis(r);
    std::vector<std::function<double(const Point&)>> fns;
    for (const auto& f : fine) fns.push_back([&r, f](const Point& s) { return oracle::tensor_bspline(r, f.level, f.j, s); });
    std::vector<Point> pts;
    for (std::size_t i = 0; i < 3 * fine.size() + 200; ++i) pts.push_back(random_point(rng));
    for (const auto& f : hierarchical_basis(m)) {
      const auto target = [&m, f](const Point& s) { return oracle::tensor_bspline(m, f.level, f.j, s); };
      CHECK(fit_residual(fns, target, pts) < 1e-10);
    }
  }
}

TEST_CASE("boundary trace of included and excluded functions") {
  std::mt19937_64 rng(81);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int p = 1; p <= 3; ++p) {
    const HierarchicalMesh m = random_mesh(p, rng, 40);
    for (const auto& f : hierarchical_basis(m)) {
      const auto box = support_box(m, f.level, f.j);
      const Box lo = m.box(f.level, {box[0].first, box[1].first});
      const Box hi = m.box(f.level, {box[0].second, box[1].second});
      if (f.vanishes_on_boundary) {
        for (int n = 0; n < 100; ++n) {
          const double t = u(rng);
          const Point s = n % 4 == 0 ? Point{0.0, t} : n % 4 == 1 ? Point{1.0, t} : n % 4 == 2 ? Point{t, 0.0} : Point{t, 1.0};
          CHECK(std::abs(oracle::tensor_bspline(m, f.level, f.j, s)) < 1e-13);
        }
      } else {
        double peak = 0.0;
        for (int n = 0; n <= 200; ++n) {
          const double t0 = lo.lo[0] + (hi.hi[0] - lo.lo[0]) * n / 200.0;
          const double t1 = lo.lo[1] + (hi.hi[1] - lo.lo[1]) * n / 200.0;
          for (const Point& s : {Point{0.0, t1}, Point{1.0, t1}, Point{t0, 0.0}, Point{t0, 1.0}})
            peak = std::max(peak, oracle::tensor_bspline(m, f.level, f.j, s));
        }
        CHECK(peak > 0.1);
      }
    }
  }
}
