#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "doctest.h"
#include "higa/adaptivity.hpp"
#include "higa/problems.hpp"
#include "higa/projector.hpp"
#include "higa/quadrature.hpp"
#include "oracles.hpp"

using namespace higa;

namespace {

TensorKnotVector knots(int p) {
  TensorKnotVector kv;
  kv.dirs = {KnotVector::open(p), KnotVector::open(p)};
  return kv;
}

HierarchicalMesh uniform(int p, int k) {
  HierarchicalMesh m = initial_mesh(knots(p));
  for (int i = 0; i < k; ++i) m = refine(m, m.active());
  return m;
}

/// Meshes of an adaptive square run.
std::vector<HierarchicalMesh> adaptive_meshes(int p, int count) {
  const Benchmark bm = problem_library("square", p);
  LoopConfig c;
  c.problem = bm.problem;
  c.geometry = bm.geometry;
  c.knots0 = bm.knots0;
  c.theta = 0.5;
  c.stop.max_steps = count;
  std::vector<HierarchicalMesh> out;
  adaptive_loop(c, [&](const AdaptiveState& s) { out.push_back(s.mesh); });
  return out;
}

/// L2 norm over the parameter domain of a function, and of its gradient,
/// by (p+3)-point Gauss quadrature per active element.
struct Norms {
  double l2 = 0.0;
  double grad = 0.0;
};

Norms norms(const HierarchicalMesh& m, const std::function<double(const Point&)>& v,
            const std::function<Point(const Point&)>& dv = {}) {
  const GaussRule& r = gauss_legendre(m.degree(0) + 3);
  Norms n;
  for (const auto& t : m.active()) {
    const Box b = m.box(t);
    const double h0 = b.hi[0] - b.lo[0], h1 = b.hi[1] - b.lo[1];
    for (std::size_t i = 0; i < r.nodes.size(); ++i)
      for (std::size_t j = 0; j < r.nodes.size(); ++j) {
        const Point s{b.lo[0] + h0 * r.nodes[i], b.lo[1] + h1 * r.nodes[j]};
        const double w = h0 * h1 * r.weights[i] * r.weights[j];
        n.l2 += w * v(s) * v(s);
        if (dv) {
          const Point g = dv(s);
          n.grad += w * (g[0] * g[0] + g[1] * g[1]);
        }
      }
  }
  n.l2 = std::sqrt(n.l2);
  n.grad = std::sqrt(n.grad);
  return n;
}

}  // namespace

TEST_CASE("bilinear duals on a single element") {
  const HierarchicalMesh m = initial_mesh(knots(1));
  // Inverse of the hat Gram matrix [[1/3,1/6],[1/6,1/3]] is [[4,-2],[-2,4]],
  // so the dual of the left hat is 4 - 6x.
  const auto left = [](double x) { return 4.0 - 6.0 * x; };
  const auto right = [](double x) { return 6.0 * x - 2.0; };
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (Index a = 0; a < 2; ++a)
    for (Index b = 0; b < 2; ++b) {
      const DualFunctional d = build_dual(m, {0, {a, b}});
      CHECK(d.element == ActiveElement{0, {0, 0}});
      for (int n = 0; n < 20; ++n) {
        const double x = u(rng), y = u(rng);
        const double want = (a == 0 ? left(x) : right(x)) * (b == 0 ? left(y) : right(y));
        CHECK(dual_value(m, d, {x, y}) == doctest::Approx(want).epsilon(1e-12));
      }
      CHECK(dual_sup_norm(m, d) == doctest::Approx(16.0).epsilon(1e-12));
    }
  CHECK_THROWS_AS(build_dual(m, {1, {0, 0}}), InvalidInput);
}

TEST_CASE("duality with the B-splines of the dual element") {
  for (int p = 1; p <= 4; ++p)
    for (const auto& m : adaptive_meshes(p, 6)) {
      for (const auto& f : hierarchical_basis(m)) {
        const DualFunctional d = build_dual(m, f);
        CHECK(d.element.level == f.level);
        CHECK(m.is_active(d.element));
        // First active cell of the level inside the support.
        const auto sb = support_box(m, f.level, f.j);
        CHECK(d.element.cell[0] >= sb[0].first);
        CHECK(d.element.cell[0] <= sb[0].second);
        CHECK(d.element.cell[1] >= sb[1].first);
        CHECK(d.element.cell[1] <= sb[1].second);
        bool earlier = false;
        for (Index a = sb[0].first; a <= sb[0].second; ++a)
          for (Index b = sb[1].first; b <= sb[1].second; ++b)
            if (Cell{a, b} < d.element.cell && m.is_active({f.level, {a, b}})) earlier = true;
        CHECK_FALSE(earlier);

        const Cell first = first_basis_on_cell(m, d.element.level, d.element.cell);
        const auto row = duality_row(m, d);
        const std::size_t self = static_cast<std::size_t>((f.j[0] - first[0]) * (p + 1) + (f.j[1] - first[1]));
        for (std::size_t i = 0; i < row.size(); ++i) CHECK(std::abs(row[i] - (i == self ? 1.0 : 0.0)) < 1e-10);
      }
    }
}

TEST_CASE("dual sup norm scales with the element measure") {
  for (int p = 1; p <= 4; ++p) {
    // Once the level has at least p+1 cells, the knots seen by function 0 on
    // cell 0 are a scaled copy of the previous level's.
    const int k0 = p <= 1 ? 1 : (p <= 3 ? 2 : 3);
    double prev = 0.0;
    for (int k = k0; k <= k0 + 3; ++k) {
      const HierarchicalMesh m = uniform(p, k);
      const double s = dual_sup_norm(m, build_dual(m, {k, {0, 0}}));
      if (k > k0) CHECK(s / prev == doctest::Approx(4.0).epsilon(1e-9));
      prev = s;
    }
  }
}

TEST_CASE("projection reproduces discrete functions") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int p = 1; p <= 3; ++p) {
    const auto meshes = adaptive_meshes(p + (p == 1 ? 1 : 0), 10);
    for (const auto& m : meshes) {
      const auto basis = boundary_basis(m);
      if (basis.empty()) continue;
      const HierSpace space(m, basis);
      for (int trial = 0; trial < 3; ++trial) {
        std::vector<double> c(basis.size());
        for (double& x : c) x = u(rng);
        const ParamFn v = [&](const Point& s) { return eval_hier(space, c, s, {0, 0}, Representation::truncated); };
        const auto d = project(m, v);
        REQUIRE(d.size() == c.size());
        double worst = 0.0;
        for (int n = 0; n < 100; ++n) {
          const Point s{0.5 + 0.5 * u(rng), 0.5 + 0.5 * u(rng)};
          worst = std::max(worst, std::abs(eval_hier(space, d, s, {0, 0}, Representation::truncated) - v(s)));
        }
        CHECK(worst < 1e-10);
      }
    }
    const HierarchicalMesh m = meshes.back();
    for (double x : project(m, [](const Point&) { return 0.0; })) CHECK(x == 0.0);
  }
}

TEST_CASE("first-order L2 approximation of a smooth function") {
  const auto v = [](const Point& s) { return std::sin(std::numbers::pi * s[0]) * std::sin(std::numbers::pi * s[1]); };
  for (int p = 2; p <= 3; ++p) {
    double prev = 0.0;
    for (int k = 1; k <= 5; ++k) {
      const HierarchicalMesh m = uniform(p, k);
      const HierSpace space(m, boundary_basis(m));
      const auto c = project(m, v);
      const double err = norms(m, [&](const Point& s) { return v(s) - eval_hier(space, c, s, {0, 0}, Representation::truncated); }).l2;
      if (k > 1) CHECK(err / prev <= 0.6);
      prev = err;
    }
  }
}

TEST_CASE("H1 and local L2 stability constants") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.5, 3.0);
  double h1_const = 0.0, l2_const = 0.0;
  for (int p = 2; p <= 3; ++p)
    for (const auto& m : adaptive_meshes(p, 7)) {
      const HierSpace space(m, boundary_basis(m));
      if (space.size() == 0) continue;
      const double a = u(rng), b = u(rng);
      const auto v = [=](const Point& s) { return std::sin(a * std::numbers::pi * s[0]) * s[1] * (1 - s[1]) * std::exp(b * s[0]); };
      const auto dv = [=](const Point& s) -> Point {
        const double sx = std::sin(a * std::numbers::pi * s[0]), cx = std::cos(a * std::numbers::pi * s[0]);
        const double e = std::exp(b * s[0]), q = s[1] * (1 - s[1]);
        return {(a * std::numbers::pi * cx + b * sx) * e * q, sx * e * (1 - 2 * s[1])};
      };
      const auto c = project(m, v);
      const auto jv = [&](const Point& s) { return eval_hier(space, c, s, {0, 0}, Representation::truncated); };
      const auto djv = [&](const Point& s) -> Point {
        return {eval_hier(space, c, s, {1, 0}, Representation::truncated), eval_hier(space, c, s, {0, 1}, Representation::truncated)};
      };
      const Norms nv = norms(m, v, dv);
      const Norms nj = norms(m, jv, djv);
      h1_const = std::max(h1_const, nj.grad / std::sqrt(nv.l2 * nv.l2 + nv.grad * nv.grad));

      // Local L2 stability on a few elements against the surrounding patch.
      for (std::size_t e = 0; e < m.num_elements(); e += std::max<std::size_t>(1, m.num_elements() / 5)) {
        const ActiveElement t = m.active()[e];
        const auto region = patch(m, std::vector<ActiveElement>{t}, 2 * (p + 1));
        const GaussRule& r = gauss_legendre(p + 3);
        double local_j = 0.0, local_v = 0.0;
        const auto add = [&](const ActiveElement& el, const auto& f, double& acc) {
          const Box bx = m.box(el);
          const double h0 = bx.hi[0] - bx.lo[0], h1 = bx.hi[1] - bx.lo[1];
          for (std::size_t i = 0; i < r.nodes.size(); ++i)
            for (std::size_t j = 0; j < r.nodes.size(); ++j) {
              const Point s{bx.lo[0] + h0 * r.nodes[i], bx.lo[1] + h1 * r.nodes[j]};
              acc += h0 * h1 * r.weights[i] * r.weights[j] * f(s) * f(s);
            }
        };
        add(t, jv, local_j);
        for (const auto& el : region) add(el, v, local_v);
        if (local_v > 0.0) l2_const = std::max(l2_const, std::sqrt(local_j / local_v));
      }
    }
  MESSAGE("recorded H1 stability constant " << h1_const << ", local L2 stability constant " << l2_const);
  CHECK(h1_const > 0.0);
  CHECK(h1_const < 10.0);
  CHECK(l2_const < 10.0);
}
