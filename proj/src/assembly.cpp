#include "higa/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "higa/kernels.hpp"

namespace higa {

namespace {

void check_jacobian(const PointGeometry& pg, const ActiveElement& t) {
  if (!(pg.det > 0.0) || !std::isfinite(pg.det)) {
    std::ostringstream msg;
    msg << "singular or inverted geometry Jacobian (det=" << pg.det << ") on element (" << t.level << ", "
        << t.cell[0] << ", " << t.cell[1] << ") at s=(" << pg.pt.s[0] << ", " << pg.pt.s[1] << ")";
    throw AssemblyError(msg.str());
  }
}

}  // namespace

GalerkinSystem assemble(const HierSpace& space, const GeometryMap& g, const PDEProblem& problem,
                        const AssemblyOptions& opts) {
  if (!problem.f) throw ConfigError("problem has no right-hand side f");
  const HierarchicalMesh& mesh = space.mesh();
  const auto& K = kernels::active();
  const int n0 = mesh.degree(0) + 1 + opts.extra_points;
  const int n1 = mesh.degree(1) + 1 + opts.extra_points;
  const int n = space.size();
  const auto elements = mesh.active();

  // Pass 1: local basis of every element, for the sparsity pattern.
  std::vector<std::vector<int>> dofs(elements.size());
  {
    ElementBasis eb;
    for (std::size_t e = 0; e < elements.size(); ++e) {
      eb.build(space, elements[e], Representation::plain);
      dofs[e].assign(eb.indices().begin(), eb.indices().end());
    }
  }

  GalerkinSystem sys;
  sys.symmetric = problem.symmetric();
  sys.matrix = pattern_from_blocks(n, dofs);
  sys.rhs.assign(static_cast<std::size_t>(n), 0.0);

  ElementBasis eb;
  std::vector<double> vals, P, Q, Ke, fe;
  std::vector<std::int64_t> pos;
  for (std::size_t e = 0; e < elements.size(); ++e) {
    const ActiveElement& t = elements[e];
    eb.build(space, t, Representation::plain);
    const int nf = eb.size();
    if (nf == 0) continue;
    const ElementQuadrature quad(mesh.box(t), n0, n1);
    const std::size_t nq = quad.size();
    eb.evaluate(quad.x0, quad.x1, 1, vals);

    P.assign(3 * nq * static_cast<std::size_t>(nf), 0.0);
    Q.assign(3 * nq * static_cast<std::size_t>(nf), 0.0);
    fe.assign(static_cast<std::size_t>(nf), 0.0);
    for (std::size_t q0 = 0; q0 < quad.x0.size(); ++q0) {
      for (std::size_t q1 = 0; q1 < quad.x1.size(); ++q1) {
        const std::size_t q = q0 * quad.x1.size() + q1;
        const PointGeometry pg = point_geometry(g, {quad.x0[q0], quad.x1[q1]}, quad.centre, 1);
        check_jacobian(pg, t);
        const double wd = quad.w0[q0] * quad.w1[q1] * pg.det;
        const Mat2 A = problem.A ? problem.A(pg.pt) : Mat2{{{1.0, 0.0}, {0.0, 1.0}}};
        const Point bv = problem.b ? problem.b(pg.pt) : Point{0.0, 0.0};
        const double cv = problem.c ? problem.c(pg.pt) : 0.0;
        const double fv = problem.f(pg.pt);
        double* p0 = P.data() + (3 * q) * static_cast<std::size_t>(nf);
        double* p1 = p0 + nf;
        double* p2 = p1 + nf;
        double* r0 = Q.data() + (3 * q) * static_cast<std::size_t>(nf);
        double* r1 = r0 + nf;
        double* r2 = r1 + nf;
        for (int f = 0; f < nf; ++f) {
          const std::size_t base = static_cast<std::size_t>(f) * 3 * nq;
          const double v = vals[base + q];
          const Point gr = physical_gradient(pg, vals[base + nq + q], vals[base + 2 * nq + q]);
          p0[f] = gr[0] * wd;
          p1[f] = gr[1] * wd;
          p2[f] = v * wd;
          r0[f] = A[0][0] * gr[0] + A[0][1] * gr[1];
          r1[f] = A[1][0] * gr[0] + A[1][1] * gr[1];
          r2[f] = bv[0] * gr[0] + bv[1] * gr[1] + cv * v;
          fe[static_cast<std::size_t>(f)] += fv * v * wd;
        }
      }
    }
    Ke.assign(static_cast<std::size_t>(nf) * static_cast<std::size_t>(nf), 0.0);
    K.gemm_tn_acc(static_cast<int>(3 * nq), nf, nf, P.data(), Q.data(), Ke.data());

    const auto idx = eb.indices();
    for (int i = 0; i < nf; ++i) {
      const int row = idx[static_cast<std::size_t>(i)];
      sys.rhs[static_cast<std::size_t>(row)] += fe[static_cast<std::size_t>(i)];
      for (int j = 0; j < nf; ++j) {
        const std::int64_t k = sys.matrix.find(row, idx[static_cast<std::size_t>(j)]);
        sys.matrix.val[static_cast<std::size_t>(k)] += Ke[static_cast<std::size_t>(i * nf + j)];
      }
    }
  }
  return sys;
}

const std::vector<double>& solve(GalerkinSystem& system, const LinearSolveOptions& opts, SolveReport* report) {
  system.solution = solve_linear(system.matrix, system.rhs, system.symmetric, opts, report);
  return system.solution;
}

namespace {

template <class Fn>
double integrate_gradient(const HierSpace& space, const GeometryMap& g, std::span<const double> coeffs, Fn&& integrand) {
  if (static_cast<int>(coeffs.size()) != space.size()) throw InvalidInput("coefficient count does not match the basis");
  const HierarchicalMesh& mesh = space.mesh();
  const int n0 = mesh.degree(0) + 2;
  const int n1 = mesh.degree(1) + 2;
  ElementBasis eb;
  std::vector<double> vals;
  double total = 0.0;
  for (const ActiveElement& t : mesh.active()) {
    eb.build(space, t, Representation::plain);
    const ElementQuadrature quad(mesh.box(t), n0, n1);
    const std::size_t nq = quad.size();
    eb.evaluate(quad.x0, quad.x1, 1, vals);
    for (std::size_t q0 = 0; q0 < quad.x0.size(); ++q0) {
      for (std::size_t q1 = 0; q1 < quad.x1.size(); ++q1) {
        const std::size_t q = q0 * quad.x1.size() + q1;
        double d0 = 0.0;
        double d1 = 0.0;
        for (int f = 0; f < eb.size(); ++f) {
          const double c = coeffs[static_cast<std::size_t>(eb.indices()[static_cast<std::size_t>(f)])];
          const std::size_t base = static_cast<std::size_t>(f) * 3 * nq;
          d0 += c * vals[base + nq + q];
          d1 += c * vals[base + 2 * nq + q];
        }
        const PointGeometry pg = point_geometry(g, {quad.x0[q0], quad.x1[q1]}, quad.centre, 1);
        total += quad.w0[q0] * quad.w1[q1] * std::abs(pg.det) * integrand(pg, physical_gradient(pg, d0, d1));
      }
    }
  }
  return std::sqrt(total);
}

}  // namespace

double energy_error(const HierSpace& space, const GeometryMap& g, std::span<const double> coeffs,
                    const GradientFn& exact_gradient) {
  return integrate_gradient(space, g, coeffs, [&](const PointGeometry& pg, const Point& gu) {
    const Point ge = exact_gradient(pg.pt);
    const double e0 = ge[0] - gu[0];
    const double e1 = ge[1] - gu[1];
    return e0 * e0 + e1 * e1;
  });
}

double energy_norm(const HierSpace& space, const GeometryMap& g, std::span<const double> coeffs) {
  return integrate_gradient(space, g, coeffs,
                            [](const PointGeometry&, const Point& gu) { return gu[0] * gu[0] + gu[1] * gu[1]; });
}

}  // namespace higa
