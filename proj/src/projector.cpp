#include "higa/projector.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

#include "higa/quadrature.hpp"

namespace higa {

namespace {

struct LocalGrid {
  std::array<std::vector<double>, kDim> x;
  std::array<std::vector<double>, kDim> w;
  // vals[d][q * (p_d + 1) + a]
  std::array<std::vector<double>, kDim> vals;
};

LocalGrid local_grid(const HierarchicalMesh& mesh, const ActiveElement& t, int extra) {
  LocalGrid g;
  const Box b = mesh.box(t);
  for (int d = 0; d < kDim; ++d) {
    const int p = mesh.degree(d);
    const GaussRule& rule = gauss_legendre(p + 1 + extra);
    const double h = b.hi[d] - b.lo[d];
    const std::size_t np = static_cast<std::size_t>(p + 1);
    auto& vals = g.vals[static_cast<std::size_t>(d)];
    vals.resize(rule.nodes.size() * np);
    for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
      const double x = b.lo[d] + h * rule.nodes[q];
      g.x[static_cast<std::size_t>(d)].push_back(x);
      g.w[static_cast<std::size_t>(d)].push_back(h * rule.weights[q]);
      mesh.hierarchy(d).basis_ders(t.level, t.cell[static_cast<std::size_t>(d)], x, 0,
                                   std::span<double>(vals.data() + q * np, np));
    }
  }
  return g;
}

// Orthonormal Legendre polynomials L_0..L_{n-1} on [0,1] at x.
void legendre_values(double x, int n, double* out) {
  const double t = 2.0 * x - 1.0;
  double pm = 1.0;
  double pc = t;
  for (int k = 0; k < n; ++k) {
    double pk;
    if (k == 0) pk = 1.0;
    else if (k == 1) pk = t;
    else {
      pk = ((2.0 * k - 1.0) * t * pc - (k - 1.0) * pm) / k;
      pm = pc;
      pc = pk;
    }
    out[k] = std::sqrt(2.0 * k + 1.0) * pk;
  }
}

ActiveElement dual_element(const HierarchicalMesh& mesh, const HierBasisFunction& beta) {
  const auto sb = support_box(mesh, beta.level, beta.j);
  for (Index a = sb[0].first; a <= sb[0].second; ++a)
    for (Index b = sb[1].first; b <= sb[1].second; ++b)
      if (!mesh.refined(beta.level, {a, b})) return {beta.level, {a, b}};
  throw std::logic_error("hierarchical basis function without an active element of its level");
}

}  // namespace

DualFunctional build_dual(const HierarchicalMesh& mesh, const HierBasisFunction& beta) {
  if (!in_hierarchical_basis(mesh, beta.level, beta.j)) throw InvalidInput("function is not in the hierarchical basis");
  DualFunctional dual;
  dual.beta = beta;
  dual.element = dual_element(mesh, beta);
  const LocalGrid g = local_grid(mesh, dual.element, 0);

  // The duality conditions factor over directions. Each factor is expanded in
  // orthonormal Legendre polynomials, which keeps the local solve far better
  // conditioned than a B-spline Gram matrix.
  const Cell first = first_basis_on_cell(mesh, dual.element.level, dual.element.cell);
  for (int d = 0; d < kDim; ++d) {
    const auto dd = static_cast<std::size_t>(d);
    const int np = mesh.degree(d) + 1;
    const auto& vals = g.vals[dd];
    const double h = mesh.box(dual.element).hi[d] - mesh.box(dual.element).lo[d];
    const double lo = mesh.box(dual.element).lo[d];
    // M(k, a) = integral over [0,1] of L_k * B_a.
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(np, np);
    double L[kMaxDegree + 2];
    for (std::size_t q = 0; q < g.x[dd].size(); ++q) {
      legendre_values((g.x[dd][q] - lo) / h, np, L);
      for (int k = 0; k < np; ++k)
        for (int a = 0; a < np; ++a)
          M(k, a) += g.w[dd][q] / h * L[k] * vals[q * static_cast<std::size_t>(np) + static_cast<std::size_t>(a)];
    }
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(np);
    rhs(static_cast<Eigen::Index>(beta.j[dd] - first[dd])) = 1.0;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(M.transpose());
    if (!lu.isInvertible()) throw std::logic_error("singular local duality system");
    const Eigen::VectorXd c = lu.solve(rhs);
    dual.legendre[dd].assign(c.data(), c.data() + np);
  }
  return dual;
}

double dual_value(const HierarchicalMesh& mesh, const DualFunctional& dual, const Point& s) {
  const Box b = mesh.box(dual.element);
  double value = 1.0;
  double L[kMaxDegree + 2];
  for (int d = 0; d < kDim; ++d) {
    const auto& c = dual.legendre[static_cast<std::size_t>(d)];
    const double h = b.hi[d] - b.lo[d];
    legendre_values((s[d] - b.lo[d]) / h, static_cast<int>(c.size()), L);
    double f = 0.0;
    for (std::size_t k = 0; k < c.size(); ++k) f += c[k] * L[k];
    value *= f / h;
  }
  return value;
}

std::vector<double> duality_row(const HierarchicalMesh& mesh, const DualFunctional& dual) {
  const int n0 = mesh.degree(0) + 1;
  const int n1 = mesh.degree(1) + 1;
  const LocalGrid g = local_grid(mesh, dual.element, 1);
  std::vector<double> out(static_cast<std::size_t>(n0 * n1), 0.0);
  for (std::size_t q0 = 0; q0 < g.x[0].size(); ++q0) {
    for (std::size_t q1 = 0; q1 < g.x[1].size(); ++q1) {
      const double w = g.w[0][q0] * g.w[1][q1] * dual_value(mesh, dual, {g.x[0][q0], g.x[1][q1]});
      for (int a = 0; a < n0; ++a)
        for (int b = 0; b < n1; ++b)
          out[static_cast<std::size_t>(a * n1 + b)] += w * g.vals[0][q0 * static_cast<std::size_t>(n0) + static_cast<std::size_t>(a)] *
                                                      g.vals[1][q1 * static_cast<std::size_t>(n1) + static_cast<std::size_t>(b)];
    }
  }
  return out;
}

double dual_sup_norm(const HierarchicalMesh& mesh, const DualFunctional& dual, int n) {
  if (n < 2) throw InvalidInput("sup-norm sampling needs at least 2 points per direction");
  const Box b = mesh.box(dual.element);
  double m = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < n; ++k) {
      const Point s{b.lo[0] + (b.hi[0] - b.lo[0]) * i / (n - 1), b.lo[1] + (b.hi[1] - b.lo[1]) * k / (n - 1)};
      m = std::max(m, std::abs(dual_value(mesh, dual, s)));
    }
  }
  return m;
}

double apply_dual(const HierarchicalMesh& mesh, const DualFunctional& dual, const ParamFn& v) {
  const LocalGrid g = local_grid(mesh, dual.element, 1);
  double sum = 0.0;
  for (std::size_t q0 = 0; q0 < g.x[0].size(); ++q0) {
    for (std::size_t q1 = 0; q1 < g.x[1].size(); ++q1) {
      const Point s{g.x[0][q0], g.x[1][q1]};
      sum += g.w[0][q0] * g.w[1][q1] * dual_value(mesh, dual, s) * v(s);
    }
  }
  return sum;
}

std::vector<double> project(const HierarchicalMesh& mesh, const ParamFn& v) {
  const auto basis = boundary_basis(mesh);
  std::vector<double> out;
  out.reserve(basis.size());
  for (const auto& beta : basis) out.push_back(apply_dual(mesh, build_dual(mesh, beta), v));
  return out;
}

}  // namespace higa
