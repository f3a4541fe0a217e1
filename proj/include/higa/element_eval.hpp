#pragma once

// Per-point pullback helpers shared by assembly, the estimator and the CLI.

#include <array>
#include <cmath>
#include <vector>

#include "higa/common.hpp"
#include "higa/geometry.hpp"
#include "higa/hiermesh.hpp"
#include "higa/quadrature.hpp"

namespace higa {

/// Physical and parameter coordinates of an evaluation point.
struct EvalPoint {
  Point x{};
  Point s{};
};

struct PointGeometry {
  EvalPoint pt;
  Mat2 jac{};
  Mat2 jinv{};  // inverse of jac
  double det = 0.0;
  Hess2 hess{};
};

inline PointGeometry point_geometry(const GeometryMap& g, const Point& s, const Point& anchor, int nd) {
  const GeometryEval e = g.evaluate(s, anchor, std::max(nd, 1));
  PointGeometry pg;
  pg.pt = {e.x, s};
  pg.jac = e.jac;
  pg.hess = e.hess;
  pg.det = det2(e.jac);
  const double inv = 1.0 / pg.det;
  pg.jinv = {{{e.jac[1][1] * inv, -e.jac[0][1] * inv}, {-e.jac[1][0] * inv, e.jac[0][0] * inv}}};
  return pg;
}

/// Physical gradient J^{-T} (dv/ds0, dv/ds1).
inline Point physical_gradient(const PointGeometry& pg, double ds0, double ds1) {
  return {pg.jinv[0][0] * ds0 + pg.jinv[1][0] * ds1, pg.jinv[0][1] * ds0 + pg.jinv[1][1] * ds1};
}

/// Physical Hessian J^{-T} (H_s - sum_c g_c D^2 gamma_c) J^{-1}, with g the
/// physical gradient.
inline Mat2 physical_hessian(const PointGeometry& pg, const Point& grad, double d00, double d01, double d11) {
  Mat2 hs{{{d00, d01}, {d01, d11}}};
  for (int a = 0; a < kDim; ++a)
    for (int b = 0; b < kDim; ++b) hs[a][b] -= grad[0] * pg.hess[0][a][b] + grad[1] * pg.hess[1][a][b];
  Mat2 out{};
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j) {
      double s = 0.0;
      for (int a = 0; a < kDim; ++a)
        for (int b = 0; b < kDim; ++b) s += pg.jinv[a][i] * hs[a][b] * pg.jinv[b][j];
      out[i][j] = s;
    }
  return out;
}

/// Tensor Gauss points of an element.
struct ElementQuadrature {
  std::vector<double> x0, x1;  // parameter coordinates per direction
  std::vector<double> w0, w1;  // weights including the parameter cell size
  Point centre{};

  ElementQuadrature(const Box& b, int n0, int n1) {
    const GaussRule& r0 = gauss_legendre(n0);
    const GaussRule& r1 = gauss_legendre(n1);
    const double h0 = b.hi[0] - b.lo[0];
    const double h1 = b.hi[1] - b.lo[1];
    for (int q = 0; q < n0; ++q) {
      x0.push_back(b.lo[0] + h0 * r0.nodes[static_cast<std::size_t>(q)]);
      w0.push_back(h0 * r0.weights[static_cast<std::size_t>(q)]);
    }
    for (int q = 0; q < n1; ++q) {
      x1.push_back(b.lo[1] + h1 * r1.nodes[static_cast<std::size_t>(q)]);
      w1.push_back(h1 * r1.weights[static_cast<std::size_t>(q)]);
    }
    centre = {0.5 * (b.lo[0] + b.hi[0]), 0.5 * (b.lo[1] + b.hi[1])};
  }

  std::size_t size() const { return x0.size() * x1.size(); }
};

}  // namespace higa
