#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "higa/common.hpp"
#include "higa/hiermesh.hpp"
#include "higa/splines.hpp"

namespace higa {

using Mat2 = std::array<std::array<double, kDim>, kDim>;
/// hess[i][a][b] = d^2 x_i / ds_a ds_b
using Hess2 = std::array<Mat2, kDim>;

struct GeometryEval {
  Point x{};
  Mat2 jac{};  // jac[i][a] = d x_i / d s_a
  Hess2 hess{};
};

/// NURBS map from [0,1]^2 onto the physical domain.
class GeometryMap {
 public:
  GeometryMap() = default;
  /// Control points and weights are ordered with j0 running fastest.
  GeometryMap(std::array<KnotVector, kDim> knots, std::vector<Point> control_points, std::vector<double> weights);

  int degree(int dir) const { return knots_[static_cast<std::size_t>(dir)].degree(); }
  const KnotVector& knots(int dir) const { return knots_[static_cast<std::size_t>(dir)]; }
  const std::vector<Point>& control_points() const { return cps_; }
  const std::vector<double>& weights() const { return weights_; }

  Point map(const Point& s) const;
  Mat2 jacobian(const Point& s) const;
  Hess2 second_derivatives(const Point& s) const;

  /// Evaluation with the polynomial pieces of the knot span containing
  /// `anchor`; gives one-sided derivatives when s lies on a breakpoint.
  /// nd = 0, 1 or 2 selects how many derivative orders are filled.
  GeometryEval evaluate(const Point& s, const Point& anchor, int nd) const;

 private:
  std::array<KnotVector, kDim> knots_;
  std::vector<Point> cps_;
  std::vector<double> weights_;
};

/// "square", "lshape" or "quarter_ring" (also accepted: "quarter-ring").
GeometryMap benchmark_geometry(std::string_view name);

/// Parses {"degrees": [..], "knots": [[..],[..]], "control_points": [[x,y],..],
/// "weights": [..]}.
GeometryMap geometry_from_json(const std::string& text);
std::string geometry_to_json(const GeometryMap& g);

/// Throws ConfigError unless every geometry breakpoint is a level-0 breakpoint
/// of the ansatz knots, so the map is smooth on every element.
void check_geometry_compatible(const TensorKnotVector& knots0, const GeometryMap& g);

inline double det2(const Mat2& m) { return m[0][0] * m[1][1] - m[0][1] * m[1][0]; }

/// Physical area of an element by tensor Gauss quadrature of |det D gamma|.
double element_size(const HierarchicalMesh& mesh, const GeometryMap& g, const ActiveElement& t);

}  // namespace higa
