#pragma once

// Scott-Zhang type quasi-interpolation onto the boundary-vanishing
// hierarchical space, built from element-local dual functionals.

#include <functional>
#include <vector>

#include "higa/hierbasis.hpp"

namespace higa {

using ParamFn = std::function<double(const Point&)>;

/// Dual functional of a hierarchical B-spline: a tensor polynomial on one
/// active element T of the same level inside the support, with
/// integral_T dual * B = delta for the level-k B-splines B living on T.
struct DualFunctional {
  HierBasisFunction beta;
  ActiveElement element;
  /// Per direction, coefficients over the orthonormal Legendre polynomials of
  /// the reference interval; the dual is the product of the two factors
  /// divided by |T| in parameter space.
  std::array<std::vector<double>, kDim> legendre;
};

/// Throws InvalidInput if beta is not in the hierarchical basis.
DualFunctional build_dual(const HierarchicalMesh& mesh, const HierBasisFunction& beta);

/// Value of the dual function at s inside its element.
double dual_value(const HierarchicalMesh& mesh, const DualFunctional& dual, const Point& s);

/// Integrals of the dual function against the level-k B-splines living on its
/// element, in local order; the unit vector of beta up to rounding.
std::vector<double> duality_row(const HierarchicalMesh& mesh, const DualFunctional& dual);

/// Maximum of |dual| over an n x n grid of the element, corners included.
double dual_sup_norm(const HierarchicalMesh& mesh, const DualFunctional& dual, int n = 9);

/// <dual, v> by (p+2)-point tensor Gauss quadrature on the element.
double apply_dual(const HierarchicalMesh& mesh, const DualFunctional& dual, const ParamFn& v);

/// Coefficients of J v over boundary_basis(mesh), to be combined with the
/// truncated basis.
std::vector<double> project(const HierarchicalMesh& mesh, const ParamFn& v);

}  // namespace higa
