#pragma once

// Univariate and tensor-product B-splines on p-open knot vectors over [0,1],
// dyadic (uniform h-) refinement and the two-scale relation between levels.

#include <array>
#include <span>
#include <utility>
#include <vector>

#include "higa/common.hpp"

namespace higa {

/// A p-open knot vector on [0,1] with interior multiplicities <= p.
class KnotVector {
 public:
  KnotVector() = default;
  KnotVector(int degree, std::vector<double> knots);

  /// Open knot vector with the given interior breakpoints, each repeated
  /// `interior_multiplicity` times.
  static KnotVector open(int degree, std::span<const double> interior_breaks = {},
                         int interior_multiplicity = 1);

  int degree() const { return degree_; }
  std::span<const double> knots() const { return knots_; }
  int num_basis() const { return static_cast<int>(knots_.size()) - degree_ - 1; }

  /// Distinct knot values and their multiplicities.
  std::vector<double> breakpoints() const;
  std::vector<int> multiplicities() const;

  /// Local knots t_j..t_{j+p+1} of the j-th (0-based) B-spline.
  std::span<const double> local_knots(int j) const;

  /// Inserts the midpoint of every nonempty knot span once.
  KnotVector refine_dyadic() const;

  bool operator==(const KnotVector&) const = default;

 private:
  int degree_ = 0;
  std::vector<double> knots_;
};

struct TensorKnotVector {
  std::array<KnotVector, kDim> dirs;
  int level = 0;

  int max_degree() const;
  bool operator==(const TensorKnotVector&) const = default;
};

/// Tensor-product B-spline of a given level; j holds 0-based basis indices.
struct TensorBSplineIndex {
  int level = 0;
  Cell j{};

  auto operator<=>(const TensorBSplineIndex&) const = default;
};

/// Value (deriv_order 0) or derivative of the B-spline with the given p+2
/// local knots at x; Cox-de Boor recursion with 0/0 = 0, right-continuous at
/// interior breakpoints and left-continuous at x = 1.
double eval_univariate(std::span<const double> local_knots, double x, int deriv_order = 0);

double eval_tensor(const TensorKnotVector& knots, const TensorBSplineIndex& idx, const Point& s,
                   const std::array<int, kDim>& deriv = {});

TensorKnotVector refine_level(const TensorKnotVector& knots);

/// Coefficients of a univariate level-k B-spline in the level-(k+1) basis of
/// `knots.refine_dyadic()`, computed by repeated single-knot insertion.
std::vector<std::pair<int, double>> two_scale_univariate(const KnotVector& knots, int j);

/// Boehm insertion of the midpoint of every nonempty span of the p+2 local
/// knots `tau`; returns the coefficients of the B-spline in the refined local
/// basis, first entry belonging to the function starting at tau[0].
std::vector<double> two_scale_local(std::span<const double> tau, int p);

/// Tensorized two-scale relation; entries sorted by fine index, all > 0.
std::vector<std::pair<TensorBSplineIndex, double>> two_scale(const TensorKnotVector& knots,
                                                             const TensorBSplineIndex& idx);

/// All p+1 B-splines that are nonzero on the knot span [U[span], U[span+1])
/// and their derivatives up to order nd at x. `window` holds the 2p knots
/// U[span-p+1..span+p]. Output layout: out[d * (p+1) + r] for the function
/// with index span-p+r and derivative order d.
void ders_basis_funs(std::span<const double> window, int p, double x, int nd, std::span<double> out);

/// Level-k view of the dyadic refinements of a level-0 knot vector.
///
/// Every query is O(number of level-0 breakpoints), so deep levels never
/// materialize their knot vectors. Cells are the nonempty knot spans of the
/// level, numbered left to right; cell c at level k splits into cells 2c and
/// 2c+1 at level k+1.
class KnotHierarchy {
 public:
  KnotHierarchy() = default;
  explicit KnotHierarchy(const KnotVector& level0);

  int degree() const { return degree_; }
  Index num_cells(int level) const { return static_cast<Index>(n0_) << level; }
  Index num_basis(int level) const;

  double breakpoint(int level, Index c) const;
  int multiplicity(int level, Index c) const;
  /// Index of the first knot equal to breakpoint c.
  Index first_knot(int level, Index c) const;
  /// Breakpoint index of knot m.
  Index cell_of_knot(int level, Index m) const;
  double knot(int level, Index m) const { return breakpoint(level, cell_of_knot(level, m)); }

  /// Knot index s with [t_s, t_{s+1}] = cell c; functions s-p..s live on it.
  Index span_of_cell(int level, Index c) const { return first_knot(level, c) + multiplicity(level, c) - 1; }
  Index first_basis_on_cell(int level, Index c) const { return span_of_cell(level, c) - degree_; }

  /// Inclusive cell range covered by the support of basis function j.
  std::pair<Index, Index> support_cells(int level, Index j) const;

  /// Cell containing x; right-continuous, x = 1 maps to the last cell.
  Index cell_containing(int level, double x) const;

  void local_knots(int level, Index j, std::span<double> out) const;

  /// ders_basis_funs on cell c; evaluates the cell's polynomial pieces even
  /// when x sits on the cell boundary.
  void basis_ders(int level, Index c, double x, int nd, std::span<double> out) const;

  KnotVector explicit_knots(int level) const;

  /// Two-scale coefficients of level-k function j over level k+1 indices.
  std::vector<std::pair<Index, double>> two_scale(int level, Index j) const;

 private:
  int degree_ = 0;
  int n0_ = 0;
  std::vector<double> breaks_;
  std::vector<int> mult_;
  std::vector<Index> prefix_;  // prefix_[q] = sum of mult_[0..q)
};

}  // namespace higa
