#pragma once

// Hierarchical B-spline basis of a mesh, its boundary-vanishing subset,
// truncation, and element-local evaluation.

#include <span>
#include <unordered_map>
#include <utility>
#include <vector>

#include "higa/hiermesh.hpp"
#include "higa/splines.hpp"

namespace higa {

struct HierBasisFunction {
  int level = 0;
  Cell j{};
  bool vanishes_on_boundary = false;

  bool operator==(const HierBasisFunction& o) const { return level == o.level && j == o.j; }
  auto operator<=>(const HierBasisFunction& o) const {
    if (auto c = level <=> o.level; c != 0) return c;
    return j <=> o.j;
  }
};

struct TruncatedFunction {
  HierBasisFunction base;
  /// Level-(k+1) children that survive truncation, with their two-scale weights.
  std::vector<std::pair<TensorBSplineIndex, double>> fine_coeffs;
};

enum class Representation { plain, truncated };

/// All hierarchical B-splines, ordered by (level, j).
std::vector<HierBasisFunction> hierarchical_basis(const HierarchicalMesh& mesh);

/// Functions of the hierarchical basis that vanish on the boundary of [0,1]^2.
std::vector<HierBasisFunction> boundary_basis(const HierarchicalMesh& mesh);

/// Single-step truncation against Omega^{level+1}.
TruncatedFunction truncate(const HierarchicalMesh& mesh, const HierBasisFunction& beta);

/// A mesh together with an ordered subset of its hierarchical basis.
class HierSpace {
 public:
  HierSpace(const HierarchicalMesh& mesh, std::vector<HierBasisFunction> functions);

  const HierarchicalMesh& mesh() const { return *mesh_; }
  std::span<const HierBasisFunction> functions() const { return functions_; }
  int size() const { return static_cast<int>(functions_.size()); }

  /// Position of (level, j) in functions(), or -1.
  int find(int level, const Cell& j) const;

 private:
  const HierarchicalMesh* mesh_;
  std::vector<HierBasisFunction> functions_;
  std::vector<std::unordered_map<Cell, int, CellHash>> lookup_;
};

/// Number of derivative multi-indices of total order <= nd, in the order
/// (0,0), (1,0), (0,1), (2,0), (1,1), (0,2).
constexpr int num_derivs(int nd) { return nd == 0 ? 1 : (nd == 1 ? 3 : 6); }

/// The functions of a HierSpace that do not vanish on one element, each
/// expressed through the tensor B-splines of the element's ancestor cells.
class ElementBasis {
 public:
  void build(const HierSpace& space, const ActiveElement& t, Representation which);

  const ActiveElement& element() const { return elem_; }
  int size() const { return static_cast<int>(indices_.size()); }
  /// Positions in the HierSpace of the functions on the element.
  std::span<const int> indices() const { return indices_; }

  /// Values and parameter derivatives up to total order nd <= 2 on the grid
  /// x0 x x1. Layout: out[(f * num_derivs(nd) + d) * nq + q0 * x1.size() + q1].
  void evaluate(std::span<const double> x0, std::span<const double> x1, int nd, std::vector<double>& out) const;

 private:
  struct Term {
    int level;
    std::array<int, kDim> r;
    double coef;
  };

  const HierarchicalMesh* mesh_ = nullptr;
  ActiveElement elem_;
  std::vector<int> indices_;
  std::vector<int> term_begin_;  // size() + 1 offsets into terms_
  std::vector<Term> terms_;
  int min_level_ = 0;
  int max_level_ = 0;
  mutable std::vector<double> tables_;
};

/// Sum of coefficient * function at s, with parameter derivative `deriv`.
double eval_hier(const HierSpace& space, std::span<const double> coeffs, const Point& s,
                 const std::array<int, kDim>& deriv = {}, Representation which = Representation::plain);

/// Convenience form over the full hierarchical basis of the mesh.
double eval_hier(const HierarchicalMesh& mesh, std::span<const double> coeffs, const Point& s,
                 const std::array<int, kDim>& deriv = {}, Representation which = Representation::plain);

}  // namespace higa
