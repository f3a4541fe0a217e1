#pragma once

// Hierarchical meshes in the parameter domain [0,1]^2.
//
// Omega^k is stored as the set of level-k cells it contains. Omega^0 is the
// whole box and is kept implicit. A cell is refined when its children belong
// to Omega^{k+1}; children are always added in complete groups of 2^d.

#include <array>
#include <cstdint>
#include <span>
#include <unordered_set>
#include <vector>

#include "higa/common.hpp"
#include "higa/splines.hpp"

namespace higa {

struct ActiveElement {
  int level = 0;
  Cell cell{};

  auto operator<=>(const ActiveElement&) const = default;
};

/// Parameter-space box [lo[0], hi[0]] x [lo[1], hi[1]].
struct Box {
  Point lo{};
  Point hi{};
};

class HierarchicalMesh {
 public:
  HierarchicalMesh() = default;
  explicit HierarchicalMesh(TensorKnotVector knots0);

  /// Builds a mesh from explicit level domains. domains[k] lists the level-k
  /// cells of Omega^k for k >= 1 (domains[0] is ignored). Each listed cell
  /// needs its parent in Omega^{k-1} and all its siblings listed.
  static HierarchicalMesh from_domains(TensorKnotVector knots0, const std::vector<std::vector<Cell>>& domains);

  const TensorKnotVector& knots0() const { return knots0_; }
  const KnotHierarchy& hierarchy(int dir) const { return hier_[static_cast<std::size_t>(dir)]; }
  int degree(int dir) const { return hier_[static_cast<std::size_t>(dir)].degree(); }
  Cell num_cells(int level) const { return {hier_[0].num_cells(level), hier_[1].num_cells(level)}; }

  /// Number of levels with nonempty domain: the minimal M with Omega^M empty.
  int num_levels() const { return static_cast<int>(domains_.size()); }
  int max_level() const { return num_levels() - 1; }

  bool in_domain(int level, const Cell& c) const;
  bool refined(int level, const Cell& c) const { return in_domain(level + 1, {2 * c[0], 2 * c[1]}); }
  bool is_active(const ActiveElement& t) const { return in_domain(t.level, t.cell) && !refined(t.level, t.cell); }

  /// Active elements in (level, cell) order.
  std::span<const ActiveElement> active() const { return active_; }
  std::size_t num_elements() const { return active_.size(); }
  /// Position of t in active(), or -1.
  int index_of(const ActiveElement& t) const;

  /// Level-k cells of Omega^k for k >= 1, sorted.
  std::vector<Cell> domain_cells(int level) const;
  std::size_t domain_size(int level) const;

  Box box(int level, const Cell& c) const;
  Box box(const ActiveElement& t) const { return box(t.level, t.cell); }

  /// Active element containing s; ties on element boundaries go to the
  /// element with larger coordinates.
  ActiveElement locate(const Point& s) const;

  bool operator==(const HierarchicalMesh& other) const;

  // Mutation used by refinement: add the 2^d children of each listed cell.
  void bisect(std::span<const ActiveElement> cells);

 private:
  void rebuild_active();

  TensorKnotVector knots0_;
  std::array<KnotHierarchy, kDim> hier_;
  // domains_[0] stays empty (Omega^0 is implicit).
  std::vector<std::unordered_set<Cell, CellHash>> domains_;
  std::vector<ActiveElement> active_;
};

HierarchicalMesh initial_mesh(const TensorKnotVector& knots0);

/// All active T' sharing the support of some hierarchical basis function
/// with t, including t itself. Sorted.
std::vector<ActiveElement> neighbors(const HierarchicalMesh& mesh, const ActiveElement& t);

/// Neighbors exactly one level coarser than t.
std::vector<ActiveElement> bad_neighbors(const HierarchicalMesh& mesh, const ActiveElement& t);

bool is_admissible(const HierarchicalMesh& mesh);

/// Closure refinement: marks are extended by bad neighbors until fixed, then
/// every marked element is bisected.
HierarchicalMesh refine(const HierarchicalMesh& mesh, std::span<const ActiveElement> marked);

/// Per-level union of the two meshes' domains.
HierarchicalMesh overlay(const HierarchicalMesh& a, const HierarchicalMesh& b);

/// Patch of order k: elements whose closure meets the closure of the
/// previous patch, starting from region.
std::vector<ActiveElement> patch(const HierarchicalMesh& mesh, std::span<const ActiveElement> region, int k);

// Helpers shared with the basis module.

/// Level-k tensor B-spline index box of a cell: functions j0..j0+p per dir.
Cell first_basis_on_cell(const HierarchicalMesh& mesh, int level, const Cell& c);

/// Inclusive cell range per direction of the support of level-k function j.
std::array<std::pair<Index, Index>, kDim> support_box(const HierarchicalMesh& mesh, int level, const Cell& j);

/// Membership in the hierarchical basis: support inside Omega^k, not inside
/// Omega^{k+1}.
bool in_hierarchical_basis(const HierarchicalMesh& mesh, int level, const Cell& j);

/// Active elements contained in the support of level-k function j.
void elements_in_support(const HierarchicalMesh& mesh, int level, const Cell& j, std::vector<ActiveElement>& out);

}  // namespace higa
