#include "higa/hiermesh.hpp"

#include <algorithm>
#include <iterator>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_set>

namespace higa {

namespace {

Cell parent_of(const Cell& c) { return {c[0] >> 1, c[1] >> 1}; }

bool boxes_touch(const Box& a, const Box& b) {
  for (int i = 0; i < kDim; ++i) {
    if (a.hi[i] < b.lo[i] || b.hi[i] < a.lo[i]) return false;
  }
  return true;
}

void require_active(const HierarchicalMesh& mesh, const ActiveElement& t) {
  if (!mesh.is_active(t)) {
    throw InvalidInput("element (" + std::to_string(t.level) + ", " + std::to_string(t.cell[0]) + ", " +
                       std::to_string(t.cell[1]) + ") is not active");
  }
}

}  // namespace

HierarchicalMesh::HierarchicalMesh(TensorKnotVector knots0) : knots0_(std::move(knots0)) {
  if (knots0_.level != 0) throw InvalidInput("initial knot vectors must have level 0");
  for (int i = 0; i < kDim; ++i) hier_[static_cast<std::size_t>(i)] = KnotHierarchy(knots0_.dirs[static_cast<std::size_t>(i)]);
  domains_.resize(1);
  rebuild_active();
}

HierarchicalMesh HierarchicalMesh::from_domains(TensorKnotVector knots0,
                                                const std::vector<std::vector<Cell>>& domains) {
  HierarchicalMesh mesh(std::move(knots0));
  if (domains.size() > static_cast<std::size_t>(kMaxLevel) + 1) throw InvalidInput("too many levels");
  mesh.domains_.assign(std::max<std::size_t>(domains.size(), 1), {});
  for (std::size_t k = 1; k < domains.size(); ++k) {
    const Cell n = mesh.num_cells(static_cast<int>(k));
    for (const Cell& c : domains[k]) {
      if (c[0] < 0 || c[1] < 0 || c[0] >= n[0] || c[1] >= n[1]) {
        throw InvalidInput("domain cell outside the level-" + std::to_string(k) + " grid");
      }
      mesh.domains_[k].insert(c);
    }
  }
  for (std::size_t k = 1; k < mesh.domains_.size(); ++k) {
    for (const Cell& c : mesh.domains_[k]) {
      if (!mesh.in_domain(static_cast<int>(k) - 1, parent_of(c))) {
        throw InvalidInput("domains are not nested at level " + std::to_string(k));
      }
      const Cell base{c[0] & ~1, c[1] & ~1};
      for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) {
          if (!mesh.domains_[k].contains(Cell{base[0] + a, base[1] + b})) {
            throw InvalidInput("level-" + std::to_string(k) + " domain is not a union of coarser cells");
          }
        }
      }
    }
  }
  while (mesh.domains_.size() > 1 && mesh.domains_.back().empty()) mesh.domains_.pop_back();
  mesh.rebuild_active();
  return mesh;
}

bool HierarchicalMesh::in_domain(int level, const Cell& c) const {
  if (level < 0 || level >= num_levels()) return false;
  const Cell n = num_cells(level);
  if (c[0] < 0 || c[1] < 0 || c[0] >= n[0] || c[1] >= n[1]) return false;
  if (level == 0) return true;
  return domains_[static_cast<std::size_t>(level)].contains(c);
}

int HierarchicalMesh::index_of(const ActiveElement& t) const {
  auto it = std::lower_bound(active_.begin(), active_.end(), t);
  if (it == active_.end() || *it != t) return -1;
  return static_cast<int>(it - active_.begin());
}

std::vector<Cell> HierarchicalMesh::domain_cells(int level) const {
  std::vector<Cell> out;
  if (level == 0) {
    const Cell n = num_cells(0);
    for (Index i = 0; i < n[0]; ++i)
      for (Index j = 0; j < n[1]; ++j) out.push_back({i, j});
    return out;
  }
  if (level >= num_levels()) return out;
  out.assign(domains_[static_cast<std::size_t>(level)].begin(), domains_[static_cast<std::size_t>(level)].end());
  std::sort(out.begin(), out.end());
  return out;
}

std::size_t HierarchicalMesh::domain_size(int level) const {
  if (level == 0) {
    const Cell n = num_cells(0);
    return static_cast<std::size_t>(n[0]) * static_cast<std::size_t>(n[1]);
  }
  if (level >= num_levels()) return 0;
  return domains_[static_cast<std::size_t>(level)].size();
}

Box HierarchicalMesh::box(int level, const Cell& c) const {
  Box b;
  for (int i = 0; i < kDim; ++i) {
    b.lo[i] = hier_[static_cast<std::size_t>(i)].breakpoint(level, c[i]);
    b.hi[i] = hier_[static_cast<std::size_t>(i)].breakpoint(level, c[i] + 1);
  }
  return b;
}

ActiveElement HierarchicalMesh::locate(const Point& s) const {
  ActiveElement t;
  for (int i = 0; i < kDim; ++i) t.cell[i] = hier_[static_cast<std::size_t>(i)].cell_containing(0, s[i]);
  while (refined(t.level, t.cell)) {
    ++t.level;
    for (int i = 0; i < kDim; ++i) t.cell[i] = hier_[static_cast<std::size_t>(i)].cell_containing(t.level, s[i]);
  }
  return t;
}

bool HierarchicalMesh::operator==(const HierarchicalMesh& other) const {
  return knots0_ == other.knots0_ && domains_ == other.domains_;
}

void HierarchicalMesh::bisect(std::span<const ActiveElement> cells) {
  for (const ActiveElement& t : cells) {
    const int fine = t.level + 1;
    if (fine > kMaxLevel) throw InvalidInput("refinement beyond level " + std::to_string(kMaxLevel));
    if (static_cast<int>(domains_.size()) <= fine) domains_.resize(static_cast<std::size_t>(fine) + 1);
    auto& dom = domains_[static_cast<std::size_t>(fine)];
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) dom.insert(Cell{2 * t.cell[0] + a, 2 * t.cell[1] + b});
  }
  rebuild_active();
}

void HierarchicalMesh::rebuild_active() {
  active_.clear();
  for (int k = 0; k < num_levels(); ++k) {
    if (k == 0) {
      const Cell n = num_cells(0);
      for (Index i = 0; i < n[0]; ++i)
        for (Index j = 0; j < n[1]; ++j)
          if (!refined(0, {i, j})) active_.push_back({0, {i, j}});
      continue;
    }
    for (const Cell& c : domains_[static_cast<std::size_t>(k)]) {
      if (!refined(k, c)) active_.push_back({k, c});
    }
  }
  std::sort(active_.begin(), active_.end());
}

HierarchicalMesh initial_mesh(const TensorKnotVector& knots0) { return HierarchicalMesh(knots0); }

// ---------------------------------------------------------------------------

Cell first_basis_on_cell(const HierarchicalMesh& mesh, int level, const Cell& c) {
  return {mesh.hierarchy(0).first_basis_on_cell(level, c[0]), mesh.hierarchy(1).first_basis_on_cell(level, c[1])};
}

std::array<std::pair<Index, Index>, kDim> support_box(const HierarchicalMesh& mesh, int level, const Cell& j) {
  return {mesh.hierarchy(0).support_cells(level, j[0]), mesh.hierarchy(1).support_cells(level, j[1])};
}

bool in_hierarchical_basis(const HierarchicalMesh& mesh, int level, const Cell& j) {
  if (level < 0 || level >= mesh.num_levels()) return false;
  for (int i = 0; i < kDim; ++i) {
    if (j[i] < 0 || j[i] >= mesh.hierarchy(i).num_basis(level)) return false;
  }
  const auto sb = support_box(mesh, level, j);
  bool some_unrefined = false;
  for (Index a = sb[0].first; a <= sb[0].second; ++a) {
    for (Index b = sb[1].first; b <= sb[1].second; ++b) {
      if (!mesh.in_domain(level, {a, b})) return false;
      if (!some_unrefined && !mesh.refined(level, {a, b})) some_unrefined = true;
    }
  }
  return some_unrefined;
}

namespace {

void collect_below(const HierarchicalMesh& mesh, int level, const Cell& c, std::vector<ActiveElement>& out) {
  if (!mesh.in_domain(level, c)) return;
  if (!mesh.refined(level, c)) {
    out.push_back({level, c});
    return;
  }
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) collect_below(mesh, level + 1, {2 * c[0] + a, 2 * c[1] + b}, out);
}

}  // namespace

void elements_in_support(const HierarchicalMesh& mesh, int level, const Cell& j, std::vector<ActiveElement>& out) {
  const auto sb = support_box(mesh, level, j);
  for (Index a = sb[0].first; a <= sb[0].second; ++a)
    for (Index b = sb[1].first; b <= sb[1].second; ++b) collect_below(mesh, level, {a, b}, out);
}

std::vector<ActiveElement> neighbors(const HierarchicalMesh& mesh, const ActiveElement& t) {
  require_active(mesh, t);
  std::vector<ActiveElement> out;
  const int p0 = mesh.degree(0);
  const int p1 = mesh.degree(1);
  for (int k = 0; k <= t.level; ++k) {
    const int shift = t.level - k;
    const Cell anc{t.cell[0] >> shift, t.cell[1] >> shift};
    const auto first = first_basis_on_cell(mesh, k, anc);
    for (int a = 0; a <= p0; ++a) {
      for (int b = 0; b <= p1; ++b) {
        const Cell j{first[0] + a, first[1] + b};
        if (in_hierarchical_basis(mesh, k, j)) elements_in_support(mesh, k, j, out);
      }
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<ActiveElement> bad_neighbors(const HierarchicalMesh& mesh, const ActiveElement& t) {
  auto all = neighbors(mesh, t);
  std::vector<ActiveElement> out;
  for (const auto& n : all)
    if (n.level == t.level - 1) out.push_back(n);
  return out;
}

bool is_admissible(const HierarchicalMesh& mesh) {
  // A level-k basis function only sees elements of level >= k, and one of
  // level k. The mesh is admissible iff no support holds a level-(k+2) cell.
  const int p0 = mesh.degree(0);
  const int p1 = mesh.degree(1);
  std::set<std::pair<int, Cell>> seen;
  for (const ActiveElement& t : mesh.active()) {
    const auto first = first_basis_on_cell(mesh, t.level, t.cell);
    for (int a = 0; a <= p0; ++a) {
      for (int b = 0; b <= p1; ++b) {
        const Cell j{first[0] + a, first[1] + b};
        if (!seen.insert({t.level, j}).second) continue;
        if (!in_hierarchical_basis(mesh, t.level, j)) continue;
        const auto sb = support_box(mesh, t.level, j);
        for (Index x = sb[0].first; x <= sb[0].second; ++x) {
          for (Index y = sb[1].first; y <= sb[1].second; ++y) {
            if (!mesh.refined(t.level, {x, y})) continue;
            for (int u = 0; u < 2; ++u)
              for (int v = 0; v < 2; ++v)
                if (mesh.refined(t.level + 1, {2 * x + u, 2 * y + v})) return false;
          }
        }
      }
    }
  }
  return true;
}

namespace {

// Bad neighbors on an admissible mesh: active level-(l-1) cells in the
// supports of level-(l-1) basis functions living on the parent cell.
void fast_bad_neighbors(const HierarchicalMesh& mesh, const ActiveElement& t, std::vector<ActiveElement>& out) {
  if (t.level == 0) return;
  const int k = t.level - 1;
  const Cell parent = parent_of(t.cell);
  const auto first = first_basis_on_cell(mesh, k, parent);
  for (int a = 0; a <= mesh.degree(0); ++a) {
    for (int b = 0; b <= mesh.degree(1); ++b) {
      const Cell j{first[0] + a, first[1] + b};
      if (!in_hierarchical_basis(mesh, k, j)) continue;
      const auto sb = support_box(mesh, k, j);
      for (Index x = sb[0].first; x <= sb[0].second; ++x)
        for (Index y = sb[1].first; y <= sb[1].second; ++y)
          if (!mesh.refined(k, {x, y})) out.push_back({k, {x, y}});
    }
  }
}

}  // namespace

HierarchicalMesh refine(const HierarchicalMesh& mesh, std::span<const ActiveElement> marked) {
  std::set<ActiveElement> closure;
  for (const auto& t : marked) {
    require_active(mesh, t);
    closure.insert(t);
  }
  std::vector<ActiveElement> frontier(closure.begin(), closure.end());
  std::vector<ActiveElement> candidates;
  int rounds = 0;
  while (!frontier.empty()) {
    if (++rounds > mesh.num_levels() + 1) throw std::logic_error("refinement closure did not terminate");
    candidates.clear();
    for (const auto& t : frontier) fast_bad_neighbors(mesh, t, candidates);
    frontier.clear();
    for (const auto& c : candidates)
      if (closure.insert(c).second) frontier.push_back(c);
  }
  HierarchicalMesh out = mesh;
  if (!closure.empty()) {
    std::vector<ActiveElement> cells(closure.begin(), closure.end());
    out.bisect(cells);
  }
  return out;
}

HierarchicalMesh overlay(const HierarchicalMesh& a, const HierarchicalMesh& b) {
  if (!(a.knots0() == b.knots0())) throw InvalidInput("overlay needs meshes with identical level-0 knots");
  std::vector<std::vector<Cell>> domains(static_cast<std::size_t>(std::max(a.num_levels(), b.num_levels())));
  for (std::size_t k = 1; k < domains.size(); ++k) {
    auto da = a.domain_cells(static_cast<int>(k));
    auto db = b.domain_cells(static_cast<int>(k));
    std::set_union(da.begin(), da.end(), db.begin(), db.end(), std::back_inserter(domains[k]));
  }
  return HierarchicalMesh::from_domains(a.knots0(), domains);
}

std::vector<ActiveElement> patch(const HierarchicalMesh& mesh, std::span<const ActiveElement> region, int k) {
  if (k < 0) throw InvalidInput("patch order must be nonnegative");
  std::vector<ActiveElement> current(region.begin(), region.end());
  for (const auto& t : current) require_active(mesh, t);
  std::sort(current.begin(), current.end());
  current.erase(std::unique(current.begin(), current.end()), current.end());
  for (int step = 0; step < k; ++step) {
    std::vector<Box> boxes;
    boxes.reserve(current.size());
    for (const auto& t : current) boxes.push_back(mesh.box(t));
    std::vector<ActiveElement> next;
    for (const auto& t : mesh.active()) {
      const Box bt = mesh.box(t);
      for (const Box& b : boxes) {
        if (boxes_touch(bt, b)) {
          next.push_back(t);
          break;
        }
      }
    }
    current = std::move(next);
  }
  return current;
}

}  // namespace higa
