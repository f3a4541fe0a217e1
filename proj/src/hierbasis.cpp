#include "higa/hierbasis.hpp"

#include <algorithm>
#include <unordered_set>

namespace higa {

namespace {

constexpr std::array<std::array<int, kDim>, 6> kDerivs{{{0, 0}, {1, 0}, {0, 1}, {2, 0}, {1, 1}, {0, 2}}};

int deriv_slot(const std::array<int, kDim>& d) {
  for (int i = 0; i < 6; ++i)
    if (kDerivs[static_cast<std::size_t>(i)] == d) return i;
  throw InvalidInput("derivative order must have total order <= 2");
}

bool support_inside_domain(const HierarchicalMesh& mesh, int level, const Cell& j) {
  const auto sb = support_box(mesh, level, j);
  for (Index a = sb[0].first; a <= sb[0].second; ++a)
    for (Index b = sb[1].first; b <= sb[1].second; ++b)
      if (!mesh.in_domain(level, {a, b})) return false;
  return true;
}

bool vanishes_on_boundary(const HierarchicalMesh& mesh, int level, const Cell& j) {
  for (int i = 0; i < kDim; ++i) {
    if (j[i] == 0 || j[i] == mesh.hierarchy(i).num_basis(level) - 1) return false;
  }
  return true;
}

}  // namespace

std::vector<HierBasisFunction> hierarchical_basis(const HierarchicalMesh& mesh) {
  std::vector<HierBasisFunction> out;
  std::vector<std::unordered_set<Cell, CellHash>> seen(static_cast<std::size_t>(mesh.num_levels()));
  for (const ActiveElement& t : mesh.active()) {
    const auto first = first_basis_on_cell(mesh, t.level, t.cell);
    for (int a = 0; a <= mesh.degree(0); ++a) {
      for (int b = 0; b <= mesh.degree(1); ++b) {
        const Cell j{first[0] + a, first[1] + b};
        if (!seen[static_cast<std::size_t>(t.level)].insert(j).second) continue;
        // t is an unrefined cell of the support, so containment decides membership.
        if (support_inside_domain(mesh, t.level, j)) {
          out.push_back({t.level, j, vanishes_on_boundary(mesh, t.level, j)});
        }
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<HierBasisFunction> boundary_basis(const HierarchicalMesh& mesh) {
  auto all = hierarchical_basis(mesh);
  std::erase_if(all, [](const HierBasisFunction& f) { return !f.vanishes_on_boundary; });
  return all;
}

TruncatedFunction truncate(const HierarchicalMesh& mesh, const HierBasisFunction& beta) {
  if (!in_hierarchical_basis(mesh, beta.level, beta.j)) throw InvalidInput("function is not in the hierarchical basis");
  TruncatedFunction out;
  out.base = beta;
  out.base.vanishes_on_boundary = vanishes_on_boundary(mesh, beta.level, beta.j);
  const auto u0 = mesh.hierarchy(0).two_scale(beta.level, beta.j[0]);
  const auto u1 = mesh.hierarchy(1).two_scale(beta.level, beta.j[1]);
  const int fine = beta.level + 1;
  for (const auto& [j0, c0] : u0) {
    for (const auto& [j1, c1] : u1) {
      if (support_inside_domain(mesh, fine, {j0, j1})) continue;
      out.fine_coeffs.push_back({TensorBSplineIndex{fine, {j0, j1}}, c0 * c1});
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

HierSpace::HierSpace(const HierarchicalMesh& mesh, std::vector<HierBasisFunction> functions)
    : mesh_(&mesh), functions_(std::move(functions)) {
  lookup_.resize(static_cast<std::size_t>(mesh.num_levels()));
  for (std::size_t i = 0; i < functions_.size(); ++i) {
    const auto& f = functions_[i];
    if (f.level < 0 || f.level >= mesh.num_levels()) throw InvalidInput("basis function level outside the mesh");
    lookup_[static_cast<std::size_t>(f.level)].emplace(f.j, static_cast<int>(i));
  }
}

int HierSpace::find(int level, const Cell& j) const {
  if (level < 0 || level >= static_cast<int>(lookup_.size())) return -1;
  const auto& m = lookup_[static_cast<std::size_t>(level)];
  auto it = m.find(j);
  return it == m.end() ? -1 : it->second;
}

void ElementBasis::build(const HierSpace& space, const ActiveElement& t, Representation which) {
  const HierarchicalMesh& mesh = space.mesh();
  mesh_ = &mesh;
  elem_ = t;
  indices_.clear();
  term_begin_.assign(1, 0);
  terms_.clear();
  min_level_ = t.level;
  max_level_ = t.level;
  const int p0 = mesh.degree(0);
  const int p1 = mesh.degree(1);

  for (int k = 0; k <= t.level; ++k) {
    const int shift = t.level - k;
    const Cell anc{t.cell[0] >> shift, t.cell[1] >> shift};
    const auto first = first_basis_on_cell(mesh, k, anc);
    for (int a = 0; a <= p0; ++a) {
      for (int b = 0; b <= p1; ++b) {
        const Cell j{first[0] + a, first[1] + b};
        const int idx = space.find(k, j);
        if (idx < 0) continue;
        if (which == Representation::plain || k == t.level) {
          terms_.push_back({k, {a, b}, 1.0});
          min_level_ = std::min(min_level_, k);
        } else {
          const int fine = k + 1;
          const Cell anc1{t.cell[0] >> (shift - 1), t.cell[1] >> (shift - 1)};
          const auto first1 = first_basis_on_cell(mesh, fine, anc1);
          const auto u0 = mesh.hierarchy(0).two_scale(k, j[0]);
          const auto u1 = mesh.hierarchy(1).two_scale(k, j[1]);
          const std::size_t before = terms_.size();
          for (const auto& [j0, c0] : u0) {
            const int r0 = static_cast<int>(j0 - first1[0]);
            if (r0 < 0 || r0 > p0) continue;
            for (const auto& [j1, c1] : u1) {
              const int r1 = static_cast<int>(j1 - first1[1]);
              if (r1 < 0 || r1 > p1) continue;
              if (support_inside_domain(mesh, fine, {j0, j1})) continue;
              terms_.push_back({fine, {r0, r1}, c0 * c1});
            }
          }
          if (terms_.size() == before) continue;
          min_level_ = std::min(min_level_, fine);
        }
        indices_.push_back(idx);
        term_begin_.push_back(static_cast<int>(terms_.size()));
      }
    }
  }
}

void ElementBasis::evaluate(std::span<const double> x0, std::span<const double> x1, int nd,
                            std::vector<double>& out) const {
  if (nd < 0 || nd > 2) throw InvalidInput("derivative order must be 0, 1 or 2");
  const HierarchicalMesh& mesh = *mesh_;
  const std::array<int, kDim> p{mesh.degree(0), mesh.degree(1)};
  const std::array<std::size_t, kDim> nq{x0.size(), x1.size()};
  const std::array<std::span<const double>, kDim> xs{x0, x1};
  const int nlev = max_level_ - min_level_ + 1;

  // tables_[level][dir]: per point, (nd+1) x (p+1) values.
  std::array<std::size_t, kDim> stride{};
  std::array<std::size_t, kDim> dir_size{};
  for (int d = 0; d < kDim; ++d) {
    stride[d] = static_cast<std::size_t>((nd + 1) * (p[d] + 1));
    dir_size[d] = stride[d] * nq[d];
  }
  const std::size_t level_size = dir_size[0] + dir_size[1];
  tables_.resize(level_size * static_cast<std::size_t>(nlev));
  for (int L = min_level_; L <= max_level_; ++L) {
    const int shift = elem_.level - L;
    double* base = tables_.data() + level_size * static_cast<std::size_t>(L - min_level_);
    for (int d = 0; d < kDim; ++d) {
      const Index c = elem_.cell[d] >> shift;
      double* tab = base + (d == 0 ? 0 : dir_size[0]);
      for (std::size_t q = 0; q < nq[d]; ++q) {
        mesh.hierarchy(d).basis_ders(L, c, xs[d][q], nd, std::span<double>(tab + q * stride[d], stride[d]));
      }
    }
  }

  const int nder = num_derivs(nd);
  const std::size_t npts = nq[0] * nq[1];
  out.assign(static_cast<std::size_t>(size()) * static_cast<std::size_t>(nder) * npts, 0.0);
  for (int f = 0; f < size(); ++f) {
    for (int ti = term_begin_[static_cast<std::size_t>(f)]; ti < term_begin_[static_cast<std::size_t>(f) + 1]; ++ti) {
      const Term& term = terms_[static_cast<std::size_t>(ti)];
      const double* base = tables_.data() + level_size * static_cast<std::size_t>(term.level - min_level_);
      const double* t0 = base;
      const double* t1 = base + dir_size[0];
      for (int dd = 0; dd < nder; ++dd) {
        const auto& ord = kDerivs[static_cast<std::size_t>(dd)];
        double* o = out.data() + (static_cast<std::size_t>(f) * static_cast<std::size_t>(nder) + static_cast<std::size_t>(dd)) * npts;
        for (std::size_t q0 = 0; q0 < nq[0]; ++q0) {
          const double v0 = term.coef * t0[q0 * stride[0] + static_cast<std::size_t>(ord[0] * (p[0] + 1) + term.r[0])];
          if (v0 == 0.0) continue;
          const double* row = t1 + static_cast<std::size_t>(ord[1] * (p[1] + 1) + term.r[1]);
          for (std::size_t q1 = 0; q1 < nq[1]; ++q1) o[q0 * nq[1] + q1] += v0 * row[q1 * stride[1]];
        }
      }
    }
  }
}

double eval_hier(const HierSpace& space, std::span<const double> coeffs, const Point& s,
                 const std::array<int, kDim>& deriv, Representation which) {
  if (static_cast<int>(coeffs.size()) != space.size()) throw InvalidInput("coefficient count does not match the basis");
  const int slot = deriv_slot(deriv);
  const int nd = deriv[0] + deriv[1];
  ElementBasis eb;
  eb.build(space, space.mesh().locate(s), which);
  std::vector<double> vals;
  const double x0[1] = {s[0]};
  const double x1[1] = {s[1]};
  eb.evaluate(x0, x1, nd, vals);
  const int nder = num_derivs(nd);
  double sum = 0.0;
  for (int f = 0; f < eb.size(); ++f) {
    sum += coeffs[static_cast<std::size_t>(eb.indices()[static_cast<std::size_t>(f)])] *
           vals[static_cast<std::size_t>(f * nder + slot)];
  }
  return sum;
}

double eval_hier(const HierarchicalMesh& mesh, std::span<const double> coeffs, const Point& s,
                 const std::array<int, kDim>& deriv, Representation which) {
  const HierSpace space(mesh, hierarchical_basis(mesh));
  return eval_hier(space, coeffs, s, deriv, which);
}

}  // namespace higa
