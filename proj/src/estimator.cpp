#include "higa/estimator.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include "higa/quadrature.hpp"

namespace higa {

double ElementIndicators::total() const { return std::sqrt(total_sq); }

std::vector<Facet> facets(const HierarchicalMesh& mesh) {
  std::vector<Facet> out;
  const auto elements = mesh.active();
  for (std::size_t e = 0; e < elements.size(); ++e) {
    const ActiveElement& t = elements[e];
    const Cell n = mesh.num_cells(t.level);
    const Box b = mesh.box(t);
    for (int d = 0; d < kDim; ++d) {
      const int o = 1 - d;
      for (int side : {-1, 1}) {
        Cell across = t.cell;
        across[d] += side;
        if (across[d] < 0 || across[d] >= n[d]) continue;
        int other = -1;
        if (mesh.in_domain(t.level, across)) {
          if (mesh.refined(t.level, across) || side < 0) continue;
          other = mesh.index_of({t.level, across});
        } else {
          for (int k = t.level - 1; k >= 0 && other < 0; --k) {
            const int shift = t.level - k;
            const Cell anc{across[0] >> shift, across[1] >> shift};
            if (mesh.in_domain(k, anc) && !mesh.refined(k, anc)) other = mesh.index_of({k, anc});
          }
        }
        Facet f;
        f.normal_dir = d;
        f.coord = side > 0 ? b.hi[d] : b.lo[d];
        f.lo = b.lo[o];
        f.hi = b.hi[o];
        f.left = side > 0 ? static_cast<int>(e) : other;
        f.right = side > 0 ? other : static_cast<int>(e);
        out.push_back(f);
      }
    }
  }
  return out;
}

namespace {

void check_problem(const PDEProblem& problem) {
  if (!problem.f) throw ConfigError("problem has no right-hand side f");
  if (problem.A && !problem.A_constant && !problem.divA) {
    throw ConfigError("a non-constant diffusion coefficient A needs the divA callback");
  }
}

Mat2 eval_A(const PDEProblem& problem, const EvalPoint& pt) {
  return problem.A ? problem.A(pt) : Mat2{{{1.0, 0.0}, {0.0, 1.0}}};
}

struct FacetWork {
  std::vector<double> pts;
  std::vector<double> wts;
  std::array<std::vector<double>, 2> vals;
};

// Integral of [A grad U . n]^2 over the facet, with normal and length taken
// from the geometry of side `geom_side` (0 = left, 1 = right).
double facet_integral(const HierarchicalMesh& mesh, const GeometryMap& g, const PDEProblem& problem,
                      std::span<const double> coeffs, const Facet& f, const std::array<const ElementBasis*, 2>& eb,
                      int npts, int geom_side, FacetWork& work) {
  const GaussRule& rule = gauss_legendre(npts);
  const int d = f.normal_dir;
  const int o = 1 - d;
  work.pts.resize(rule.nodes.size());
  work.wts.resize(rule.nodes.size());
  for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
    work.pts[q] = f.lo + (f.hi - f.lo) * rule.nodes[q];
    work.wts[q] = (f.hi - f.lo) * rule.weights[q];
  }
  const double line[1] = {f.coord};
  std::array<Point, 2> centre{};
  for (int s = 0; s < 2; ++s) {
    if (d == 0) {
      eb[static_cast<std::size_t>(s)]->evaluate(line, work.pts, 1, work.vals[static_cast<std::size_t>(s)]);
    } else {
      eb[static_cast<std::size_t>(s)]->evaluate(work.pts, line, 1, work.vals[static_cast<std::size_t>(s)]);
    }
    const Box b = mesh.box(eb[static_cast<std::size_t>(s)]->element());
    centre[static_cast<std::size_t>(s)] = {0.5 * (b.lo[0] + b.hi[0]), 0.5 * (b.lo[1] + b.hi[1])};
  }

  const std::size_t nq = work.pts.size();
  double total = 0.0;
  for (std::size_t q = 0; q < nq; ++q) {
    Point s{};
    s[d] = f.coord;
    s[o] = work.pts[q];
    std::array<Point, 2> flux{};
    PointGeometry geo_side{};
    for (int side = 0; side < 2; ++side) {
      const ElementBasis& basis = *eb[static_cast<std::size_t>(side)];
      const auto& vals = work.vals[static_cast<std::size_t>(side)];
      double d0 = 0.0;
      double d1 = 0.0;
      for (int fn = 0; fn < basis.size(); ++fn) {
        const double c = coeffs[static_cast<std::size_t>(basis.indices()[static_cast<std::size_t>(fn)])];
        const std::size_t base = static_cast<std::size_t>(fn) * 3 * nq;
        d0 += c * vals[base + nq + q];
        d1 += c * vals[base + 2 * nq + q];
      }
      const PointGeometry pg = point_geometry(g, s, centre[static_cast<std::size_t>(side)], 1);
      if (side == geom_side) geo_side = pg;
      const Point gr = physical_gradient(pg, d0, d1);
      const Mat2 A = eval_A(problem, pg.pt);
      flux[static_cast<std::size_t>(side)] = {A[0][0] * gr[0] + A[0][1] * gr[1], A[1][0] * gr[0] + A[1][1] * gr[1]};
    }
    const Point tau{geo_side.jac[0][o], geo_side.jac[1][o]};
    const double len = std::hypot(tau[0], tau[1]);
    if (len == 0.0) continue;
    const Point nu{tau[1] / len, -tau[0] / len};
    const double jump = (flux[0][0] - flux[1][0]) * nu[0] + (flux[0][1] - flux[1][1]) * nu[1];
    total += work.wts[q] * len * jump * jump;
  }
  return total;
}

}  // namespace

ElementIndicators estimate(const HierSpace& space, const GeometryMap& g, const PDEProblem& problem,
                           std::span<const double> coeffs, const EstimatorOptions& opts) {
  check_problem(problem);
  if (static_cast<int>(coeffs.size()) != space.size()) throw InvalidInput("coefficient count does not match the basis");
  const HierarchicalMesh& mesh = space.mesh();
  const auto elements = mesh.active();
  const std::size_t ne = elements.size();
  const int n0 = mesh.degree(0) + 1 + opts.extra_points;
  const int n1 = mesh.degree(1) + 1 + opts.extra_points;

  ElementIndicators ind;
  ind.elements.assign(elements.begin(), elements.end());
  ind.volume_sq.assign(ne, 0.0);
  ind.jump_sq.assign(ne, 0.0);
  ind.eta_sq.assign(ne, 0.0);

  std::vector<ElementBasis> bases(ne);
  std::vector<double> sizes(ne);
  std::vector<double> vals;
  for (std::size_t e = 0; e < ne; ++e) {
    const ActiveElement& t = elements[e];
    bases[e].build(space, t, Representation::plain);
    sizes[e] = element_size(mesh, g, t);
    const ElementQuadrature quad(mesh.box(t), n0, n1);
    const std::size_t nq = quad.size();
    bases[e].evaluate(quad.x0, quad.x1, 2, vals);
    double vol = 0.0;
    for (std::size_t q0 = 0; q0 < quad.x0.size(); ++q0) {
      for (std::size_t q1 = 0; q1 < quad.x1.size(); ++q1) {
        const std::size_t q = q0 * quad.x1.size() + q1;
        double u[6] = {};
        for (int fn = 0; fn < bases[e].size(); ++fn) {
          const double c = coeffs[static_cast<std::size_t>(bases[e].indices()[static_cast<std::size_t>(fn)])];
          const std::size_t base = static_cast<std::size_t>(fn) * 6 * nq;
          for (int k = 0; k < 6; ++k) u[k] += c * vals[base + static_cast<std::size_t>(k) * nq + q];
        }
        const PointGeometry pg = point_geometry(g, {quad.x0[q0], quad.x1[q1]}, quad.centre, 2);
        const Point gr = physical_gradient(pg, u[1], u[2]);
        const Mat2 H = physical_hessian(pg, gr, u[3], u[4], u[5]);
        const Mat2 A = eval_A(problem, pg.pt);
        double r = problem.f(pg.pt);
        r += A[0][0] * H[0][0] + A[0][1] * H[0][1] + A[1][0] * H[1][0] + A[1][1] * H[1][1];
        if (problem.divA) {
          const Point da = problem.divA(pg.pt);
          r += da[0] * gr[0] + da[1] * gr[1];
        }
        if (problem.b) {
          const Point bv = problem.b(pg.pt);
          r -= bv[0] * gr[0] + bv[1] * gr[1];
        }
        if (problem.c) r -= problem.c(pg.pt) * u[0];
        vol += quad.w0[q0] * quad.w1[q1] * std::abs(pg.det) * r * r;
      }
    }
    ind.volume_sq[e] = sizes[e] * vol;
  }

  const int nf = std::max(mesh.degree(0), mesh.degree(1)) + 1 + opts.extra_points;
  FacetWork work;
  for (const Facet& f : facets(mesh)) {
    const auto l = static_cast<std::size_t>(f.left);
    const auto r = static_cast<std::size_t>(f.right);
    const double j = facet_integral(mesh, g, problem, coeffs, f, {&bases[l], &bases[r]}, nf, 0, work);
    ind.jump_sq[l] += std::sqrt(sizes[l]) * j;
    ind.jump_sq[r] += std::sqrt(sizes[r]) * j;
  }

  for (std::size_t e = 0; e < ne; ++e) {
    ind.eta_sq[e] = ind.volume_sq[e] + ind.jump_sq[e];
    ind.total_sq += ind.eta_sq[e];
  }
  return ind;
}

std::pair<double, double> facet_jump_sides(const HierSpace& space, const GeometryMap& g, const PDEProblem& problem,
                                           std::span<const double> coeffs, const Facet& facet,
                                           const EstimatorOptions& opts) {
  const HierarchicalMesh& mesh = space.mesh();
  const auto elements = mesh.active();
  ElementBasis left, right;
  left.build(space, elements[static_cast<std::size_t>(facet.left)], Representation::plain);
  right.build(space, elements[static_cast<std::size_t>(facet.right)], Representation::plain);
  const int nf = std::max(mesh.degree(0), mesh.degree(1)) + 1 + opts.extra_points;
  FacetWork work;
  const double a = facet_integral(mesh, g, problem, coeffs, facet, {&left, &right}, nf, 0, work);
  const double b = facet_integral(mesh, g, problem, coeffs, facet, {&left, &right}, nf, 1, work);
  return {a, b};
}

std::string indicators_to_text(const ElementIndicators& ind) {
  std::string out;
  char buf[32];
  for (std::size_t e = 0; e < ind.elements.size(); ++e) {
    const auto& t = ind.elements[e];
    out += std::to_string(t.level) + " " + std::to_string(t.cell[0]) + " " + std::to_string(t.cell[1]) + " ";
    out.append(buf, std::to_chars(buf, buf + sizeof(buf), ind.volume_sq[e]).ptr);
    out += " ";
    out.append(buf, std::to_chars(buf, buf + sizeof(buf), ind.jump_sq[e]).ptr);
    out += "\n";
  }
  return out;
}

}  // namespace higa
