#include "higa/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <json.hpp>

#include "higa/quadrature.hpp"

namespace higa {

namespace {

int find_span(const KnotVector& kv, double a) {
  const auto U = kv.knots();
  const int p = kv.degree();
  const int n = kv.num_basis();
  int i = static_cast<int>(std::upper_bound(U.begin(), U.end(), a) - U.begin()) - 1;
  return std::clamp(i, p, n - 1);
}

}  // namespace

GeometryMap::GeometryMap(std::array<KnotVector, kDim> knots, std::vector<Point> control_points,
                         std::vector<double> weights)
    : knots_(std::move(knots)), cps_(std::move(control_points)), weights_(std::move(weights)) {
  const std::size_t n = static_cast<std::size_t>(knots_[0].num_basis()) * static_cast<std::size_t>(knots_[1].num_basis());
  if (cps_.size() != n) throw InvalidInput("control point count does not match the knot vectors");
  if (weights_.size() != n) throw InvalidInput("weight count does not match the knot vectors");
  for (double w : weights_) {
    if (!(w > 0.0)) throw InvalidInput("NURBS weights must be positive");
  }
}

GeometryEval GeometryMap::evaluate(const Point& s, const Point& anchor, int nd) const {
  const int p0 = degree(0);
  const int p1 = degree(1);
  const int n0 = knots_[0].num_basis();
  std::array<int, kDim> span{};
  double ders0[3 * (kMaxDegree + 1)];
  double ders1[3 * (kMaxDegree + 1)];
  double* ders[kDim] = {ders0, ders1};
  for (int d = 0; d < kDim; ++d) {
    const auto& kv = knots_[static_cast<std::size_t>(d)];
    const int p = kv.degree();
    span[d] = find_span(kv, anchor[d]);
    const auto window = kv.knots().subspan(static_cast<std::size_t>(span[d] - p + 1), static_cast<std::size_t>(2 * p));
    ders_basis_funs(window, p, s[d], nd, std::span<double>(ders[d], static_cast<std::size_t>((nd + 1) * (p + 1))));
  }

  // Weighted sums W and A = sum w c N, and their derivatives up to order 2.
  double W[3][3] = {};
  double A[kDim][3][3] = {};
  for (int a = 0; a <= p0; ++a) {
    for (int b = 0; b <= p1; ++b) {
      const std::size_t idx = static_cast<std::size_t>(span[0] - p0 + a) +
                              static_cast<std::size_t>(n0) * static_cast<std::size_t>(span[1] - p1 + b);
      const double w = weights_[idx];
      for (int o0 = 0; o0 <= nd; ++o0) {
        for (int o1 = 0; o0 + o1 <= nd; ++o1) {
          const double nn = w * ders0[o0 * (p0 + 1) + a] * ders1[o1 * (p1 + 1) + b];
          W[o0][o1] += nn;
          A[0][o0][o1] += nn * cps_[idx][0];
          A[1][o0][o1] += nn * cps_[idx][1];
        }
      }
    }
  }

  GeometryEval out;
  const double w = W[0][0];
  for (int i = 0; i < kDim; ++i) {
    const double f = A[i][0][0] / w;
    out.x[i] = f;
    if (nd < 1) continue;
    const double fa[2] = {(A[i][1][0] - f * W[1][0]) / w, (A[i][0][1] - f * W[0][1]) / w};
    out.jac[i][0] = fa[0];
    out.jac[i][1] = fa[1];
    if (nd < 2) continue;
    auto Wd = [&](int a, int b) { return W[(a == 0) + (b == 0)][(a == 1) + (b == 1)]; };
    auto Ad = [&](int a, int b) { return A[i][(a == 0) + (b == 0)][(a == 1) + (b == 1)]; };
    auto W1 = [&](int a) { return a == 0 ? W[1][0] : W[0][1]; };
    for (int a = 0; a < kDim; ++a)
      for (int b = 0; b < kDim; ++b)
        out.hess[i][a][b] = (Ad(a, b) - fa[a] * W1(b) - fa[b] * W1(a) - f * Wd(a, b)) / w;
  }
  return out;
}

Point GeometryMap::map(const Point& s) const { return evaluate(s, s, 0).x; }
Mat2 GeometryMap::jacobian(const Point& s) const { return evaluate(s, s, 1).jac; }
Hess2 GeometryMap::second_derivatives(const Point& s) const { return evaluate(s, s, 2).hess; }

GeometryMap benchmark_geometry(std::string_view name) {
  const KnotVector lin = KnotVector::open(1);
  if (name == "square") {
    return GeometryMap({lin, lin}, {{0, 0}, {1, 0}, {0, 1}, {1, 1}}, std::vector<double>(4, 1.0));
  }
  if (name == "lshape") {
    const double half[] = {0.5};
    return GeometryMap({KnotVector::open(1, half), lin},
                       {{0, 0.5}, {0.5, 0.5}, {0.5, 0}, {0, 1}, {1, 1}, {1, 0}}, std::vector<double>(6, 1.0));
  }
  if (name == "quarter_ring" || name == "quarter-ring") {
    const double r = 1.0 / std::sqrt(2.0);
    return GeometryMap({KnotVector::open(2), lin}, {{0, 0.5}, {0.5, 0.5}, {0.5, 0}, {0, 1}, {1, 1}, {1, 0}},
                       {1.0, r, 1.0, 1.0, r, 1.0});
  }
  throw ConfigError("unknown geometry '" + std::string(name) + "'");
}

GeometryMap geometry_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("geometry file: ") + e.what());
  }
  for (const char* key : {"degrees", "knots", "control_points", "weights"}) {
    if (!j.contains(key)) throw ConfigError(std::string("geometry file: missing field '") + key + "'");
  }
  try {
    const auto degrees = j.at("degrees").get<std::vector<int>>();
    const auto knots = j.at("knots").get<std::vector<std::vector<double>>>();
    const auto cps = j.at("control_points").get<std::vector<std::array<double, 2>>>();
    const auto weights = j.at("weights").get<std::vector<double>>();
    if (degrees.size() != kDim || knots.size() != kDim) throw ConfigError("geometry file: 'degrees' and 'knots' need two entries");
    std::vector<Point> points(cps.begin(), cps.end());
    return GeometryMap({KnotVector(degrees[0], knots[0]), KnotVector(degrees[1], knots[1])}, std::move(points), weights);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("geometry file: ") + e.what());
  } catch (const InvalidInput& e) {
    throw ConfigError(std::string("geometry file: ") + e.what());
  }
}

std::string geometry_to_json(const GeometryMap& g) {
  nlohmann::json j;
  j["degrees"] = {g.degree(0), g.degree(1)};
  j["knots"] = {std::vector<double>(g.knots(0).knots().begin(), g.knots(0).knots().end()),
                std::vector<double>(g.knots(1).knots().begin(), g.knots(1).knots().end())};
  nlohmann::json cps = nlohmann::json::array();
  for (const auto& c : g.control_points()) cps.push_back({c[0], c[1]});
  j["control_points"] = cps;
  j["weights"] = g.weights();
  return j.dump(2);
}

void check_geometry_compatible(const TensorKnotVector& knots0, const GeometryMap& g) {
  for (int d = 0; d < kDim; ++d) {
    const auto ansatz = knots0.dirs[static_cast<std::size_t>(d)].breakpoints();
    for (double b : g.knots(d).breakpoints()) {
      if (!std::binary_search(ansatz.begin(), ansatz.end(), b)) {
        std::ostringstream msg;
        msg << "geometry breakpoint " << b << " in direction " << d << " is not an initial ansatz knot";
        throw ConfigError(msg.str());
      }
    }
  }
}

double element_size(const HierarchicalMesh& mesh, const GeometryMap& g, const ActiveElement& t) {
  const Box b = mesh.box(t);
  const GaussRule& r0 = gauss_legendre(g.degree(0) + 3);
  const GaussRule& r1 = gauss_legendre(g.degree(1) + 3);
  const Point centre{0.5 * (b.lo[0] + b.hi[0]), 0.5 * (b.lo[1] + b.hi[1])};
  const double h0 = b.hi[0] - b.lo[0];
  const double h1 = b.hi[1] - b.lo[1];
  double area = 0.0;
  for (std::size_t a = 0; a < r0.nodes.size(); ++a) {
    for (std::size_t c = 0; c < r1.nodes.size(); ++c) {
      const Point s{b.lo[0] + h0 * r0.nodes[a], b.lo[1] + h1 * r1.nodes[c]};
      area += r0.weights[a] * r1.weights[c] * std::abs(det2(g.evaluate(s, centre, 1).jac));
    }
  }
  return area * h0 * h1;
}

}  // namespace higa
