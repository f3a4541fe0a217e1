#include "higa/splines.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <string>

namespace higa {

namespace {

void check_monotone(std::span<const double> knots) {
  for (std::size_t i = 1; i < knots.size(); ++i) {
    if (!(knots[i - 1] <= knots[i])) {
      throw InvalidInput("knot sequence is not nondecreasing at position " + std::to_string(i));
    }
  }
}

// Degree-0 indicator of [a, b), closed at the right domain end x = 1.
double indicator(double a, double b, double x) {
  if (!(a < b)) return 0.0;
  if (a <= x && x < b) return 1.0;
  return (x == 1.0 && b == 1.0) ? 1.0 : 0.0;
}

double cox_de_boor(std::span<const double> t, double x) {
  const int q = static_cast<int>(t.size()) - 2;
  if (q == 0) return indicator(t[0], t[1], x);
  double value = 0.0;
  const double left_den = t[q] - t[0];
  if (left_den > 0.0) value += (x - t[0]) / left_den * cox_de_boor(t.first(q + 1), x);
  const double right_den = t[q + 1] - t[1];
  if (right_den > 0.0) value += (t[q + 1] - x) / right_den * cox_de_boor(t.subspan(1), x);
  return value;
}

double cox_de_boor_deriv(std::span<const double> t, double x, int order) {
  if (order == 0) return cox_de_boor(t, x);
  const int q = static_cast<int>(t.size()) - 2;
  if (q == 0) return 0.0;
  double value = 0.0;
  const double left_den = t[q] - t[0];
  if (left_den > 0.0) value += q / left_den * cox_de_boor_deriv(t.first(q + 1), x, order - 1);
  const double right_den = t[q + 1] - t[1];
  if (right_den > 0.0) value -= q / right_den * cox_de_boor_deriv(t.subspan(1), x, order - 1);
  return value;
}

}  // namespace

// ---------------------------------------------------------------------------
// KnotVector

KnotVector::KnotVector(int degree, std::vector<double> knots) : degree_(degree), knots_(std::move(knots)) {
  if (degree_ < 1 || degree_ > kMaxDegree) {
    throw InvalidInput("spline degree must lie in [1, " + std::to_string(kMaxDegree) + "]");
  }
  const auto p = static_cast<std::size_t>(degree_);
  if (knots_.size() < 2 * (p + 1)) throw InvalidInput("knot vector too short for its degree");
  check_monotone(knots_);
  for (std::size_t i = 0; i <= p; ++i) {
    if (knots_[i] != 0.0 || knots_[knots_.size() - 1 - i] != 1.0) {
      throw InvalidInput("knot vector is not p-open on [0,1]");
    }
  }
  if (knots_[p + 1] == 0.0 || knots_[knots_.size() - 2 - p] == 1.0) {
    throw InvalidInput("end knots repeated more than p+1 times");
  }
  const auto mult = multiplicities();
  for (std::size_t i = 1; i + 1 < mult.size(); ++i) {
    if (mult[i] > degree_) throw InvalidInput("interior knot multiplicity exceeds the degree");
  }
}

KnotVector KnotVector::open(int degree, std::span<const double> interior_breaks, int interior_multiplicity) {
  std::vector<double> knots(static_cast<std::size_t>(degree + 1), 0.0);
  for (double b : interior_breaks) knots.insert(knots.end(), static_cast<std::size_t>(interior_multiplicity), b);
  knots.insert(knots.end(), static_cast<std::size_t>(degree + 1), 1.0);
  return KnotVector(degree, std::move(knots));
}

std::vector<double> KnotVector::breakpoints() const {
  std::vector<double> out;
  for (double t : knots_) {
    if (out.empty() || out.back() != t) out.push_back(t);
  }
  return out;
}

std::vector<int> KnotVector::multiplicities() const {
  std::vector<int> out;
  for (std::size_t i = 0; i < knots_.size(); ++i) {
    if (i == 0 || knots_[i] != knots_[i - 1]) {
      out.push_back(1);
    } else {
      ++out.back();
    }
  }
  return out;
}

std::span<const double> KnotVector::local_knots(int j) const {
  if (j < 0 || j >= num_basis()) throw InvalidInput("basis index out of range");
  return std::span<const double>(knots_).subspan(static_cast<std::size_t>(j),
                                                 static_cast<std::size_t>(degree_ + 2));
}

KnotVector KnotVector::refine_dyadic() const {
  std::vector<double> out;
  out.reserve(2 * knots_.size());
  for (std::size_t i = 0; i < knots_.size(); ++i) {
    if (i > 0 && knots_[i - 1] < knots_[i]) out.push_back(0.5 * (knots_[i - 1] + knots_[i]));
    out.push_back(knots_[i]);
  }
  return KnotVector(degree_, std::move(out));
}

int TensorKnotVector::max_degree() const {
  int p = 0;
  for (const auto& d : dirs) p = std::max(p, d.degree());
  return p;
}

// ---------------------------------------------------------------------------
// Evaluation

double eval_univariate(std::span<const double> local_knots, double x, int deriv_order) {
  if (local_knots.size() < 2) throw InvalidInput("a B-spline needs at least two local knots");
  if (deriv_order < 0 || deriv_order > 2) throw InvalidInput("derivative order must be 0, 1 or 2");
  check_monotone(local_knots);
  if (x < local_knots.front() || x > local_knots.back()) return 0.0;
  return cox_de_boor_deriv(local_knots, x, deriv_order);
}

double eval_tensor(const TensorKnotVector& knots, const TensorBSplineIndex& idx, const Point& s,
                   const std::array<int, kDim>& deriv) {
  if (idx.level != knots.level) throw InvalidInput("B-spline index level does not match the knot vector level");
  int total = 0;
  for (int i = 0; i < kDim; ++i) total += deriv[i];
  if (total > 2) throw InvalidInput("total derivative order must not exceed 2");
  double value = 1.0;
  for (int i = 0; i < kDim; ++i) {
    value *= eval_univariate(knots.dirs[i].local_knots(static_cast<int>(idx.j[i])), s[i], deriv[i]);
    if (value == 0.0) break;
  }
  return value;
}

TensorKnotVector refine_level(const TensorKnotVector& knots) {
  TensorKnotVector out;
  for (int i = 0; i < kDim; ++i) out.dirs[i] = knots.dirs[i].refine_dyadic();
  out.level = knots.level + 1;
  return out;
}

void ders_basis_funs(std::span<const double> window, int p, double x, int nd, std::span<double> out) {
  assert(static_cast<int>(window.size()) == 2 * p);
  assert(static_cast<int>(out.size()) >= (nd + 1) * (p + 1));
  // Knot U[span + o] lives at window[p - 1 + o].
  auto U = [&](int o) { return window[static_cast<std::size_t>(p - 1 + o)]; };

  double ndu[kMaxDegree + 1][kMaxDegree + 1];
  double left[kMaxDegree + 1];
  double right[kMaxDegree + 1];
  double a[2][kMaxDegree + 1];

  ndu[0][0] = 1.0;
  for (int j = 1; j <= p; ++j) {
    left[j] = x - U(1 - j);
    right[j] = U(j) - x;
    double saved = 0.0;
    for (int r = 0; r < j; ++r) {
      ndu[j][r] = right[r + 1] + left[j - r];
      const double temp = ndu[r][j - 1] / ndu[j][r];
      ndu[r][j] = saved + right[r + 1] * temp;
      saved = left[j - r] * temp;
    }
    ndu[j][j] = saved;
  }
  const int stride = p + 1;
  for (int j = 0; j <= p; ++j) out[static_cast<std::size_t>(j)] = ndu[j][p];

  const int n = std::min(nd, p);
  for (int r = 0; r <= p; ++r) {
    int s1 = 0;
    int s2 = 1;
    a[0][0] = 1.0;
    for (int k = 1; k <= n; ++k) {
      double d = 0.0;
      const int rk = r - k;
      const int pk = p - k;
      if (r >= k) {
        a[s2][0] = a[s1][0] / ndu[pk + 1][rk];
        d = a[s2][0] * ndu[rk][pk];
      }
      const int j1 = rk >= -1 ? 1 : -rk;
      const int j2 = (r - 1 <= pk) ? k - 1 : p - r;
      for (int j = j1; j <= j2; ++j) {
        a[s2][j] = (a[s1][j] - a[s1][j - 1]) / ndu[pk + 1][rk + j];
        d += a[s2][j] * ndu[rk + j][pk];
      }
      if (r <= pk) {
        a[s2][k] = -a[s1][k - 1] / ndu[pk + 1][r];
        d += a[s2][k] * ndu[r][pk];
      }
      out[static_cast<std::size_t>(k * stride + r)] = d;
      std::swap(s1, s2);
    }
  }
  double factor = p;
  for (int k = 1; k <= n; ++k) {
    for (int j = 0; j <= p; ++j) out[static_cast<std::size_t>(k * stride + j)] *= factor;
    factor *= (p - k);
  }
  for (int k = n + 1; k <= nd; ++k) {
    for (int j = 0; j <= p; ++j) out[static_cast<std::size_t>(k * stride + j)] = 0.0;
  }
}

// ---------------------------------------------------------------------------
// Two-scale relation

std::vector<double> two_scale_local(std::span<const double> tau, int p) {
  std::vector<double> kv(tau.begin(), tau.end());
  std::vector<double> coef{1.0};
  std::vector<double> inserts;
  for (std::size_t i = 1; i < tau.size(); ++i) {
    if (tau[i - 1] < tau[i]) inserts.push_back(0.5 * (tau[i - 1] + tau[i]));
  }
  for (double x : inserts) {
    const int len = static_cast<int>(kv.size());
    int m = 0;
    while (m + 1 < len && kv[static_cast<std::size_t>(m + 1)] <= x) ++m;
    const int n = static_cast<int>(coef.size());
    std::vector<double> next(static_cast<std::size_t>(n + 1), 0.0);
    for (int i = 0; i <= n; ++i) {
      const double ci = i < n ? coef[static_cast<std::size_t>(i)] : 0.0;
      const double cim1 = i >= 1 ? coef[static_cast<std::size_t>(i - 1)] : 0.0;
      if (i <= m - p) {
        next[static_cast<std::size_t>(i)] = ci;
      } else if (i <= m) {
        if (ci == 0.0 && cim1 == 0.0) continue;
        const double den = kv[static_cast<std::size_t>(i + p)] - kv[static_cast<std::size_t>(i)];
        const double alpha = den > 0.0 ? (x - kv[static_cast<std::size_t>(i)]) / den : 0.0;
        next[static_cast<std::size_t>(i)] = alpha * ci + (1.0 - alpha) * cim1;
      } else {
        next[static_cast<std::size_t>(i)] = cim1;
      }
    }
    coef = std::move(next);
    kv.insert(kv.begin() + m + 1, x);
  }
  return coef;
}

std::vector<std::pair<int, double>> two_scale_univariate(const KnotVector& knots, int j) {
  const auto tau = knots.local_knots(j);
  const std::vector<double> coef = two_scale_local(tau, knots.degree());

  // Map the first local knot onto its occurrence in the refined vector.
  const auto coarse = knots.knots();
  const auto first_coarse = std::lower_bound(coarse.begin(), coarse.end(), tau[0]) - coarse.begin();
  const auto occurrence = j - static_cast<int>(first_coarse);
  const KnotVector fine = knots.refine_dyadic();
  const auto fine_knots = fine.knots();
  const auto first_fine = std::lower_bound(fine_knots.begin(), fine_knots.end(), tau[0]) - fine_knots.begin();
  const int offset = static_cast<int>(first_fine) + occurrence;

  std::vector<std::pair<int, double>> out;
  for (std::size_t i = 0; i < coef.size(); ++i) {
    if (coef[i] != 0.0) out.emplace_back(offset + static_cast<int>(i), coef[i]);
  }
  return out;
}

std::vector<std::pair<TensorBSplineIndex, double>> two_scale(const TensorKnotVector& knots,
                                                             const TensorBSplineIndex& idx) {
  if (idx.level != knots.level) throw InvalidInput("B-spline index level does not match the knot vector level");
  std::array<std::vector<std::pair<int, double>>, kDim> uni;
  for (int i = 0; i < kDim; ++i) uni[i] = two_scale_univariate(knots.dirs[i], static_cast<int>(idx.j[i]));
  std::vector<std::pair<TensorBSplineIndex, double>> out;
  out.reserve(uni[0].size() * uni[1].size());
  for (const auto& [j0, c0] : uni[0]) {
    for (const auto& [j1, c1] : uni[1]) {
      out.push_back({TensorBSplineIndex{idx.level + 1, {j0, j1}}, c0 * c1});
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// KnotHierarchy

KnotHierarchy::KnotHierarchy(const KnotVector& level0)
    : degree_(level0.degree()), breaks_(level0.breakpoints()), mult_(level0.multiplicities()) {
  n0_ = static_cast<int>(breaks_.size()) - 1;
  prefix_.assign(mult_.size() + 1, 0);
  for (std::size_t q = 0; q < mult_.size(); ++q) prefix_[q + 1] = prefix_[q] + mult_[q];
}

Index KnotHierarchy::num_basis(int level) const {
  const Index nc = num_cells(level);
  return first_knot(level, nc) + mult_.back() - degree_ - 1;
}

double KnotHierarchy::breakpoint(int level, Index c) const {
  const Index q = c >> level;
  const Index r = c & ((Index{1} << level) - 1);
  if (q >= n0_) return breaks_[static_cast<std::size_t>(n0_)];
  const double a = breaks_[static_cast<std::size_t>(q)];
  const double b = breaks_[static_cast<std::size_t>(q + 1)];
  return a + (b - a) * std::ldexp(static_cast<double>(r), -level);
}

int KnotHierarchy::multiplicity(int level, Index c) const {
  const Index r = c & ((Index{1} << level) - 1);
  return r == 0 ? mult_[static_cast<std::size_t>(c >> level)] : 1;
}

Index KnotHierarchy::first_knot(int level, Index c) const {
  // Level-0 breakpoints strictly before breakpoint c.
  const Index before = (c + (Index{1} << level) - 1) >> level;
  return c - before + prefix_[static_cast<std::size_t>(before)];
}

Index KnotHierarchy::cell_of_knot(int level, Index m) const {
  Index q = 0;
  for (Index cand = 1; cand <= n0_; ++cand) {
    const Index g = (cand << level) - cand + prefix_[static_cast<std::size_t>(cand)];
    if (g <= m) q = cand;
    else break;
  }
  const Index g = (q << level) - q + prefix_[static_cast<std::size_t>(q)];
  const int mq = mult_[static_cast<std::size_t>(q)];
  if (m < g + mq) return q << level;
  return (q << level) + (m - g - mq) + 1;
}

std::pair<Index, Index> KnotHierarchy::support_cells(int level, Index j) const {
  return {cell_of_knot(level, j), cell_of_knot(level, j + degree_ + 1) - 1};
}

Index KnotHierarchy::cell_containing(int level, double x) const {
  const Index nc = num_cells(level);
  int q = 0;
  while (q + 1 < n0_ && breaks_[static_cast<std::size_t>(q + 1)] <= x) ++q;
  const double a = breaks_[static_cast<std::size_t>(q)];
  const double b = breaks_[static_cast<std::size_t>(q + 1)];
  const Index per = Index{1} << level;
  Index r = static_cast<Index>(std::floor(std::ldexp((x - a) / (b - a), level)));
  r = std::clamp<Index>(r, 0, per - 1);
  Index c = (static_cast<Index>(q) << level) + r;
  while (c > 0 && breakpoint(level, c) > x) --c;
  while (c + 1 < nc && breakpoint(level, c + 1) <= x) ++c;
  return c;
}

void KnotHierarchy::local_knots(int level, Index j, std::span<double> out) const {
  for (int i = 0; i < degree_ + 2; ++i) out[static_cast<std::size_t>(i)] = knot(level, j + i);
}

void KnotHierarchy::basis_ders(int level, Index c, double x, int nd, std::span<double> out) const {
  const int p = degree_;
  const Index span = span_of_cell(level, c);
  double window[2 * kMaxDegree];
  // Knots U[span-p+1 .. span+p], walked breakpoint by breakpoint.
  const Index m = span - p + 1;
  Index cell = cell_of_knot(level, m);
  Index remaining = first_knot(level, cell) + multiplicity(level, cell) - m;
  for (int i = 0; i < 2 * p; ++i) {
    window[i] = breakpoint(level, cell);
    if (--remaining == 0 && i + 1 < 2 * p) {
      ++cell;
      remaining = multiplicity(level, cell);
    }
  }
  ders_basis_funs(std::span<const double>(window, static_cast<std::size_t>(2 * p)), p, x, nd, out);
}

std::vector<std::pair<Index, double>> KnotHierarchy::two_scale(int level, Index j) const {
  double tau[kMaxDegree + 2];
  local_knots(level, j, std::span<double>(tau, static_cast<std::size_t>(degree_ + 2)));
  const auto coef = two_scale_local(std::span<const double>(tau, static_cast<std::size_t>(degree_ + 2)), degree_);
  const Index c = cell_of_knot(level, j);
  const Index offset = first_knot(level + 1, 2 * c) + (j - first_knot(level, c));
  std::vector<std::pair<Index, double>> out;
  for (std::size_t i = 0; i < coef.size(); ++i) {
    if (coef[i] != 0.0) out.emplace_back(offset + static_cast<Index>(i), coef[i]);
  }
  return out;
}

KnotVector KnotHierarchy::explicit_knots(int level) const {
  std::vector<double> knots;
  const Index nc = num_cells(level);
  for (Index c = 0; c <= nc; ++c) knots.insert(knots.end(), static_cast<std::size_t>(multiplicity(level, c)), breakpoint(level, c));
  return KnotVector(degree_, std::move(knots));
}

}  // namespace higa
