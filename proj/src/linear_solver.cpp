#include "higa/linear_solver.hpp"

#include <cmath>
#include <optional>
#include <sstream>

#include <Eigen/OrderingMethods>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include "higa/common.hpp"
#include "higa/kernels.hpp"

namespace higa {

namespace {

using SpMat = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;
using Vec = Eigen::VectorXd;

double norm2(std::span<const double> v) {
  return std::sqrt(kernels::active().dot(static_cast<int>(v.size()), v.data(), v.data()));
}

SpMat to_eigen(const CsrMatrix& a) {
  std::vector<Eigen::Triplet<double, int>> trip;
  trip.reserve(static_cast<std::size_t>(a.nnz()));
  for (int i = 0; i < a.rows; ++i)
    for (std::int64_t k = a.row_ptr[static_cast<std::size_t>(i)]; k < a.row_ptr[static_cast<std::size_t>(i) + 1]; ++k)
      trip.emplace_back(i, a.col[static_cast<std::size_t>(k)], a.val[static_cast<std::size_t>(k)]);
  SpMat m(a.rows, a.cols);
  m.setFromTriplets(trip.begin(), trip.end());
  return m;
}

// Incomplete LU without fill on the pattern of A.
class Ilu0 {
 public:
  explicit Ilu0(const CsrMatrix& a) : lu_(a), diag_(static_cast<std::size_t>(a.rows), -1) {
    const int n = a.rows;
    std::vector<std::int64_t> pos(static_cast<std::size_t>(n), -1);
    for (int i = 0; i < n; ++i) {
      const auto rb = lu_.row_ptr[static_cast<std::size_t>(i)];
      const auto re = lu_.row_ptr[static_cast<std::size_t>(i) + 1];
      for (auto k = rb; k < re; ++k) pos[static_cast<std::size_t>(lu_.col[static_cast<std::size_t>(k)])] = k;
      for (auto k = rb; k < re; ++k) {
        const int c = lu_.col[static_cast<std::size_t>(k)];
        if (c >= i) break;
        const double piv = lu_.val[static_cast<std::size_t>(diag_[static_cast<std::size_t>(c)])];
        const double lik = lu_.val[static_cast<std::size_t>(k)] / piv;
        lu_.val[static_cast<std::size_t>(k)] = lik;
        for (auto m = diag_[static_cast<std::size_t>(c)] + 1; m < lu_.row_ptr[static_cast<std::size_t>(c) + 1]; ++m) {
          const auto p = pos[static_cast<std::size_t>(lu_.col[static_cast<std::size_t>(m)])];
          if (p >= 0) lu_.val[static_cast<std::size_t>(p)] -= lik * lu_.val[static_cast<std::size_t>(m)];
        }
      }
      for (auto k = rb; k < re; ++k) {
        if (lu_.col[static_cast<std::size_t>(k)] == i) diag_[static_cast<std::size_t>(i)] = k;
        pos[static_cast<std::size_t>(lu_.col[static_cast<std::size_t>(k)])] = -1;
      }
      if (diag_[static_cast<std::size_t>(i)] < 0 || lu_.val[static_cast<std::size_t>(diag_[static_cast<std::size_t>(i)])] == 0.0) {
        ok_ = false;
        return;
      }
    }
  }

  bool ok() const { return ok_; }

  void apply(std::span<const double> r, std::span<double> z) const {
    const int n = lu_.rows;
    for (int i = 0; i < n; ++i) {
      double s = r[static_cast<std::size_t>(i)];
      for (auto k = lu_.row_ptr[static_cast<std::size_t>(i)]; k < diag_[static_cast<std::size_t>(i)]; ++k)
        s -= lu_.val[static_cast<std::size_t>(k)] * z[static_cast<std::size_t>(lu_.col[static_cast<std::size_t>(k)])];
      z[static_cast<std::size_t>(i)] = s;
    }
    for (int i = n - 1; i >= 0; --i) {
      double s = z[static_cast<std::size_t>(i)];
      for (auto k = diag_[static_cast<std::size_t>(i)] + 1; k < lu_.row_ptr[static_cast<std::size_t>(i) + 1]; ++k)
        s -= lu_.val[static_cast<std::size_t>(k)] * z[static_cast<std::size_t>(lu_.col[static_cast<std::size_t>(k)])];
      z[static_cast<std::size_t>(i)] = s / lu_.val[static_cast<std::size_t>(diag_[static_cast<std::size_t>(i)])];
    }
  }

 private:
  CsrMatrix lu_;
  std::vector<std::int64_t> diag_;
  bool ok_ = true;
};

}  // namespace

double relative_residual(const CsrMatrix& a, std::span<const double> x, std::span<const double> b) {
  std::vector<double> r(b.size());
  a.multiply(x, r);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = b[i] - r[i];
  const double nb = norm2(b);
  return nb > 0.0 ? norm2(r) / nb : norm2(r);
}

SolveReport gmres(const CsrMatrix& a, std::span<const double> b, std::span<double> x, const GmresOptions& opts) {
  const auto& K = kernels::active();
  const int n = a.rows;
  const int m = std::max(1, opts.restart);
  SolveReport rep;
  rep.method = "gmres";
  const double nb = norm2(b);
  if (nb == 0.0) {
    std::fill(x.begin(), x.end(), 0.0);
    return rep;
  }

  std::optional<Ilu0> ilu;
  std::vector<double> inv_diag;
  Preconditioner pc = opts.preconditioner;
  if (pc == Preconditioner::ilu0) {
    ilu.emplace(a);
    if (!ilu->ok()) pc = Preconditioner::jacobi;
  }
  if (pc == Preconditioner::jacobi) {
    inv_diag.assign(static_cast<std::size_t>(n), 1.0);
    for (int i = 0; i < n; ++i) {
      const double d = a.at(i, i);
      if (d != 0.0) inv_diag[static_cast<std::size_t>(i)] = 1.0 / d;
    }
  }
  auto precond = [&](std::span<const double> r, std::span<double> z) {
    if (pc == Preconditioner::ilu0) {
      ilu->apply(r, z);
    } else if (pc == Preconditioner::jacobi) {
      for (int i = 0; i < n; ++i) z[static_cast<std::size_t>(i)] = inv_diag[static_cast<std::size_t>(i)] * r[static_cast<std::size_t>(i)];
    } else {
      std::copy(r.begin(), r.end(), z.begin());
    }
  };

  std::vector<double> V(static_cast<std::size_t>(n) * static_cast<std::size_t>(m + 1));
  std::vector<double> H(static_cast<std::size_t>((m + 1) * m), 0.0);
  std::vector<double> cs(static_cast<std::size_t>(m)), sn(static_cast<std::size_t>(m)), g(static_cast<std::size_t>(m + 1));
  std::vector<double> r(static_cast<std::size_t>(n)), z(static_cast<std::size_t>(n)), w(static_cast<std::size_t>(n));
  auto col = [&](int j) { return std::span<double>(V.data() + static_cast<std::size_t>(j) * static_cast<std::size_t>(n), static_cast<std::size_t>(n)); };
  auto h = [&](int i, int j) -> double& { return H[static_cast<std::size_t>(i * m + j)]; };

  double res = 0.0;
  while (rep.iterations < opts.max_iterations) {
    a.multiply(x, r);
    for (int i = 0; i < n; ++i) r[static_cast<std::size_t>(i)] = b[static_cast<std::size_t>(i)] - r[static_cast<std::size_t>(i)];
    const double beta = norm2(r);
    res = beta / nb;
    if (res <= opts.tolerance) break;
    auto v0 = col(0);
    for (int i = 0; i < n; ++i) v0[static_cast<std::size_t>(i)] = r[static_cast<std::size_t>(i)] / beta;
    std::fill(g.begin(), g.end(), 0.0);
    g[0] = beta;
    int k = 0;
    for (; k < m && rep.iterations < opts.max_iterations; ++k, ++rep.iterations) {
      precond(col(k), z);
      a.multiply(z, w);
      for (int i = 0; i <= k; ++i) {
        h(i, k) = K.dot(n, w.data(), col(i).data());
        K.axpy(n, -h(i, k), col(i).data(), w.data());
      }
      const double hn = norm2(w);
      h(k + 1, k) = hn;
      if (hn > 0.0) {
        auto vk = col(k + 1);
        for (int i = 0; i < n; ++i) vk[static_cast<std::size_t>(i)] = w[static_cast<std::size_t>(i)] / hn;
      }
      for (int i = 0; i < k; ++i) {
        const double t = cs[static_cast<std::size_t>(i)] * h(i, k) + sn[static_cast<std::size_t>(i)] * h(i + 1, k);
        h(i + 1, k) = -sn[static_cast<std::size_t>(i)] * h(i, k) + cs[static_cast<std::size_t>(i)] * h(i + 1, k);
        h(i, k) = t;
      }
      const double den = std::hypot(h(k, k), h(k + 1, k));
      cs[static_cast<std::size_t>(k)] = den > 0.0 ? h(k, k) / den : 1.0;
      sn[static_cast<std::size_t>(k)] = den > 0.0 ? h(k + 1, k) / den : 0.0;
      h(k, k) = den;
      h(k + 1, k) = 0.0;
      g[static_cast<std::size_t>(k + 1)] = -sn[static_cast<std::size_t>(k)] * g[static_cast<std::size_t>(k)];
      g[static_cast<std::size_t>(k)] *= cs[static_cast<std::size_t>(k)];
      if (std::abs(g[static_cast<std::size_t>(k + 1)]) / nb <= 0.1 * opts.tolerance || hn == 0.0) {
        ++k;
        ++rep.iterations;
        break;
      }
    }
    // Back substitution and update x += M^{-1} V y.
    std::vector<double> y(static_cast<std::size_t>(k));
    for (int i = k - 1; i >= 0; --i) {
      double s = g[static_cast<std::size_t>(i)];
      for (int j = i + 1; j < k; ++j) s -= h(i, j) * y[static_cast<std::size_t>(j)];
      y[static_cast<std::size_t>(i)] = h(i, i) != 0.0 ? s / h(i, i) : 0.0;
    }
    std::fill(w.begin(), w.end(), 0.0);
    for (int j = 0; j < k; ++j) K.axpy(n, y[static_cast<std::size_t>(j)], col(j).data(), w.data());
    precond(w, z);
    K.axpy(n, 1.0, z.data(), x.data());
  }
  rep.relative_residual = relative_residual(a, x, b);
  return rep;
}

std::vector<double> solve_linear(const CsrMatrix& a, std::span<const double> b, bool symmetric,
                                 const LinearSolveOptions& opts, SolveReport* report) {
  if (a.rows != a.cols || static_cast<int>(b.size()) != a.rows) throw InvalidInput("linear system size mismatch");
  const int n = a.rows;
  std::vector<double> x(static_cast<std::size_t>(n), 0.0);
  SolveReport rep;
  if (n == 0 || norm2(b) == 0.0) {
    rep.method = "trivial";
    if (report) *report = rep;
    return x;
  }

  if (n <= opts.direct_limit) {
    const SpMat m = to_eigen(a);
    Eigen::Map<const Vec> rhs(b.data(), n);
    auto refine = [&](auto& solver, const char* name) -> bool {
      if (solver.info() != Eigen::Success) return false;
      Vec sol = solver.solve(rhs);
      if (solver.info() != Eigen::Success || !sol.allFinite()) return false;
      for (int step = 0; step < 3; ++step) {
        const Vec r = rhs - m * sol;
        if (r.norm() <= 0.01 * opts.tolerance * rhs.norm()) break;
        sol += solver.solve(r);
      }
      std::copy(sol.data(), sol.data() + n, x.begin());
      rep.method = name;
      rep.relative_residual = relative_residual(a, x, b);
      return rep.relative_residual <= opts.tolerance;
    };
    if (symmetric) {
      Eigen::SimplicialLDLT<SpMat, Eigen::Lower, Eigen::AMDOrdering<int>> ldlt(m);
      if (refine(ldlt, "ldlt")) {
        if (report) *report = rep;
        return x;
      }
    }
    Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>> lu;
    lu.analyzePattern(m);
    lu.factorize(m);
    if (refine(lu, "lu")) {
      if (report) *report = rep;
      return x;
    }
    for (double& v : x)
      if (!std::isfinite(v)) v = 0.0;
  }

  GmresOptions gopt = opts.gmres;
  gopt.tolerance = opts.tolerance;
  rep = gmres(a, b, x, gopt);
  if (rep.relative_residual > opts.tolerance) {
    GmresOptions jac = gopt;
    jac.preconditioner = Preconditioner::jacobi;
    rep = gmres(a, b, x, jac);
  }
  if (report) *report = rep;
  if (!(rep.relative_residual <= opts.tolerance)) {
    std::ostringstream msg;
    msg << "linear solve failed: n=" << n << ", method=" << rep.method << ", iterations=" << rep.iterations
        << ", relative residual=" << rep.relative_residual;
    throw SolverError(msg.str());
  }
  return x;
}

}  // namespace higa
