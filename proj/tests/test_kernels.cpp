#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "higa/kernels.hpp"

using namespace higa;

namespace {

std::vector<double> random_vec(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> v(static_cast<std::size_t>(n));
  for (double& x : v) x = u(rng);
  return v;
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

TEST_CASE("scalar kernels against naive loops") {
  const auto& k = kernels::scalar_table();
  std::mt19937_64 rng(1);
  const int rows = 7, m = 5, n = 6;
  const auto P = random_vec(rng, rows * m);
  const auto Q = random_vec(rng, rows * n);
  std::vector<double> K(m * n, 1.0), want(m * n, 1.0);
  k.gemm_tn_acc(rows, m, n, P.data(), Q.data(), K.data());
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j)
      for (int r = 0; r < rows; ++r) want[static_cast<std::size_t>(i * n + j)] += P[static_cast<std::size_t>(r * m + i)] * Q[static_cast<std::size_t>(r * n + j)];
  CHECK(max_abs_diff(K, want) < 1e-14);

  const auto x = random_vec(rng, 13);
  auto y = random_vec(rng, 13);
  double d = 0.0;
  for (int i = 0; i < 13; ++i) d += x[static_cast<std::size_t>(i)] * y[static_cast<std::size_t>(i)];
  CHECK(k.dot(13, x.data(), y.data()) == doctest::Approx(d).epsilon(1e-15));
  auto y2 = y;
  k.axpy(13, 0.5, x.data(), y2.data());
  for (int i = 0; i < 13; ++i) CHECK(y2[static_cast<std::size_t>(i)] == y[static_cast<std::size_t>(i)] + 0.5 * x[static_cast<std::size_t>(i)]);
}

TEST_CASE("AVX2 kernels agree with the scalar reference") {
  const kernels::KernelTable* fast = kernels::avx2_table();
  if (fast == nullptr) {
    MESSAGE("no AVX2 variant on this machine; equivalence not exercised");
    return;
  }
  const auto& ref = kernels::scalar_table();
  std::mt19937_64 rng(2);

  for (int rows : {1, 3, 9, 16})
    for (int m : {1, 4, 9, 25})
      for (int n : {1, 3, 4, 7, 9, 16, 25, 26}) {
        const auto P = random_vec(rng, rows * m);
        const auto Q = random_vec(rng, rows * n);
        std::vector<double> a(static_cast<std::size_t>(m * n), 0.25), b = a;
        ref.gemm_tn_acc(rows, m, n, P.data(), Q.data(), a.data());
        fast->gemm_tn_acc(rows, m, n, P.data(), Q.data(), b.data());
        CHECK(max_abs_diff(a, b) <= 1e-14 * rows);
      }

  for (int n : {0, 1, 3, 4, 5, 8, 15, 16, 17, 100, 1001}) {
    const auto x = random_vec(rng, n);
    const auto y = random_vec(rng, n);
    CHECK(std::abs(ref.dot(n, x.data(), y.data()) - fast->dot(n, x.data(), y.data())) <= 1e-14 * (n + 1));
    auto ya = y, yb = y;
    ref.axpy(n, -1.7, x.data(), ya.data());
    fast->axpy(n, -1.7, x.data(), yb.data());
    CHECK(max_abs_diff(ya, yb) <= 1e-15);
  }

  // Random CSR matrix with varying row lengths.
  const int rows = 257, cols = 300;
  std::vector<std::int64_t> row_ptr{0};
  std::vector<int> col;
  std::vector<double> val;
  std::uniform_int_distribution<int> len(0, 30), pick(0, cols - 1);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int r = 0; r < rows; ++r) {
    const int l = len(rng);
    for (int i = 0; i < l; ++i) {
      col.push_back(pick(rng));
      val.push_back(u(rng));
    }
    row_ptr.push_back(static_cast<std::int64_t>(col.size()));
  }
  const auto x = random_vec(rng, cols);
  std::vector<double> ya(rows), yb(rows);
  ref.csr_matvec(rows, row_ptr.data(), col.data(), val.data(), x.data(), ya.data());
  fast->csr_matvec(rows, row_ptr.data(), col.data(), val.data(), x.data(), yb.data());
  CHECK(max_abs_diff(ya, yb) <= 1e-13);
}

TEST_CASE("active table honours the scalar override") {
  const auto& a = kernels::active();
  const char* env = std::getenv("HIGA_FORCE_SCALAR");
  if (env != nullptr && *env != '\0' && std::string_view(env) != "0") CHECK(a.name == "scalar");
  else if (kernels::avx2_table() != nullptr) CHECK(a.name == "avx2");
  else CHECK(a.name == "scalar");
}
