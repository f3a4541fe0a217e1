#include "kernels_internal.hpp"

namespace higa::kernels::scalar {

void gemm_tn_acc(int rows, int m, int n, const double* P, const double* Q, double* K) {
  for (int r = 0; r < rows; ++r) {
    const double* pr = P + static_cast<std::ptrdiff_t>(r) * m;
    const double* qr = Q + static_cast<std::ptrdiff_t>(r) * n;
    for (int i = 0; i < m; ++i) {
      const double a = pr[i];
      if (a == 0.0) continue;
      double* ki = K + static_cast<std::ptrdiff_t>(i) * n;
      for (int j = 0; j < n; ++j) ki[j] += a * qr[j];
    }
  }
}

double dot(int n, const double* x, const double* y) {
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += x[i] * y[i];
  return s;
}

void axpy(int n, double a, const double* x, double* y) {
  for (int i = 0; i < n; ++i) y[i] += a * x[i];
}

void csr_matvec(int rows, const std::int64_t* row_ptr, const int* col, const double* val, const double* x,
                double* y) {
  for (int i = 0; i < rows; ++i) {
    double s = 0.0;
    for (std::int64_t k = row_ptr[i]; k < row_ptr[i + 1]; ++k) s += val[k] * x[col[k]];
    y[i] = s;
  }
}

}  // namespace higa::kernels::scalar
