#include <immintrin.h>

#include "kernels_internal.hpp"

namespace higa::kernels::avx2 {

namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

}  // namespace

void gemm_tn_acc(int rows, int m, int n, const double* P, const double* Q, double* K) {
  const int n8 = n & ~7;
  const int n4 = n & ~3;
  for (int i = 0; i < m; ++i) {
    double* ki = K + static_cast<std::ptrdiff_t>(i) * n;
    int j = 0;
    for (; j < n8; j += 8) {
      __m256d acc0 = _mm256_loadu_pd(ki + j);
      __m256d acc1 = _mm256_loadu_pd(ki + j + 4);
      for (int r = 0; r < rows; ++r) {
        const __m256d a = _mm256_set1_pd(P[static_cast<std::ptrdiff_t>(r) * m + i]);
        const double* qr = Q + static_cast<std::ptrdiff_t>(r) * n + j;
        acc0 = _mm256_fmadd_pd(a, _mm256_loadu_pd(qr), acc0);
        acc1 = _mm256_fmadd_pd(a, _mm256_loadu_pd(qr + 4), acc1);
      }
      _mm256_storeu_pd(ki + j, acc0);
      _mm256_storeu_pd(ki + j + 4, acc1);
    }
    for (; j < n4; j += 4) {
      __m256d acc = _mm256_loadu_pd(ki + j);
      for (int r = 0; r < rows; ++r) {
        const __m256d a = _mm256_set1_pd(P[static_cast<std::ptrdiff_t>(r) * m + i]);
        acc = _mm256_fmadd_pd(a, _mm256_loadu_pd(Q + static_cast<std::ptrdiff_t>(r) * n + j), acc);
      }
      _mm256_storeu_pd(ki + j, acc);
    }
    for (; j < n; ++j) {
      double s = ki[j];
      for (int r = 0; r < rows; ++r) {
        s += P[static_cast<std::ptrdiff_t>(r) * m + i] * Q[static_cast<std::ptrdiff_t>(r) * n + j];
      }
      ki[j] = s;
    }
  }
}

double dot(int n, const double* x, const double* y) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  int i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4) acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += x[i] * y[i];
  return s;
}

void axpy(int n, double a, const double* x, double* y) {
  const __m256d va = _mm256_set1_pd(a);
  int i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

void csr_matvec(int rows, const std::int64_t* row_ptr, const int* col, const double* val, const double* x,
                double* y) {
  for (int i = 0; i < rows; ++i) {
    std::int64_t k = row_ptr[i];
    const std::int64_t end = row_ptr[i + 1];
    __m256d acc = _mm256_setzero_pd();
    for (; k + 4 <= end; k += 4) {
      const __m128i idx = _mm_loadu_si128(reinterpret_cast<const __m128i*>(col + k));
      const __m256d xv = _mm256_i32gather_pd(x, idx, 8);
      acc = _mm256_fmadd_pd(_mm256_loadu_pd(val + k), xv, acc);
    }
    double s = hsum(acc);
    for (; k < end; ++k) s += val[k] * x[col[k]];
    y[i] = s;
  }
}

}  // namespace higa::kernels::avx2
