#pragma once

#include <cstddef>
#include <cstdint>

namespace higa::kernels {

namespace scalar {
void gemm_tn_acc(int rows, int m, int n, const double* P, const double* Q, double* K);
double dot(int n, const double* x, const double* y);
void axpy(int n, double a, const double* x, double* y);
void csr_matvec(int rows, const std::int64_t* row_ptr, const int* col, const double* val, const double* x,
                double* y);
}  // namespace scalar

namespace avx2 {
void gemm_tn_acc(int rows, int m, int n, const double* P, const double* Q, double* K);
double dot(int n, const double* x, const double* y);
void axpy(int n, double a, const double* x, double* y);
void csr_matvec(int rows, const std::int64_t* row_ptr, const int* col, const double* val, const double* x,
                double* y);
}  // namespace avx2

}  // namespace higa::kernels
