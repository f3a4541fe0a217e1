#pragma once

// Dense and sparse inner kernels used by assembly and the Krylov solver.
// Each kernel has a scalar reference and, on x86-64, an AVX2/FMA variant
// chosen once at startup.

#include <cstdint>
#include <string_view>

namespace higa::kernels {

/// K[i*n + j] += sum_r P[r*m + i] * Q[r*n + j];  P is rows x m, Q is rows x n.
using GemmTnAccFn = void (*)(int rows, int m, int n, const double* P, const double* Q, double* K);
using DotFn = double (*)(int n, const double* x, const double* y);
/// y += a * x
using AxpyFn = void (*)(int n, double a, const double* x, double* y);
/// y = A x for a CSR matrix with `rows` rows.
using CsrMatvecFn = void (*)(int rows, const std::int64_t* row_ptr, const int* col, const double* val,
                             const double* x, double* y);

struct KernelTable {
  std::string_view name;
  GemmTnAccFn gemm_tn_acc;
  DotFn dot;
  AxpyFn axpy;
  CsrMatvecFn csr_matvec;
};

const KernelTable& scalar_table();

/// nullptr when the build has no AVX2 variant or the CPU lacks AVX2/FMA.
const KernelTable* avx2_table();

/// The table used by the library: AVX2 when available unless the environment
/// variable HIGA_FORCE_SCALAR is set to a non-empty value other than "0".
const KernelTable& active();

}  // namespace higa::kernels
