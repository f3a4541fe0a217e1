#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace higa {

/// Compressed sparse rows with sorted column indices.
struct CsrMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<std::int64_t> row_ptr{0};
  std::vector<int> col;
  std::vector<double> val;

  std::int64_t nnz() const { return row_ptr.back(); }
  /// Position of (i, j) in col/val, or -1 when not stored.
  std::int64_t find(int i, int j) const;
  double at(int i, int j) const;
  /// y = A x using the active kernel table.
  void multiply(std::span<const double> x, std::span<double> y) const;
};

/// Sparsity pattern of the union of dense blocks dofs(e) x dofs(e).
CsrMatrix pattern_from_blocks(int n, const std::vector<std::vector<int>>& blocks);

std::string to_matrix_market(const CsrMatrix& a);
/// Dense vector as a Matrix Market array.
std::string to_matrix_market(std::span<const double> v);

}  // namespace higa
