#include "higa/sparse.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

#include "higa/common.hpp"
#include "higa/kernels.hpp"

namespace higa {

namespace {

void append_double(std::string& out, double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, res.ptr);
}

}  // namespace

std::int64_t CsrMatrix::find(int i, int j) const {
  const auto begin = col.begin() + row_ptr[static_cast<std::size_t>(i)];
  const auto end = col.begin() + row_ptr[static_cast<std::size_t>(i) + 1];
  auto it = std::lower_bound(begin, end, j);
  if (it == end || *it != j) return -1;
  return it - col.begin();
}

double CsrMatrix::at(int i, int j) const {
  const std::int64_t k = find(i, j);
  return k < 0 ? 0.0 : val[static_cast<std::size_t>(k)];
}

void CsrMatrix::multiply(std::span<const double> x, std::span<double> y) const {
  if (static_cast<int>(x.size()) != cols || static_cast<int>(y.size()) != rows) {
    throw InvalidInput("matrix-vector size mismatch");
  }
  kernels::active().csr_matvec(rows, row_ptr.data(), col.data(), val.data(), x.data(), y.data());
}

CsrMatrix pattern_from_blocks(int n, const std::vector<std::vector<int>>& blocks) {
  // Row-wise union over the blocks touching each row, using a stamp array.
  std::vector<std::vector<int>> touching(static_cast<std::size_t>(n));
  for (std::size_t e = 0; e < blocks.size(); ++e)
    for (int i : blocks[e]) touching[static_cast<std::size_t>(i)].push_back(static_cast<int>(e));

  CsrMatrix a;
  a.rows = n;
  a.cols = n;
  a.row_ptr.assign(static_cast<std::size_t>(n) + 1, 0);
  std::vector<int> stamp(static_cast<std::size_t>(n), -1);
  std::vector<int> row;
  for (int i = 0; i < n; ++i) {
    row.clear();
    for (int e : touching[static_cast<std::size_t>(i)]) {
      for (int j : blocks[static_cast<std::size_t>(e)]) {
        if (stamp[static_cast<std::size_t>(j)] != i) {
          stamp[static_cast<std::size_t>(j)] = i;
          row.push_back(j);
        }
      }
    }
    std::sort(row.begin(), row.end());
    a.col.insert(a.col.end(), row.begin(), row.end());
    a.row_ptr[static_cast<std::size_t>(i) + 1] = static_cast<std::int64_t>(a.col.size());
  }
  a.val.assign(a.col.size(), 0.0);
  return a;
}

std::string to_matrix_market(const CsrMatrix& a) {
  std::string out = "%%MatrixMarket matrix coordinate real general\n";
  out += std::to_string(a.rows) + " " + std::to_string(a.cols) + " " + std::to_string(a.nnz()) + "\n";
  for (int i = 0; i < a.rows; ++i) {
    for (std::int64_t k = a.row_ptr[static_cast<std::size_t>(i)]; k < a.row_ptr[static_cast<std::size_t>(i) + 1]; ++k) {
      out += std::to_string(i + 1) + " " + std::to_string(a.col[static_cast<std::size_t>(k)] + 1) + " ";
      append_double(out, a.val[static_cast<std::size_t>(k)]);
      out += "\n";
    }
  }
  return out;
}

std::string to_matrix_market(std::span<const double> v) {
  std::string out = "%%MatrixMarket matrix array real general\n";
  out += std::to_string(v.size()) + " 1\n";
  for (double x : v) {
    append_double(out, x);
    out += "\n";
  }
  return out;
}

}  // namespace higa
