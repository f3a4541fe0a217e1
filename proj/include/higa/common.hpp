#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace higa {

/// Spatial dimension of the parameter and physical domains.
inline constexpr int kDim = 2;

/// Largest spline degree supported by the stack-allocated evaluation paths.
inline constexpr int kMaxDegree = 10;

/// Finest admissible refinement level. Level-40 cells still span thousands
/// of ulps of the unit interval.
inline constexpr int kMaxLevel = 40;

/// Cell, knot and basis indices at a given level.
using Index = std::int64_t;
using Cell = std::array<Index, kDim>;
using Point = std::array<double, kDim>;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Violated precondition of a public operation.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// Inconsistent run / problem configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

class AssemblyError : public Error {
 public:
  using Error::Error;
};

class SolverError : public Error {
 public:
  using Error::Error;
};

struct CellHash {
  std::size_t operator()(const Cell& c) const noexcept {
    std::uint64_t h = static_cast<std::uint64_t>(c[0]) * 0x9e3779b97f4a7c15ULL;
    h ^= static_cast<std::uint64_t>(c[1]) + 0x7f4a7c159e3779b9ULL + (h << 6) + (h >> 2);
    return static_cast<std::size_t>(h ^ (h >> 31));
  }
};

}  // namespace higa
