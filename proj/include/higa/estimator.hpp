#pragma once

#include <span>
#include <string>
#include <vector>

#include "higa/assembly.hpp"
#include "higa/hierbasis.hpp"

namespace higa {

struct ElementIndicators {
  std::vector<ActiveElement> elements;  // mesh order
  std::vector<double> volume_sq;
  std::vector<double> jump_sq;
  std::vector<double> eta_sq;  // volume_sq + jump_sq
  double total_sq = 0.0;

  double total() const;
};

/// One interior interface segment. The segment lies on the parameter line
/// s[normal_dir] = coord and spans [lo, hi] in the other direction. It is a
/// full side of the finer of the two elements; `left` lies on the side of
/// smaller s[normal_dir]. Element positions refer to mesh.active().
struct Facet {
  int normal_dir = 0;
  double coord = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  int left = -1;
  int right = -1;
};

std::vector<Facet> facets(const HierarchicalMesh& mesh);

struct EstimatorOptions {
  /// Gauss points per direction (volume) and per facet are degree + 1 + extra.
  int extra_points = 1;
};

/// Residual indicators: |T| ||R||^2_T + |T|^{1/2} ||[A grad U . n]||^2_{dT},
/// with R = f + div(A grad U) - b . grad U - c U and |T| the physical area.
ElementIndicators estimate(const HierSpace& space, const GeometryMap& g, const PDEProblem& problem,
                           std::span<const double> coeffs, const EstimatorOptions& opts = {});

/// Integral of the squared normal-flux jump over one facet, with the flux of
/// each side computed from that side's element. Returns {from left, from
/// right}: the jump integrand evaluated via left-side and right-side geometry.
std::pair<double, double> facet_jump_sides(const HierSpace& space, const GeometryMap& g, const PDEProblem& problem,
                                           std::span<const double> coeffs, const Facet& facet,
                                           const EstimatorOptions& opts = {});

/// Lines "level i j volume_sq jump_sq".
std::string indicators_to_text(const ElementIndicators& ind);

}  // namespace higa
