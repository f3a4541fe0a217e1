#pragma once

#include <string>

#include "higa/hiermesh.hpp"

namespace higa {

/// Line-oriented text form of a mesh:
///
///   # hierarchical-mesh v1
///   dim 2
///   knots <dir> degree <p> values <k_0> ... <k_m>
///   cells <N>
///   <level> <i0> <i1>        (one line per domain cell, level >= 1)
///
/// Knots use the shortest round-trip decimal form, so reading the text back
/// gives an identical mesh.
std::string mesh_to_text(const HierarchicalMesh& mesh);

/// Throws ConfigError with the offending line number on malformed input.
HierarchicalMesh mesh_from_text(const std::string& text);

}  // namespace higa
