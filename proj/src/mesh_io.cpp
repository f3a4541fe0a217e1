#include "higa/mesh_io.hpp"

#include <charconv>
#include <sstream>

namespace higa {

namespace {

void append_double(std::string& out, double v) {
  char buf[32];
  out.append(buf, std::to_chars(buf, buf + sizeof(buf), v).ptr);
}

[[noreturn]] void fail(int line, const std::string& what) {
  throw ConfigError("mesh text line " + std::to_string(line) + ": " + what);
}

template <class T>
T parse_number(const std::string& tok, int line) {
  T v{};
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) fail(line, "bad number '" + tok + "'");
  return v;
}

}  // namespace

std::string mesh_to_text(const HierarchicalMesh& mesh) {
  std::string out = "# hierarchical-mesh v1\ndim 2\n";
  for (int d = 0; d < kDim; ++d) {
    const KnotVector& kv = mesh.knots0().dirs[static_cast<std::size_t>(d)];
    out += "knots " + std::to_string(d) + " degree " + std::to_string(kv.degree()) + " values";
    for (double k : kv.knots()) {
      out += ' ';
      append_double(out, k);
    }
    out += '\n';
  }
  std::size_t total = 0;
  for (int k = 1; k < mesh.num_levels(); ++k) total += mesh.domain_size(k);
  out += "cells " + std::to_string(total) + '\n';
  for (int k = 1; k < mesh.num_levels(); ++k) {
    for (const Cell& c : mesh.domain_cells(k)) {
      out += std::to_string(k) + ' ' + std::to_string(c[0]) + ' ' + std::to_string(c[1]) + '\n';
    }
  }
  return out;
}

HierarchicalMesh mesh_from_text(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  auto next = [&](std::vector<std::string>& toks) {
    while (std::getline(in, line)) {
      ++lineno;
      std::istringstream ls(line);
      toks.clear();
      for (std::string t; ls >> t;) toks.push_back(t);
      if (!toks.empty()) return true;
    }
    return false;
  };

  std::vector<std::string> toks;
  if (!next(toks) || toks != std::vector<std::string>{"#", "hierarchical-mesh", "v1"}) fail(lineno, "expected header '# hierarchical-mesh v1'");
  if (!next(toks) || toks.size() != 2 || toks[0] != "dim") fail(lineno, "expected 'dim 2'");
  if (parse_number<int>(toks[1], lineno) != kDim) fail(lineno, "only dim 2 is supported");

  TensorKnotVector knots0;
  for (int d = 0; d < kDim; ++d) {
    if (!next(toks) || toks.size() < 5 || toks[0] != "knots" || toks[2] != "degree" || toks[4] != "values") {
      fail(lineno, "expected 'knots <dir> degree <p> values ...'");
    }
    if (parse_number<int>(toks[1], lineno) != d) fail(lineno, "knot directions must appear in order");
    const int p = parse_number<int>(toks[3], lineno);
    std::vector<double> values;
    for (std::size_t i = 5; i < toks.size(); ++i) values.push_back(parse_number<double>(toks[i], lineno));
    try {
      knots0.dirs[static_cast<std::size_t>(d)] = KnotVector(p, std::move(values));
    } catch (const InvalidInput& e) {
      fail(lineno, e.what());
    }
  }

  if (!next(toks) || toks.size() != 2 || toks[0] != "cells") fail(lineno, "expected 'cells <N>'");
  const long n = parse_number<long>(toks[1], lineno);
  if (n < 0) fail(lineno, "negative cell count");
  std::vector<std::vector<Cell>> domains(1);
  for (long i = 0; i < n; ++i) {
    if (!next(toks) || toks.size() != 3) fail(lineno, "expected '<level> <i0> <i1>'");
    const int level = parse_number<int>(toks[0], lineno);
    if (level < 1 || level > kMaxLevel) fail(lineno, "level out of range");
    if (static_cast<int>(domains.size()) <= level) domains.resize(static_cast<std::size_t>(level) + 1);
    domains[static_cast<std::size_t>(level)].push_back({parse_number<Index>(toks[1], lineno), parse_number<Index>(toks[2], lineno)});
  }
  if (next(toks)) fail(lineno, "unexpected trailing content");
  try {
    return HierarchicalMesh::from_domains(std::move(knots0), domains);
  } catch (const InvalidInput& e) {
    throw ConfigError(std::string("mesh text: ") + e.what());
  }
}

}  // namespace higa
