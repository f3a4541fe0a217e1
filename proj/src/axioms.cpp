#include "higa/axioms.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>
#include <sstream>

#include "higa/hierbasis.hpp"
#include "higa/hiermesh.hpp"

namespace higa {

namespace {

enum CheckId {
  kAdmissible,
  kBatchIterative,
  kOverlay,
  kSupportCount,
  kElementCount,
  kUnityPlain,
  kUnityTruncated,
  kBoundaryTrace,
  kTwoScale,
  kNumChecks
};

constexpr const char* kNames[kNumChecks] = {
    "admissibility preserved by refine",
    "batch refine equals element-by-element refine",
    "overlay estimate",
    "elements per basis support <= 2^d (p+1)^d",
    "basis functions per element <= 2 (p+1)^d",
    "partition of unity, plain tensor basis",
    "partition of unity, truncated basis",
    "boundary basis trace",
    "two-scale identity",
};

class Suite {
 public:
  explicit Suite(AxiomReport& r) : report_(r) {
    report_.checks.resize(kNumChecks);
    for (int i = 0; i < kNumChecks; ++i) report_.checks[static_cast<std::size_t>(i)].name = kNames[i];
  }
  void record(CheckId id, bool ok, const std::string& what) {
    AxiomCheck& c = report_.checks[static_cast<std::size_t>(id)];
    ++c.cases;
    if (!ok) {
      if (c.failures == 0) c.first_failure = what;
      ++c.failures;
    }
  }

 private:
  AxiomReport& report_;
};

std::string describe(int scenario, const std::string& what) {
  return "scenario " + std::to_string(scenario) + ": " + what;
}

TensorKnotVector random_knots(int p, std::mt19937_64& rng) {
  TensorKnotVector kv;
  for (int d = 0; d < kDim; ++d) {
    const int interior = static_cast<int>(rng() % 3);
    std::vector<double> breaks;
    for (int i = 1; i <= interior; ++i) breaks.push_back(static_cast<double>(i) / (interior + 1));
    const int mult = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(p));
    kv.dirs[static_cast<std::size_t>(d)] = KnotVector::open(p, breaks, mult);
  }
  return kv;
}

std::vector<ActiveElement> random_marks(const HierarchicalMesh& mesh, std::mt19937_64& rng) {
  const auto act = mesh.active();
  std::vector<ActiveElement> out;
  if (rng() % 2 == 0) {
    // A few elements anywhere.
    const int n = 1 + static_cast<int>(rng() % 3);
    for (int i = 0; i < n; ++i) out.push_back(act[rng() % act.size()]);
  } else {
    // The finest elements near a random point, to build deep local grading.
    std::uniform_real_distribution<double> U(0.0, 1.0);
    out.push_back(mesh.locate({U(rng), U(rng)}));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

double eval_plain(const HierarchicalMesh& mesh, int level, const Cell& j, const Point& s) {
  double v = 1.0;
  double tau[kMaxDegree + 2];
  for (int d = 0; d < kDim; ++d) {
    const int p = mesh.degree(d);
    mesh.hierarchy(d).local_knots(level, j[static_cast<std::size_t>(d)], std::span<double>(tau, static_cast<std::size_t>(p + 2)));
    v *= eval_univariate(std::span<const double>(tau, static_cast<std::size_t>(p + 2)), s[d]);
  }
  return v;
}

void check_mesh(const HierarchicalMesh& mesh, int scenario, std::mt19937_64& rng, Suite& suite) {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const int p0 = mesh.degree(0);
  const int p1 = mesh.degree(1);
  const long np = static_cast<long>(p0 + 1) * (p1 + 1);

  const auto basis = hierarchical_basis(mesh);
  std::vector<ActiveElement> elems;
  for (const auto& b : basis) {
    elems.clear();
    elements_in_support(mesh, b.level, b.j, elems);
    suite.record(kSupportCount, static_cast<long>(elems.size()) <= 4 * np,
                 describe(scenario, std::to_string(elems.size()) + " elements in one support"));
  }
  const HierSpace space(mesh, basis);
  ElementBasis eb;
  for (const ActiveElement& t : mesh.active()) {
    eb.build(space, t, Representation::plain);
    const int plain = eb.size();
    eb.build(space, t, Representation::truncated);
    suite.record(kElementCount, plain <= 2 * np && eb.size() <= plain,
                 describe(scenario, std::to_string(plain) + " functions on one element"));
  }

  // Truncated functions with unit coefficients sum to one.
  const std::vector<double> ones(basis.size(), 1.0);
  double worst = 0.0;
  for (int i = 0; i < 40; ++i) {
    worst = std::max(worst, std::abs(eval_hier(space, ones, {U(rng), U(rng)}, {}, Representation::truncated) - 1.0));
  }
  suite.record(kUnityTruncated, worst < 1e-12, describe(scenario, "truncated sum deviates by " + std::to_string(worst)));

  // Boundary trace: kept functions vanish on the boundary, excluded ones do not.
  for (const auto& b : basis) {
    const auto sb = support_box(mesh, b.level, b.j);
    const double lo0 = mesh.hierarchy(0).breakpoint(b.level, sb[0].first);
    const double hi0 = mesh.hierarchy(0).breakpoint(b.level, sb[0].second + 1);
    const double lo1 = mesh.hierarchy(1).breakpoint(b.level, sb[1].first);
    const double hi1 = mesh.hierarchy(1).breakpoint(b.level, sb[1].second + 1);
    double peak = 0.0;
    for (int i = 0; i <= 24; ++i) {
      const double a0 = lo0 + (hi0 - lo0) * i / 24.0;
      const double a1 = lo1 + (hi1 - lo1) * i / 24.0;
      for (const Point& s : {Point{0.0, a1}, Point{1.0, a1}, Point{a0, 0.0}, Point{a0, 1.0}}) {
        peak = std::max(peak, std::abs(eval_plain(mesh, b.level, b.j, s)));
      }
    }
    const bool ok = b.vanishes_on_boundary ? peak < 1e-13 : peak > 0.1;
    suite.record(kBoundaryTrace, ok,
                 describe(scenario, "function (" + std::to_string(b.level) + ", " + std::to_string(b.j[0]) + ", " +
                                        std::to_string(b.j[1]) + ") has boundary peak " + std::to_string(peak)));
  }
}

void check_two_scale(const HierarchicalMesh& mesh, int scenario, std::mt19937_64& rng, Suite& suite) {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const int level = static_cast<int>(rng() % 3);
  const Cell j{static_cast<Index>(rng() % static_cast<std::uint64_t>(mesh.hierarchy(0).num_basis(level))),
               static_cast<Index>(rng() % static_cast<std::uint64_t>(mesh.hierarchy(1).num_basis(level)))};
  const auto u0 = mesh.hierarchy(0).two_scale(level, j[0]);
  const auto u1 = mesh.hierarchy(1).two_scale(level, j[1]);
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    const Point s{U(rng), U(rng)};
    double fine = 0.0;
    for (const auto& [a, ca] : u0)
      for (const auto& [b, cb] : u1) fine += ca * cb * eval_plain(mesh, level + 1, {a, b}, s);
    worst = std::max(worst, std::abs(fine - eval_plain(mesh, level, j, s)));
  }
  suite.record(kTwoScale, worst < 1e-13, describe(scenario, "two-scale mismatch " + std::to_string(worst)));

  // Per-level tensor partition of unity on a uniform mesh.
  const HierarchicalMesh coarse(mesh.knots0());
  const HierarchicalMesh uni = refine(coarse, coarse.active());
  const auto basis = hierarchical_basis(uni);
  const HierSpace space(uni, basis);
  const std::vector<double> ones(basis.size(), 1.0);
  double dev = 0.0;
  for (int i = 0; i < 20; ++i) dev = std::max(dev, std::abs(eval_hier(space, ones, {U(rng), U(rng)}) - 1.0));
  const bool single_level = std::all_of(basis.begin(), basis.end(), [](const HierBasisFunction& f) { return f.level == 1; });
  suite.record(kUnityPlain, dev < 1e-12 && single_level, describe(scenario, "plain sum deviates by " + std::to_string(dev)));
}

HierarchicalMesh refine_one_by_one(HierarchicalMesh mesh, std::vector<ActiveElement> marked, std::mt19937_64& rng) {
  std::shuffle(marked.begin(), marked.end(), rng);
  for (const auto& t : marked) {
    if (!mesh.is_active(t)) continue;  // already bisected by an earlier closure
    const ActiveElement one[1] = {t};
    mesh = refine(mesh, one);
  }
  return mesh;
}

}  // namespace

bool AxiomReport::ok() const {
  return std::all_of(checks.begin(), checks.end(), [](const AxiomCheck& c) { return c.failures == 0 && c.cases > 0; });
}

std::string AxiomReport::to_text() const {
  std::ostringstream out;
  for (const auto& c : checks) {
    out << (c.failures == 0 && c.cases > 0 ? "PASS " : "FAIL ") << c.name << " (" << c.cases << " cases";
    if (c.failures > 0) out << ", " << c.failures << " failures; first: " << c.first_failure;
    out << ")\n";
  }
  out << "scenarios " << scenarios << ", largest first-order patch " << max_patch << " elements, " << seconds << " s\n";
  return out.str();
}

AxiomReport verify_axioms(const AxiomOptions& opts) {
  if (opts.scenarios < 1) throw InvalidInput("at least one scenario is needed");
  if (opts.degrees.empty()) throw InvalidInput("no degrees given");
  for (int p : opts.degrees)
    if (p < 1 || p > kMaxDegree) throw InvalidInput("degree out of range");
  const auto t0 = std::chrono::steady_clock::now();
  AxiomReport report;
  report.scenarios = opts.scenarios;
  Suite suite(report);

  for (int sc = 0; sc < opts.scenarios; ++sc) {
    std::mt19937_64 rng(opts.seed * 0x9e3779b97f4a7c15ULL + static_cast<std::uint64_t>(sc));
    const int p = opts.degrees[static_cast<std::size_t>(sc) % opts.degrees.size()];
    const HierarchicalMesh initial(random_knots(p, rng));

    auto grow = [&](HierarchicalMesh mesh, bool check_batch) {
      int steps = 0;
      while (static_cast<int>(mesh.num_elements()) < opts.max_elements && steps < 12) {
        const auto marked = random_marks(mesh, rng);
        HierarchicalMesh next = refine(mesh, marked);
        suite.record(kAdmissible, is_admissible(next), describe(sc, "refine produced a non-admissible mesh"));
        if (check_batch && steps < 4) {
          std::vector<ActiveElement> more(marked);
          const auto act = mesh.active();
          for (int i = 0; i < 2; ++i) more.push_back(act[rng() % act.size()]);
          std::sort(more.begin(), more.end());
          more.erase(std::unique(more.begin(), more.end()), more.end());
          const HierarchicalMesh batch = refine(mesh, more);
          suite.record(kBatchIterative, batch == refine_one_by_one(mesh, more, rng),
                       describe(sc, "batch and element-by-element refinement differ"));
        }
        mesh = std::move(next);
        ++steps;
      }
      return mesh;
    };

    const HierarchicalMesh a = grow(initial, true);
    const HierarchicalMesh b = grow(initial, false);
    const HierarchicalMesh o = overlay(a, b);
    const long bound = static_cast<long>(a.num_elements() + b.num_elements()) - static_cast<long>(initial.num_elements());
    suite.record(kOverlay, is_admissible(o) && static_cast<long>(o.num_elements()) <= bound,
                 describe(sc, "overlay has " + std::to_string(o.num_elements()) + " elements, bound " + std::to_string(bound)));

    check_mesh(a, sc, rng, suite);
    check_two_scale(a, sc, rng, suite);
    for (const ActiveElement& t : a.active()) {
      const ActiveElement one[1] = {t};
      report.max_patch = std::max(report.max_patch, static_cast<long>(patch(a, one, 1).size()));
    }
  }
  report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return report;
}

}  // namespace higa
