#include "higa/driver.hpp"

#include <cmath>
#include <cstdio>

namespace higa {

void validate(const RunConfig& c) {
  if (c.problem != "square" && c.problem != "lshape" && c.problem != "quarter-ring" && c.problem != "quarter_ring") {
    throw ConfigError("problem: unknown benchmark '" + c.problem + "' (expected square, lshape or quarter-ring)");
  }
  if (c.degree < 1 || c.degree > kMaxDegree) throw ConfigError("degree: must lie in [1, " + std::to_string(kMaxDegree) + "]");
  if (c.theta && !(*c.theta > 0.0 && *c.theta <= 1.0)) throw ConfigError("theta: must lie in (0, 1]");
  if (c.stop.max_dofs < 1) throw ConfigError("max-dofs: must be positive");
  if (c.stop.max_steps < 1) throw ConfigError("max-steps: must be positive");
  if (c.stop.max_elements < 0) throw ConfigError("max-elements: must be nonnegative");
  if (!(c.stop.eta_tol >= 0.0)) throw ConfigError("eta-tol: must be nonnegative");
  if (c.stop.max_level < 0 || c.stop.max_level > kMaxLevel) {
    throw ConfigError("max-level: must lie in [0, " + std::to_string(kMaxLevel) + "]");
  }
  if (c.assembly_extra_points < 0 || c.assembly_extra_points > 8) throw ConfigError("assembly-extra-points: must lie in [0, 8]");
  if (c.solver.direct_limit < 0) throw ConfigError("solver: direct size limit must be nonnegative");
  if (c.solver.gmres.max_iterations < 1) throw ConfigError("gmres-max-iterations: must be positive");
  if (c.estimator_extra_points < 0 || c.estimator_extra_points > 8) throw ConfigError("estimator-extra-points: must lie in [0, 8]");
}

LoopConfig make_loop_config(const RunConfig& config, const Benchmark& bench) {
  LoopConfig lc;
  lc.problem = bench.problem;
  lc.geometry = bench.geometry;
  lc.knots0 = bench.knots0;
  lc.theta = config.mode == Mode::uniform ? 1.0 : config.theta.value_or(bench.default_theta);
  lc.mode = config.mode;
  lc.marking = config.marking;
  lc.stop = config.stop;
  lc.exact_gradient = bench.exact_gradient;
  lc.assembly.extra_points = config.assembly_extra_points;
  lc.estimator.extra_points = config.estimator_extra_points;
  lc.solver = config.solver;
  return lc;
}

RunResult run(const RunConfig& config, const std::function<void(const AdaptiveState&)>& observer) {
  validate(config);
  RunResult out;
  out.bench = problem_library(config.problem, config.degree);
  const LoopConfig lc = make_loop_config(config, out.bench);
  out.history = adaptive_loop(lc, [&](const AdaptiveState& s) {
    out.final_mesh = s.mesh;
    if (observer) observer(s);
  });
  return out;
}

std::string rate_summary(const std::vector<HistoryRow>& history) {
  auto fmt = [&](RateQuantity q) -> std::string {
    try {
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%.3f", fit_rate(history, q));
      return buf;
    } catch (const InvalidInput&) {
      return "n/a";
    }
  };
  std::string out = "rate estimator " + fmt(RateQuantity::estimator);
  if (!history.empty() && !std::isnan(history.back().energy_error)) out += " energy_error " + fmt(RateQuantity::energy_error);
  return out;
}

Mode parse_mode(const std::string& s) {
  if (s == "adaptive") return Mode::adaptive;
  if (s == "uniform") return Mode::uniform;
  throw ConfigError("mode: expected adaptive or uniform, got '" + s + "'");
}

MarkingSum parse_marking(const std::string& s) {
  if (s == "linear") return MarkingSum::linear;
  if (s == "squared") return MarkingSum::squared;
  throw ConfigError("marking: expected linear or squared, got '" + s + "'");
}

}  // namespace higa
