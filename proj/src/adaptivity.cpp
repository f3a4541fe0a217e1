#include "higa/adaptivity.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>

namespace higa {

std::vector<int> doerfler_mark(std::span<const double> eta_sq, double theta) {
  if (!(theta > 0.0 && theta <= 1.0)) throw InvalidInput("theta must lie in (0, 1]");
  for (double v : eta_sq)
    if (!(v >= 0.0)) throw InvalidInput("indicators must be nonnegative");
  std::vector<int> order(eta_sq.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return eta_sq[static_cast<std::size_t>(a)] > eta_sq[static_cast<std::size_t>(b)];
  });
  // Summing in sorted order makes the full prefix reproduce the total exactly.
  double total = 0.0;
  for (int i : order) total += eta_sq[static_cast<std::size_t>(i)];
  std::vector<int> marked;
  if (total == 0.0) return marked;
  const double goal = theta * total;
  double sum = 0.0;
  for (int i : order) {
    if (sum >= goal) break;
    sum += eta_sq[static_cast<std::size_t>(i)];
    marked.push_back(i);
  }
  std::sort(marked.begin(), marked.end());
  return marked;
}

std::vector<int> doerfler_mark(std::span<const double> eta_sq, double theta, MarkingSum sum) {
  if (sum == MarkingSum::squared) return doerfler_mark(eta_sq, theta);
  std::vector<double> eta(eta_sq.size());
  for (std::size_t i = 0; i < eta.size(); ++i) {
    if (!(eta_sq[i] >= 0.0)) throw InvalidInput("indicators must be nonnegative");
    eta[i] = std::sqrt(eta_sq[i]);
  }
  return doerfler_mark(eta, theta);
}

std::vector<ActiveElement> doerfler_mark(const ElementIndicators& ind, double theta) {
  std::vector<ActiveElement> out;
  for (int i : doerfler_mark(ind.eta_sq, theta)) out.push_back(ind.elements[static_cast<std::size_t>(i)]);
  return out;
}

namespace {

template <class E>
[[noreturn]] void rethrow_with_step(const E& e, int step) {
  throw E("step " + std::to_string(step) + ": " + e.what());
}

}  // namespace

std::vector<HistoryRow> adaptive_loop(const LoopConfig& config,
                                      const std::function<void(const AdaptiveState&)>& observer) {
  if (config.mode == Mode::adaptive && !(config.theta > 0.0 && config.theta <= 1.0)) {
    throw ConfigError("theta must lie in (0, 1]");
  }
  check_geometry_compatible(config.knots0, config.geometry);
  std::vector<HistoryRow> history;
  AdaptiveState state;
  state.mesh = initial_mesh(config.knots0);
  for (int step = 0;; ++step) {
    state.step = step;
    state.basis = boundary_basis(state.mesh);
    const HierSpace space(state.mesh, state.basis);
    try {
      GalerkinSystem sys = assemble(space, config.geometry, config.problem, config.assembly);
      state.coeffs = solve(sys, config.solver);
      state.indicators = estimate(space, config.geometry, config.problem, state.coeffs, config.estimator);
    } catch (const AssemblyError& e) {
      rethrow_with_step(e, step);
    } catch (const SolverError& e) {
      rethrow_with_step(e, step);
    }

    HistoryRow& row = state.row;
    row = HistoryRow{};
    row.step = step;
    row.n_elements = static_cast<long>(state.mesh.num_elements());
    row.n_dofs = static_cast<long>(state.basis.size());
    row.max_level = state.mesh.max_level();
    row.estimator = state.indicators.total();
    if (config.exact_gradient) {
      row.energy_error = energy_error(space, config.geometry, state.coeffs, config.exact_gradient);
    }

    const bool stop = row.n_dofs >= config.stop.max_dofs || step + 1 >= config.stop.max_steps ||
                      row.estimator <= config.stop.eta_tol ||
                      (config.stop.max_elements > 0 && row.n_elements >= config.stop.max_elements) ||
                      row.max_level >= std::min(config.stop.max_level, kMaxLevel);
    std::vector<ActiveElement> marked;
    if (!stop) {
      if (config.mode == Mode::uniform) {
        marked.assign(state.mesh.active().begin(), state.mesh.active().end());
      } else {
        for (int i : doerfler_mark(state.indicators.eta_sq, config.theta, config.marking))
          marked.push_back(state.indicators.elements[static_cast<std::size_t>(i)]);
      }
      row.n_marked = static_cast<long>(marked.size());
    }
    history.push_back(row);
    if (observer) observer(state);
    if (stop || marked.empty()) break;
    state.mesh = refine(state.mesh, marked);
  }
  return history;
}

double fit_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw InvalidInput("slope fit needs at least two points");
  const double n = static_cast<double>(x.size());
  double sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw InvalidInput("slope fit needs positive data");
    sx += std::log(x[i]);
    sy += std::log(y[i]);
  }
  const double mx = sx / n;
  const double my = sy / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(y[i]) - my);
  }
  if (sxx == 0.0) throw InvalidInput("slope fit needs distinct abscissae");
  return sxy / sxx;
}

double fit_rate(std::span<const HistoryRow> history, RateQuantity which, int min_points, double min_decades) {
  if (history.empty()) throw InvalidInput("empty history");
  const double last_n = static_cast<double>(history.back().n_elements);
  std::size_t first = history.size();
  while (first > 0) {
    --first;
    const int count = static_cast<int>(history.size() - first);
    const double span = std::log10(last_n / static_cast<double>(history[first].n_elements));
    if (count >= std::max(min_points, 4) && span >= min_decades) {
      std::vector<double> x, y;
      for (std::size_t i = first; i < history.size(); ++i) {
        x.push_back(static_cast<double>(history[i].n_elements));
        y.push_back(which == RateQuantity::estimator ? history[i].estimator : history[i].energy_error);
      }
      return fit_slope(x, y);
    }
  }
  throw InvalidInput("history too short for a rate fit over " + std::to_string(min_decades) + " decade(s) and " +
                     std::to_string(min_points) + " points");
}

std::string history_csv_header() { return "step,n_elements,n_dofs,max_level,estimator,energy_error"; }

std::string history_csv_row(const HistoryRow& row) {
  char buf[32];
  std::string out = std::to_string(row.step) + "," + std::to_string(row.n_elements) + "," +
                    std::to_string(row.n_dofs) + "," + std::to_string(row.max_level) + ",";
  out.append(buf, std::to_chars(buf, buf + sizeof(buf), row.estimator).ptr);
  out += ",";
  if (!std::isnan(row.energy_error)) out.append(buf, std::to_chars(buf, buf + sizeof(buf), row.energy_error).ptr);
  return out;
}

}  // namespace higa
