#include "ceglab/frontier.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "ceglab/errors.hpp"
#include "ceglab/numeric.hpp"

namespace ceglab {

std::vector<FrontierPoint> pooled_points(const RunSet &runs) {
  std::vector<FrontierPoint> out;
  out.reserve(runs.point_count());
  for (const TrainingRun &run : runs.runs) {
    for (const RunPoint &p : run.points) {
      out.push_back({p.flops, p.val_loss});
    }
  }
  return out;
}

std::vector<FrontierPoint> extract_frontier(std::vector<FrontierPoint> points,
                                            double min_compute) {
  if (points.empty()) {
    throw DomainError("frontier: no points");
  }
  std::sort(points.begin(), points.end(), [](const FrontierPoint &a, const FrontierPoint &b) {
    return a.compute < b.compute || (a.compute == b.compute && a.loss < b.loss);
  });
  // Sweep in compute order: a point survives iff its loss beats every point at
  // strictly smaller compute and it is the lowest loss at its own compute.
  std::vector<FrontierPoint> frontier;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < points.size(); ++i) {
    const FrontierPoint &p = points[i];
    const bool first_at_compute = i == 0 || points[i - 1].compute != p.compute;
    if (first_at_compute && p.loss < best) {
      if (p.compute >= min_compute) {
        frontier.push_back(p);
      }
      best = p.loss;
    }
  }
  if (frontier.empty()) {
    throw DomainError("frontier: no Pareto-optimal points at or above min_compute " +
                      format_double(min_compute));
  }
  return frontier;
}

std::vector<FrontierPoint> extract_frontier(const RunSet &runs, double min_compute) {
  return extract_frontier(pooled_points(runs), min_compute);
}

namespace {

struct LogData {
  std::vector<double> log_c;
  std::vector<double> loss;
};

LogData to_log_data(const std::vector<FrontierPoint> &points) {
  LogData d;
  d.log_c.reserve(points.size());
  d.loss.reserve(points.size());
  for (const FrontierPoint &p : points) {
    d.log_c.push_back(std::log(p.compute));
    d.loss.push_back(p.loss);
  }
  return d;
}

LinearFit regress_at(const LogData &d, double E) {
  std::vector<double> ys(d.loss.size());
  for (std::size_t i = 0; i < ys.size(); ++i) {
    ys[i] = std::log(d.loss[i] - E);
  }
  return fit_line(d.log_c, ys);
}

double objective_at(const LogData &d, double E) {
  for (const double l : d.loss) {
    if (!(l > E)) {
      return std::numeric_limits<double>::infinity();
    }
  }
  return regress_at(d, E).sse;
}

} // namespace

double profile_objective(const std::vector<FrontierPoint> &points, double E) {
  return objective_at(to_log_data(points), E);
}

PowerLawFit fit_power_law(const std::vector<FrontierPoint> &points, const FitOptions &options) {
  if (points.size() < 3) {
    throw DomainError("power-law fit needs at least 3 points, got " +
                      std::to_string(points.size()));
  }
  if (!(options.e_min <= options.e_max)) {
    throw ValidationError("power-law fit: e_min must not exceed e_max");
  }
  if (!(options.grid_step > 0.0)) {
    throw ValidationError("power-law fit: grid step must be positive");
  }
  double min_loss = std::numeric_limits<double>::infinity();
  double c_min = std::numeric_limits<double>::infinity();
  double c_max = 0.0;
  for (const FrontierPoint &p : points) {
    if (!(p.compute > 0.0) || !(p.loss > 0.0)) {
      throw ValidationError("power-law fit: compute and loss must be positive");
    }
    min_loss = std::min(min_loss, p.loss);
    c_min = std::min(c_min, p.compute);
    c_max = std::max(c_max, p.compute);
  }
  if (!(c_min < c_max)) {
    throw DomainError("power-law fit: all points share one compute value");
  }
  const double upper = std::min(options.e_max, min_loss - options.floor_gap);
  if (upper < options.e_min) {
    throw DomainError("power-law fit impossible: minimum loss " + format_double(min_loss) +
                      " does not exceed e_min " + format_double(options.e_min));
  }

  const LogData data = to_log_data(points);

  std::vector<double> grid;
  for (std::size_t k = 0;; ++k) {
    const double e = options.e_min + static_cast<double>(k) * options.grid_step;
    if (e > upper) {
      break;
    }
    grid.push_back(e);
  }
  // When the reduced loss of the best points is far below one grid step the
  // basin around the true E is narrower than a cell, so sample the last cell
  // geometrically as it closes in on the feasibility bound.
  const double last_cell = std::max(upper - grid.back(), options.grid_step);
  for (int k = 1; k <= 14; ++k) {
    const double e = upper - last_cell * std::pow(10.0, -0.5 * k);
    if (e > grid.back() && e >= options.e_min) {
      grid.push_back(e);
    }
  }
  if (grid.back() < upper) {
    grid.push_back(upper);
  }

  std::size_t best = 0;
  double best_obj = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double obj = objective_at(data, grid[k]);
    if (obj < best_obj) {
      best_obj = obj;
      best = k;
    }
  }

  double best_e = grid[best];
  if (grid.size() > 1) {
    const double lo = grid[best == 0 ? 0 : best - 1];
    const double hi = grid[std::min(best + 1, grid.size() - 1)];
    const double refined =
        golden_section_min([&](double e) { return objective_at(data, e); }, lo, hi, 1e-10);
    if (objective_at(data, refined) < best_obj) {
      best_e = refined;
    }
  }

  const LinearFit line = regress_at(data, best_e);
  if (!(-line.slope > 0.0)) {
    throw DomainError("power-law fit: reduced loss does not decrease with compute");
  }
  PowerLawFit fit;
  fit.E = best_e;
  fit.A = std::exp(line.intercept);
  fit.alpha = -line.slope;
  fit.c_min = c_min;
  fit.c_max = c_max;
  fit.rmse = std::sqrt(line.sse / static_cast<double>(points.size()));
  return fit;
}

PowerLawFit fit_power_law(const std::vector<FrontierPoint> &points, double e_min,
                          double e_max) {
  FitOptions options;
  options.e_min = e_min;
  options.e_max = e_max;
  return fit_power_law(points, options);
}

LossPrediction predict_loss(const PowerLawFit &fit, double compute) {
  if (!(compute > 0.0)) {
    throw ValidationError("predict_loss: compute must be positive");
  }
  LossPrediction out;
  out.loss = fit.E + fit.A * std::pow(compute, -fit.alpha);
  out.extrapolated = compute < fit.c_min || compute > fit.c_max;
  return out;
}

double compute_for_loss(const PowerLawFit &fit, double loss) {
  if (!(loss > fit.E)) {
    throw UnreachableError("performance unreachable: loss " + format_double(loss) +
                           " is at or below the irreducible loss " + format_double(fit.E));
  }
  return std::pow(fit.A / (loss - fit.E), 1.0 / fit.alpha);
}

XYPowerFit fit_xy_power(const std::vector<double> &xs, const std::vector<double> &ys) {
  if (xs.size() != ys.size()) {
    throw ValidationError("fit_xy_power: length mismatch (" + std::to_string(xs.size()) +
                          " vs " + std::to_string(ys.size()) + ")");
  }
  if (xs.size() < 2) {
    throw ValidationError("fit_xy_power: need at least 2 points");
  }
  std::vector<double> lx(xs.size());
  std::vector<double> ly(ys.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!(xs[i] > 0.0) || !(ys[i] > 0.0)) {
      throw ValidationError("fit_xy_power: values must be positive (index " +
                            std::to_string(i) + ")");
    }
    lx[i] = std::log(xs[i]);
    ly[i] = std::log(ys[i]);
  }
  const LinearFit line = fit_line(lx, ly);
  return {std::exp(line.intercept), line.slope};
}

std::string format_fit(const PowerLawFit &fit) {
  std::ostringstream out;
  out << "kind=power_law_fit\n"
      << "E=" << format_double(fit.E) << '\n'
      << "A=" << format_double(fit.A) << '\n'
      << "alpha=" << format_double(fit.alpha) << '\n'
      << "c_min=" << format_double(fit.c_min) << '\n'
      << "c_max=" << format_double(fit.c_max) << '\n'
      << "rmse=" << format_double(fit.rmse) << '\n';
  return out.str();
}

PowerLawFit parse_fit(const std::string &text) {
  std::map<std::string, double> values;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    if (line.empty() || line.front() == '#') {
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ParseError(line_no, "expected key=value");
    }
    const std::string key = line.substr(0, eq);
    const std::string raw = line.substr(eq + 1);
    if (key == "kind") {
      if (raw != "power_law_fit") {
        throw ParseError(line_no, "unsupported kind '" + raw + "'");
      }
      continue;
    }
    const auto value = parse_double(raw);
    if (!value) {
      throw ParseError(line_no, key + ": not a number");
    }
    values[key] = *value;
  }
  for (const char *required : {"E", "A", "alpha"}) {
    if (!values.count(required)) {
      throw ValidationError(std::string("fit block is missing '") + required + "'");
    }
  }
  PowerLawFit fit;
  fit.E = values["E"];
  fit.A = values["A"];
  fit.alpha = values["alpha"];
  fit.c_min = values.count("c_min") ? values["c_min"] : 0.0;
  fit.c_max = values.count("c_max") ? values["c_max"] : std::numeric_limits<double>::infinity();
  fit.rmse = values.count("rmse") ? values["rmse"] : 0.0;
  if (!(fit.A > 0.0) || !(fit.alpha > 0.0)) {
    throw ValidationError("fit block: A and alpha must be positive");
  }
  return fit;
}

PowerLawFit read_fit_file(const std::string &path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open fit file '" + path + "'");
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_fit(buffer.str());
}

} // namespace ceglab
