#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ceglab/ceg.hpp"

namespace ceglab {

struct InnovationSpec {
  std::string name;
  CegCurve curve = CegCurve::constant(1.0);
  std::optional<std::string> group;
  // The innovation contributes a multiplier of 1 at grid years before this.
  std::optional<double> introduced_year;
};

struct GridSpec {
  double start_year = 2012.0;
  double end_year = 2028.0;
  double step = 0.25;
};

std::vector<double> grid_years(const GridSpec &grid);

struct StackConfig {
  std::vector<InnovationSpec> innovations;
  std::map<std::string, double> group_measured_joint;
  ComputeTimeline timeline = ComputeTimeline::frontier_2025();
  std::vector<double> grid; // evaluation years
};

/// Throws ValidationError on duplicate names or groups without a measured joint.
void validate(const StackConfig &config);

struct DecompositionRow {
  double year = 0.0;
  double compute = 0.0;
  std::vector<double> multipliers; // parallel to DecompositionReport::innovations
  double cumulative = 1.0;
  // Fraction of log(cumulative) per innovation; absent when cumulative is 1.
  std::optional<std::vector<double>> shares;
};

struct DecompositionReport {
  std::vector<std::string> innovations;
  std::vector<DecompositionRow> rows;
};

/// Replaces the constants of every interaction group by their log-proportional
/// rescaling against the group's measured joint multiplier.
StackConfig apply_interaction_groups(const StackConfig &config);

/// Evaluates every innovation at each grid year's frontier compute. Callers
/// wanting interaction rescaling apply apply_interaction_groups first.
DecompositionReport evaluate_stack(const StackConfig &config);

/// (cumulative(y1) / cumulative(y0))^(1 / (y1 - y0)), reading both from grid
/// rows whose compute matches the timeline at y0 and y1.
double annualized_total(const DecompositionReport &report, const ComputeTimeline &timeline,
                        double y0, double y1);

const DecompositionRow &row_at_year(const DecompositionReport &report,
                                    const ComputeTimeline &timeline, double year);

// JSON mapping. Errors carry the JSON path of the offending field, e.g.
// "innovations[2].params.k".
CegCurve curve_from_json(const nlohmann::json &j, const std::string &path);
nlohmann::json curve_to_json(const CegCurve &curve);
LossSurface surface_from_json(const nlohmann::json &j, const std::string &path);
KaplanFixed kaplan_from_json(const nlohmann::json &j, const std::string &path);
ComputeTimeline timeline_from_json(const nlohmann::json &j, const std::string &path);

StackConfig stack_config_from_json(const nlohmann::json &j);
StackConfig read_stack_config(const std::string &path);

} // namespace ceglab
