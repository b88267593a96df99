#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ceglab/allocator.hpp"
#include "ceglab/ceg.hpp"
#include "ceglab/ingest.hpp"
#include "ceglab/report.hpp"

namespace ceglab::cli {

// Exit statuses.
inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitIo = 2;

struct NamedChart {
  std::string suffix; // appended to the output prefix, e.g. "" or "_bars"
  std::string svg;
};

struct CommandResult {
  ReportDocument doc;
  std::vector<NamedChart> charts;
};

struct FitCommand {
  std::string runs_path;
  double e_min = 1.3;
  double e_max = 2.2;
  double min_compute = 0.0;
  double grid_step = 0.005;
};

struct FrontierCommand {
  std::string runs_path;
  double min_compute = 0.0;
};

// Inputs may be run-CSV files (fitted with the flags below) or fit blocks as
// printed by `fit`.
struct CegCommand {
  std::string a_path;
  std::string b_path;
  std::optional<double> threshold;
  std::optional<double> at_compute;
  double e_min = 1.3;
  double e_max = 2.2;
  double min_compute = 0.0;
};

struct AllocCommand {
  std::string policy = "chinchilla"; // or "kaplan"
  double compute = 0.0;
  LossSurface surface = LossSurface::chinchilla();
  KaplanFixed kaplan;
};

struct TimelineOverrides {
  std::optional<std::string> preset;
  std::optional<double> anchor_year;
  std::optional<double> anchor_compute;
  std::optional<double> annual_factor;
};

struct DecomposeCommand {
  std::string config_path;
  TimelineOverrides timeline;
  bool apply_groups = true;
  std::vector<double> report_years;
};

struct TimelineCommand {
  std::optional<std::string> config_path;
  TimelineOverrides timeline;
  double start_year = 2012.0;
  double end_year = 2028.0;
  double step = 1.0;
};

struct SynthCommand {
  std::optional<std::string> spec_path;
  std::optional<std::uint64_t> seed;
  std::optional<double> noise_sigma;
  std::optional<double> token_param_ratio;
  std::optional<std::string> algorithm_id;
};

CommandResult cmd_fit(const FitCommand &cmd);
CommandResult cmd_frontier(const FrontierCommand &cmd);
CommandResult cmd_ceg(const CegCommand &cmd);
CommandResult cmd_alloc(const AllocCommand &cmd);
CommandResult cmd_decompose(const DecomposeCommand &cmd);
CommandResult cmd_timeline(const TimelineCommand &cmd);
RunSet cmd_synth(const SynthCommand &cmd);

SynthSpec synth_spec_from_json(const nlohmann::json &j);

/// Writes `<prefix>.csv`, `<prefix>.json` and every chart as
/// `<prefix><suffix>.svg`, restricted to `formats` (subset of csv, json, svg).
std::vector<std::string> write_outputs(const CommandResult &result, const std::string &prefix,
                                       const std::vector<std::string> &formats);

/// Full command-line entry point. Never throws; returns the exit status.
int run(int argc, const char *const *argv, std::ostream &out, std::ostream &err,
        bool color = false);

} // namespace ceglab::cli
