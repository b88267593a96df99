#include "ceglab/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "ceglab/decompose.hpp"
#include "ceglab/errors.hpp"
#include "ceglab/frontier.hpp"
#include "ceglab/numeric.hpp"
#include "ceglab/svg.hpp"

namespace ceglab::cli {

using nlohmann::json;

namespace {

std::string read_text(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open '" + path + "'");
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_text(const std::string &path, const std::string &text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw IoError("cannot write '" + path + "'");
  }
  out << text;
  if (!out) {
    throw IoError("failed writing '" + path + "'");
  }
}

bool looks_like_runs(const std::string &text) {
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    if (line.rfind("\xEF\xBB\xBF", 0) == 0) {
      line.erase(0, 3);
    }
    if (!line.empty()) {
      return line == kRunCsvHeader;
    }
  }
  return false;
}

// Three significant figures for human-facing headline numbers.
std::string sig3(double v) {
  if (v == 0.0 || !std::isfinite(v)) {
    return format_double(v);
  }
  const double scale = std::pow(10.0, 2 - std::floor(std::log10(std::fabs(v))));
  const double rounded = std::round(v * scale) / scale;
  if (std::fabs(rounded) >= 1e-3 && std::fabs(rounded) < 1e7) {
    std::ostringstream out;
    out << std::setprecision(3) << std::defaultfloat;
    // Integers print without exponent, everything else with three figures.
    if (rounded == std::floor(rounded)) {
      out << std::fixed << std::setprecision(0);
    }
    out << rounded;
    return out.str();
  }
  std::ostringstream out;
  out << std::setprecision(3) << rounded;
  return out.str();
}

std::vector<double> column(const ReportTable &t, std::size_t c) {
  std::vector<double> out;
  for (const auto &row : t.rows) {
    out.push_back(row[c].value_or(std::nan("")));
  }
  return out;
}

FitOptions fit_options(double e_min, double e_max, double grid_step) {
  FitOptions options;
  options.e_min = e_min;
  options.e_max = e_max;
  options.grid_step = grid_step;
  return options;
}

struct FitFromRuns {
  RunSet runs;
  std::vector<FrontierPoint> frontier;
  PowerLawFit fit;
};

FitFromRuns fit_runs(const std::string &path, double min_compute, const FitOptions &options) {
  FitFromRuns out;
  out.runs = read_runs_file(path);
  if (out.runs.runs.empty()) {
    throw ValidationError(path + ": no data rows");
  }
  out.frontier = extract_frontier(out.runs, min_compute);
  out.fit = fit_power_law(out.frontier, options);
  return out;
}

PowerLawFit load_fit(const std::string &path, const CegCommand &cmd) {
  const std::string text = read_text(path);
  if (looks_like_runs(text)) {
    RunSet runs = parse_runs(text, path);
    if (runs.runs.empty()) {
      throw ValidationError(path + ": no data rows");
    }
    return fit_power_law(extract_frontier(runs, cmd.min_compute),
                         fit_options(cmd.e_min, cmd.e_max, 0.005));
  }
  return parse_fit(text);
}

void add_fit_fields(ReportDocument &doc, const PowerLawFit &fit, const std::string &prefix) {
  doc.add(prefix + "E", fit.E);
  doc.add(prefix + "A", fit.A);
  doc.add(prefix + "alpha", fit.alpha);
  doc.add(prefix + "c_min", fit.c_min);
  doc.add(prefix + "c_max", fit.c_max);
  doc.add(prefix + "rmse", fit.rmse);
}

ComputeTimeline apply_overrides(ComputeTimeline tl, const TimelineOverrides &o) {
  if (o.preset) {
    if (*o.preset == "frontier_2025") {
      tl = ComputeTimeline::frontier_2025();
    } else if (*o.preset == "frontier_2023") {
      tl = ComputeTimeline::frontier_2023();
    } else {
      throw ValidationError("--preset: unknown timeline preset '" + *o.preset + "'");
    }
  }
  if (o.anchor_year) {
    tl.anchor_year = *o.anchor_year;
  }
  if (o.anchor_compute) {
    tl.anchor_compute = *o.anchor_compute;
  }
  if (o.annual_factor) {
    tl.annual_factor = *o.annual_factor;
  }
  validate(tl);
  return tl;
}

std::string chart_title(const std::string &what, const std::string &source) {
  return what + " (" + std::filesystem::path(source).filename().string() + ")";
}

} // namespace

CommandResult cmd_fit(const FitCommand &cmd) {
  const FitFromRuns f = fit_runs(cmd.runs_path, cmd.min_compute,
                                 fit_options(cmd.e_min, cmd.e_max, cmd.grid_step));
  CommandResult result;
  ReportDocument &doc = result.doc;
  doc.kind = ReportKind::fit;
  doc.add("kind", std::string("power_law_fit"));
  add_fit_fields(doc, f.fit, "");
  doc.add("runs", static_cast<double>(f.runs.runs.size()));
  doc.add("points", static_cast<double>(f.runs.point_count()));
  doc.add("frontier_points", static_cast<double>(f.frontier.size()));
  doc.add("e_min", cmd.e_min);
  doc.add("e_max", cmd.e_max);
  doc.add("min_compute", cmd.min_compute);

  ReportTable table{"frontier", {"compute", "loss", "predicted_loss"}, {}};
  for (const FrontierPoint &p : f.frontier) {
    table.rows.push_back({p.compute, p.loss, predict_loss(f.fit, p.compute).loss});
  }
  doc.tables.push_back(table);

  svg::LineChart chart;
  chart.title = chart_title("Compute-loss frontier and fit", cmd.runs_path);
  chart.x_label = "training compute (FLOPs)";
  chart.y_label = "validation loss (nats/token)";
  chart.log_y = true;
  svg::Series all{"all points", {}, {}, false, true};
  for (const FrontierPoint &p : pooled_points(f.runs)) {
    all.x.push_back(p.compute);
    all.y.push_back(p.loss);
  }
  svg::Series front{"frontier", column(table, 0), column(table, 1), false, true};
  svg::Series law{"fit", {}, {}, true, false};
  for (const double c : log_space(f.fit.c_min, f.fit.c_max, 96)) {
    law.x.push_back(c);
    law.y.push_back(predict_loss(f.fit, c).loss);
  }
  chart.series = {all, front, law};
  result.charts.push_back({"", svg::render(chart)});
  return result;
}

CommandResult cmd_frontier(const FrontierCommand &cmd) {
  const RunSet runs = read_runs_file(cmd.runs_path);
  if (runs.runs.empty()) {
    throw ValidationError(cmd.runs_path + ": no data rows");
  }
  const auto frontier = extract_frontier(runs, cmd.min_compute);
  CommandResult result;
  ReportDocument &doc = result.doc;
  doc.kind = ReportKind::frontier;
  doc.add("runs", static_cast<double>(runs.runs.size()));
  doc.add("points", static_cast<double>(runs.point_count()));
  doc.add("frontier_points", static_cast<double>(frontier.size()));
  doc.add("min_compute", cmd.min_compute);
  ReportTable table{"frontier", {"compute", "loss"}, {}};
  for (const FrontierPoint &p : frontier) {
    table.rows.push_back({p.compute, p.loss});
  }
  doc.tables.push_back(table);

  svg::LineChart chart;
  chart.title = chart_title("Pareto frontier", cmd.runs_path);
  chart.x_label = "training compute (FLOPs)";
  chart.y_label = "validation loss (nats/token)";
  chart.log_y = true;
  for (const TrainingRun &run : runs.runs) {
    svg::Series s{run.algorithm_id + " N=" + sig3(run.params), {}, {}, false, false};
    for (const RunPoint &p : run.points) {
      s.x.push_back(p.flops);
      s.y.push_back(p.val_loss);
    }
    chart.series.push_back(std::move(s));
  }
  chart.series.push_back({"frontier", column(table, 0), column(table, 1), true, false});
  result.charts.push_back({"", svg::render(chart)});
  return result;
}

CommandResult cmd_ceg(const CegCommand &cmd) {
  if (cmd.threshold.has_value() == cmd.at_compute.has_value()) {
    throw ValidationError("ceg: give exactly one of --threshold or --at-compute");
  }
  const PowerLawFit fit_a = load_fit(cmd.a_path, cmd);
  const PowerLawFit fit_b = load_fit(cmd.b_path, cmd);
  CommandResult result;
  ReportDocument &doc = result.doc;
  doc.kind = ReportKind::ceg;
  add_fit_fields(doc, fit_a, "a_");
  add_fit_fields(doc, fit_b, "b_");
  const bool shared_e = fit_a.E == fit_b.E;
  if (cmd.threshold) {
    const CegMultiplier m = ceg_multiplier_at_threshold(fit_a, fit_b, *cmd.threshold);
    doc.add("mode", std::string("threshold"));
    doc.add("threshold", *cmd.threshold);
    doc.add("multiplier", m.value);
    doc.add("reference_compute", m.reference_compute);
    doc.add("compute_b", m.reference_compute / m.value);
  } else {
    const double c = *cmd.at_compute;
    if (!(c > 0.0)) {
      throw ValidationError("--at-compute must be positive");
    }
    doc.add("mode", std::string("at_compute"));
    doc.add("compute", c);
    if (shared_e) {
      const CegCurve curve = ceg_from_power_laws(fit_a, fit_b);
      const auto *p = curve.as<PowerLawCeg>();
      doc.add("method", std::string("closed_form"));
      doc.add("multiplier", ceg_eval(curve, c));
      doc.add("k", p->k);
      doc.add("delta", p->delta);
    } else {
      doc.add("method", std::string("numeric"));
      doc.add("multiplier", ceg_numeric(fit_a, fit_b, c));
    }
  }
  return result;
}

CommandResult cmd_alloc(const AllocCommand &cmd) {
  if (!(cmd.compute > 0.0) || !std::isfinite(cmd.compute)) {
    throw ValidationError("--compute must be a positive number");
  }
  validate(cmd.surface);
  CommandResult result;
  ReportDocument &doc = result.doc;
  doc.kind = ReportKind::allocation;
  Allocation a;
  if (cmd.policy == "chinchilla") {
    a = chinchilla_alloc(cmd.surface, cmd.compute);
  } else if (cmd.policy == "kaplan") {
    validate(cmd.kaplan);
    a = kaplan_alloc(cmd.kaplan, cmd.compute);
  } else {
    throw ValidationError("--policy must be 'kaplan' or 'chinchilla'");
  }
  const double loss = surface_loss(cmd.surface, a.params, a.tokens);
  doc.add("policy", cmd.policy);
  doc.add("compute", cmd.compute);
  doc.add("params", a.params);
  doc.add("tokens", a.tokens);
  doc.add("six_nd", 6.0 * a.params * a.tokens);
  doc.add("tokens_per_param", a.tokens / a.params);
  doc.add("loss", loss);
  if (cmd.policy == "kaplan") {
    doc.add("chinchilla_compute_for_loss", chinchilla_compute_for_loss(cmd.surface, loss));
    doc.add("rebalance_multiplier", rebalance_multiplier_exact(cmd.surface, cmd.kaplan, cmd.compute));
    doc.add("rebalance_multiplier_approx", rebalance_multiplier_approx(cmd.compute));
  }
  return result;
}

CommandResult cmd_decompose(const DecomposeCommand &cmd) {
  StackConfig cfg = read_stack_config(cmd.config_path);
  cfg.timeline = apply_overrides(cfg.timeline, cmd.timeline);
  if (cmd.apply_groups) {
    cfg = apply_interaction_groups(cfg);
  }
  const DecompositionReport rep = evaluate_stack(cfg);

  CommandResult result;
  ReportDocument &doc = result.doc;
  doc.kind = ReportKind::decomposition;
  const DecompositionRow &first = rep.rows.front();
  const DecompositionRow &last = rep.rows.back();
  doc.add("start_year", first.year);
  doc.add("end_year", last.year);
  doc.add("cumulative_start", first.cumulative);
  doc.add("cumulative_end", last.cumulative);
  if (last.year > first.year) {
    doc.add("annualized_rate", annualized_total(rep, cfg.timeline, first.year, last.year));
  }
  for (const double y : cmd.report_years) {
    doc.add("cumulative_" + format_double(y), row_at_year(rep, cfg.timeline, y).cumulative);
  }

  ReportTable main{"decomposition", {"year", "compute"}, {}};
  ReportTable shares{"shares", {"year"}, {}};
  for (const std::string &name : rep.innovations) {
    main.columns.push_back(name);
    shares.columns.push_back(name);
  }
  main.columns.push_back("cumulative");
  for (const DecompositionRow &row : rep.rows) {
    std::vector<std::optional<double>> cells{row.year, row.compute};
    std::vector<std::optional<double>> share_cells{row.year};
    for (std::size_t i = 0; i < row.multipliers.size(); ++i) {
      cells.push_back(row.multipliers[i]);
      share_cells.push_back(row.shares ? std::optional<double>((*row.shares)[i]) : std::nullopt);
    }
    cells.push_back(row.cumulative);
    main.rows.push_back(std::move(cells));
    shares.rows.push_back(std::move(share_cells));
  }
  doc.tables.push_back(std::move(main));
  doc.tables.push_back(std::move(shares));

  svg::StackedAreaChart area;
  area.title = chart_title("Cumulative compute-equivalent gain", cmd.config_path);
  area.x_label = "year (frontier compute)";
  area.y_label = "log10 multiplier";
  for (const DecompositionRow &row : rep.rows) {
    area.x.push_back(row.year);
  }
  for (std::size_t i = 0; i < rep.innovations.size(); ++i) {
    std::vector<double> layer;
    for (const DecompositionRow &row : rep.rows) {
      layer.push_back(std::log10(row.multipliers[i]));
    }
    area.layers.emplace_back(rep.innovations[i], std::move(layer));
  }
  result.charts.push_back({"", svg::render(area)});

  svg::BarChart bars;
  bars.title = "Multipliers at " + format_double(last.year) + " (" + sig3(last.compute) + " FLOPs)";
  bars.y_label = "multiplier";
  bars.log_y = true;
  for (std::size_t i = 0; i < rep.innovations.size(); ++i) {
    bars.bars.emplace_back(rep.innovations[i], last.multipliers[i]);
  }
  result.charts.push_back({"_bars", svg::render(bars)});
  return result;
}

CommandResult cmd_timeline(const TimelineCommand &cmd) {
  std::vector<std::pair<std::string, CegCurve>> curves;
  ComputeTimeline tl = ComputeTimeline::frontier_2025();
  if (cmd.config_path) {
    StackConfig cfg = apply_interaction_groups(read_stack_config(*cmd.config_path));
    tl = cfg.timeline;
    for (const InnovationSpec &inn : cfg.innovations) {
      curves.emplace_back(inn.name, inn.curve);
    }
  } else {
    curves.emplace_back("kaplan_chinchilla", CegCurve::kaplan_chinchilla());
  }
  tl = apply_overrides(tl, cmd.timeline);
  GridSpec grid{cmd.start_year, cmd.end_year, cmd.step};
  const auto years = grid_years(grid);

  CommandResult result;
  ReportDocument &doc = result.doc;
  doc.kind = ReportKind::timeline;
  doc.add("anchor_year", tl.anchor_year);
  doc.add("anchor_compute", tl.anchor_compute);
  doc.add("annual_factor", tl.annual_factor);
  ReportTable table{"timeline", {"year", "compute"}, {}};
  for (const auto &[name, curve] : curves) {
    table.columns.push_back(name);
    table.columns.push_back(name + "_growth");
  }
  svg::LineChart chart;
  chart.title = "Annual growth of CEG multipliers along the compute frontier";
  chart.x_label = "year";
  chart.y_label = "growth factor per year";
  chart.log_x = false;
  for (const auto &[name, curve] : curves) {
    chart.series.push_back({name, {}, {}, false, false});
  }
  for (const double y : years) {
    std::vector<std::optional<double>> row{y, timeline_compute(tl, y)};
    for (std::size_t i = 0; i < curves.size(); ++i) {
      const CegCurve &curve = curves[i].second;
      try {
        row.push_back(ceg_eval(curve, timeline_compute(tl, y)));
        const double g = growth_rate(curve, tl, y);
        row.push_back(g);
        chart.series[i].x.push_back(y);
        chart.series[i].y.push_back(g);
      } catch (const DomainError &) {
        // Outside a tabulated curve's range: leave the cells empty.
        row.resize(2 + 2 * (i + 1));
      }
    }
    table.rows.push_back(std::move(row));
  }
  doc.tables.push_back(std::move(table));
  for (auto it = chart.series.begin(); it != chart.series.end();) {
    it = it->x.empty() ? chart.series.erase(it) : std::next(it);
  }
  if (!chart.series.empty()) {
    result.charts.push_back({"", svg::render(chart)});
  }
  return result;
}

SynthSpec synth_spec_from_json(const json &j) {
  if (!j.is_object()) {
    throw ValidationError("$: synth spec must be an object");
  }
  SynthSpec spec = SynthSpec::defaults();
  auto number = [&](const char *key, double fallback) {
    auto it = j.find(key);
    if (it == j.end()) {
      return fallback;
    }
    if (!it->is_number()) {
      throw ValidationError(std::string(key) + ": expected a number");
    }
    return it->get<double>();
  };
  if (auto it = j.find("algorithm_id"); it != j.end()) {
    if (!it->is_string()) {
      throw ValidationError("algorithm_id: expected a string");
    }
    spec.algorithm_id = it->get<std::string>();
  }
  if (auto it = j.find("surface"); it != j.end()) {
    spec.surface = surface_from_json(*it, "surface");
  }
  spec.policy = ChinchillaOptimal{spec.surface};
  if (auto it = j.find("policy"); it != j.end()) {
    if (it->is_string() && *it == "chinchilla") {
      spec.policy = ChinchillaOptimal{spec.surface};
    } else if (it->is_string() && *it == "kaplan") {
      spec.policy = KaplanFixed{};
    } else if (it->is_object()) {
      spec.policy = kaplan_from_json(*it, "policy");
    } else {
      throw ValidationError("policy: expected \"chinchilla\", \"kaplan\" or a Kaplan object");
    }
  }
  if (auto it = j.find("model_sizes"); it != j.end()) {
    if (!it->is_array()) {
      throw ValidationError("model_sizes: expected an array");
    }
    spec.model_sizes.clear();
    for (std::size_t i = 0; i < it->size(); ++i) {
      if (!(*it)[i].is_number()) {
        throw ValidationError("model_sizes[" + std::to_string(i) + "]: expected a number");
      }
      spec.model_sizes.push_back((*it)[i].get<double>());
    }
  }
  spec.token_param_ratio = number("token_param_ratio", spec.token_param_ratio);
  spec.noise_sigma = number("noise_sigma", spec.noise_sigma);
  spec.token_span = number("token_span", spec.token_span);
  const double points = number("points_per_run", static_cast<double>(spec.points_per_run));
  if (points < 2 || points != std::floor(points)) {
    throw ValidationError("points_per_run: expected an integer >= 2");
  }
  spec.points_per_run = static_cast<std::size_t>(points);
  const double seed = number("seed", static_cast<double>(spec.seed));
  if (seed < 0 || seed != std::floor(seed)) {
    throw ValidationError("seed: expected a non-negative integer");
  }
  spec.seed = static_cast<std::uint64_t>(seed);
  validate(spec);
  return spec;
}

RunSet cmd_synth(const SynthCommand &cmd) {
  SynthSpec spec = SynthSpec::defaults();
  if (cmd.spec_path) {
    json j;
    try {
      j = json::parse(read_text(*cmd.spec_path));
    } catch (const json::parse_error &e) {
      throw ValidationError(*cmd.spec_path + ": invalid JSON: " + e.what());
    }
    spec = synth_spec_from_json(j);
  }
  if (cmd.seed) {
    spec.seed = *cmd.seed;
  }
  if (cmd.noise_sigma) {
    spec.noise_sigma = *cmd.noise_sigma;
  }
  if (cmd.token_param_ratio) {
    spec.token_param_ratio = *cmd.token_param_ratio;
  }
  if (cmd.algorithm_id) {
    spec.algorithm_id = *cmd.algorithm_id;
  }
  return synthesize_runs(spec);
}

std::vector<std::string> write_outputs(const CommandResult &result, const std::string &prefix,
                                       const std::vector<std::string> &formats) {
  std::vector<std::string> written;
  auto wants = [&](const char *f) {
    return std::find(formats.begin(), formats.end(), f) != formats.end();
  };
  for (const std::string &f : formats) {
    if (f != "csv" && f != "json" && f != "svg") {
      throw ValidationError("--format: unknown format '" + f + "'");
    }
  }
  const ReportDocument &doc = result.doc;
  if (wants("csv")) {
    if (doc.tables.empty()) {
      write_text(prefix + ".csv", doc.fields_csv());
      written.push_back(prefix + ".csv");
    } else {
      write_text(prefix + ".csv", table_csv(doc.tables.front()));
      written.push_back(prefix + ".csv");
      for (std::size_t i = 1; i < doc.tables.size(); ++i) {
        const std::string path = prefix + "_" + doc.tables[i].name + ".csv";
        write_text(path, table_csv(doc.tables[i]));
        written.push_back(path);
      }
      if (!doc.fields.empty()) {
        write_text(prefix + "_summary.csv", doc.fields_csv());
        written.push_back(prefix + "_summary.csv");
      }
    }
  }
  if (wants("json")) {
    write_text(prefix + ".json", doc.to_json().dump(2) + "\n");
    written.push_back(prefix + ".json");
  }
  if (wants("svg")) {
    for (const NamedChart &chart : result.charts) {
      const std::string path = prefix + chart.suffix + ".svg";
      write_text(path, chart.svg);
      written.push_back(path);
    }
  }
  return written;
}

namespace {

void add_timeline_flags(CLI::App *sub, TimelineOverrides &t) {
  sub->add_option("--preset", t.preset, "Timeline preset: frontier_2025 or frontier_2023");
  sub->add_option("--anchor-year", t.anchor_year, "Calendar year of the anchor point");
  sub->add_option("--anchor-compute", t.anchor_compute, "Frontier compute at the anchor (FLOPs)");
  sub->add_option("--annual-factor", t.annual_factor, "Frontier compute growth per year");
}

void add_output_flags(CLI::App *sub, std::string &prefix, std::vector<std::string> &formats) {
  sub->add_option("--out", prefix, "Output prefix for report files");
  sub->add_option("--format", formats, "Comma-separated formats: csv,json,svg")->delimiter(',');
}

} // namespace

int run(int argc, const char *const *argv, std::ostream &out, std::ostream &err, bool color) {
  CLI::App app{"ceglab: compute-equivalent-gain analysis of language-model training"};
  app.require_subcommand(1);

  FitCommand fit;
  FrontierCommand frontier;
  CegCommand ceg;
  AllocCommand alloc;
  DecomposeCommand decompose;
  TimelineCommand timeline;
  SynthCommand synth;
  std::string prefix;
  std::vector<std::string> formats;
  std::string synth_out;

  auto *fit_cmd = app.add_subcommand("fit", "Extract the Pareto frontier and fit L = E + A C^-alpha");
  fit_cmd->add_option("runs", fit.runs_path, "Run-CSV file")->required();
  fit_cmd->add_option("--e-min", fit.e_min, "Lower bound on E")->capture_default_str();
  fit_cmd->add_option("--e-max", fit.e_max, "Upper bound on E")->capture_default_str();
  fit_cmd->add_option("--min-compute", fit.min_compute, "Ignore frontier points below this compute");
  fit_cmd->add_option("--grid-step", fit.grid_step, "Grid spacing for E")->capture_default_str();
  add_output_flags(fit_cmd, prefix, formats);

  auto *frontier_cmd = app.add_subcommand("frontier", "Print the compute-loss Pareto frontier");
  frontier_cmd->add_option("runs", frontier.runs_path, "Run-CSV file")->required();
  frontier_cmd->add_option("--min-compute", frontier.min_compute, "Compute cutoff");
  add_output_flags(frontier_cmd, prefix, formats);

  auto *ceg_cmd = app.add_subcommand("ceg", "Compute-equivalent gain of B over A");
  ceg_cmd->add_option("a", ceg.a_path, "Reference algorithm: run-CSV or fit file")->required();
  ceg_cmd->add_option("b", ceg.b_path, "New algorithm: run-CSV or fit file")->required();
  auto *threshold = ceg_cmd->add_option("--threshold", ceg.threshold, "Loss threshold (nats/token)");
  auto *at_compute = ceg_cmd->add_option("--at-compute", ceg.at_compute, "Evaluate f(C) at this compute");
  threshold->excludes(at_compute);
  ceg_cmd->add_option("--e-min", ceg.e_min, "Lower bound on E when fitting runs");
  ceg_cmd->add_option("--e-max", ceg.e_max, "Upper bound on E when fitting runs");
  ceg_cmd->add_option("--min-compute", ceg.min_compute, "Frontier compute cutoff when fitting runs");
  add_output_flags(ceg_cmd, prefix, formats);

  auto *alloc_cmd = app.add_subcommand("alloc", "Kaplan or compute-optimal allocation of a budget");
  alloc_cmd->add_option("--policy", alloc.policy, "kaplan or chinchilla")
      ->check(CLI::IsMember({"kaplan", "chinchilla"}))
      ->capture_default_str();
  alloc_cmd->add_option("--compute", alloc.compute, "Training compute (FLOPs)")->required();
  alloc_cmd->add_option("--E", alloc.surface.E, "Surface irreducible loss");
  alloc_cmd->add_option("--A", alloc.surface.A, "Surface parameter amplitude");
  alloc_cmd->add_option("--B", alloc.surface.B, "Surface data amplitude");
  alloc_cmd->add_option("--alpha", alloc.surface.alpha, "Surface parameter exponent");
  alloc_cmd->add_option("--beta", alloc.surface.beta, "Surface data exponent");
  alloc_cmd->add_option("--kaplan-cn", alloc.kaplan.cN, "Kaplan N coefficient");
  alloc_cmd->add_option("--kaplan-pn", alloc.kaplan.pN, "Kaplan N exponent");
  alloc_cmd->add_option("--kaplan-cd", alloc.kaplan.cD, "Kaplan D coefficient");
  alloc_cmd->add_option("--kaplan-pd", alloc.kaplan.pD, "Kaplan D exponent");
  add_output_flags(alloc_cmd, prefix, formats);

  auto *decompose_cmd = app.add_subcommand("decompose", "Evaluate an innovation stack over time");
  decompose_cmd->add_option("config", decompose.config_path, "Stack configuration (JSON)")->required();
  decompose_cmd->add_flag("!--no-groups", decompose.apply_groups, "Skip interaction rescaling");
  decompose_cmd->add_option("--report-year", decompose.report_years, "Also report cumulative at this year");
  add_timeline_flags(decompose_cmd, decompose.timeline);
  add_output_flags(decompose_cmd, prefix, formats);

  auto *timeline_cmd = app.add_subcommand("timeline", "Frontier compute and CEG growth rates by year");
  timeline_cmd->add_option("--config", timeline.config_path, "Stack configuration whose curves to track");
  timeline_cmd->add_option("--start", timeline.start_year, "First year")->capture_default_str();
  timeline_cmd->add_option("--end", timeline.end_year, "Last year")->capture_default_str();
  timeline_cmd->add_option("--step", timeline.step, "Year step")->capture_default_str();
  add_timeline_flags(timeline_cmd, timeline.timeline);
  add_output_flags(timeline_cmd, prefix, formats);

  auto *synth_cmd = app.add_subcommand("synth", "Synthesize run-CSV data from a loss surface");
  synth_cmd->add_option("spec", synth.spec_path, "Synthesis spec (JSON); defaults when omitted");
  synth_cmd->add_option("--out", synth_out, "Output run-CSV path (stdout when omitted)");
  synth_cmd->add_option("--seed", synth.seed, "PRNG seed");
  synth_cmd->add_option("--noise-sigma", synth.noise_sigma, "Lognormal noise on reduced loss");
  synth_cmd->add_option("--token-param-ratio", synth.token_param_ratio, "Final tokens per parameter");
  synth_cmd->add_option("--algorithm-id", synth.algorithm_id, "Label for the synthesized runs");

  const char *red = color ? "\033[31m" : "";
  const char *reset = color ? "\033[0m" : "";
  auto fail = [&](int code, const std::string &message) {
    err << red << "error:" << reset << ' ' << message << '\n';
    return code;
  };

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp &) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError &e) {
    return fail(kExitValidation, std::string(e.what()) + " (see --help)");
  }

  try {
    CommandResult result;
    if (synth_cmd->parsed()) {
      const RunSet runs = cmd_synth(synth);
      if (synth_out.empty()) {
        serialize_runs(runs, out);
      } else {
        write_text(synth_out, serialize_runs(runs));
        out << "wrote " << runs.runs.size() << " runs (" << runs.point_count() << " points) to "
            << synth_out << '\n';
      }
      return kExitOk;
    }
    if (fit_cmd->parsed()) {
      result = cmd_fit(fit);
      out << result.doc.to_text();
    } else if (frontier_cmd->parsed()) {
      result = cmd_frontier(frontier);
      out << table_csv(result.doc.tables.front());
    } else if (ceg_cmd->parsed()) {
      result = cmd_ceg(ceg);
      out << result.doc.to_text();
    } else if (alloc_cmd->parsed()) {
      result = cmd_alloc(alloc);
      out << result.doc.to_text();
    } else if (decompose_cmd->parsed()) {
      if (prefix.empty()) {
        prefix = "decomposition";
      }
      result = cmd_decompose(decompose);
      const ReportDocument &d = result.doc;
      out << "cumulative " << format_double(d.number("start_year")) << ": "
          << sig3(d.number("cumulative_start")) << "x\n"
          << "cumulative " << format_double(d.number("end_year")) << ": "
          << sig3(d.number("cumulative_end")) << "x\n";
      if (d.find("annualized_rate")) {
        out << "annualized: " << sig3(d.number("annualized_rate")) << "x/yr\n";
      }
      for (const double y : decompose.report_years) {
        out << "cumulative " << format_double(y) << ": "
            << sig3(d.number("cumulative_" + format_double(y))) << "x\n";
      }
    } else if (timeline_cmd->parsed()) {
      result = cmd_timeline(timeline);
      out << table_csv(result.doc.tables.front());
    }
    if (!prefix.empty()) {
      if (formats.empty()) {
        formats = {"csv", "json", "svg"};
      }
      for (const std::string &path : write_outputs(result, prefix, formats)) {
        err << "wrote " << path << '\n';
      }
    }
    return kExitOk;
  } catch (const IoError &e) {
    return fail(kExitIo, e.what());
  } catch (const Error &e) {
    return fail(kExitValidation, e.what());
  } catch (const std::exception &e) {
    return fail(kExitValidation, e.what());
  }
}

} // namespace ceglab::cli
