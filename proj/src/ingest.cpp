#include "ceglab/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <random>
#include <sstream>
#include <utility>

#include "ceglab/errors.hpp"
#include "ceglab/numeric.hpp"

namespace ceglab {

namespace {

constexpr std::size_t kColumns = 7;

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

double parse_positive(std::string_view field, std::string_view name, std::size_t line) {
  const auto value = parse_double(trim(field));
  if (!value) {
    throw ParseError(line, std::string(name) + ": not a number: '" + std::string(field) + "'");
  }
  if (!(*value > 0.0)) {
    throw ParseError(line, std::string(name) + " must be positive");
  }
  return *value;
}

std::int64_t parse_count(std::string_view field, std::string_view name, std::size_t line) {
  const auto value = parse_double(trim(field));
  if (!value || *value != std::floor(*value) || std::fabs(*value) > 9.0e15) {
    throw ParseError(line, std::string(name) + ": not an integer: '" + std::string(field) + "'");
  }
  return static_cast<std::int64_t>(*value);
}

struct PendingPoint {
  RunPoint point;
  std::size_t line;
};

struct PendingRun {
  TrainingRun run;
  std::size_t first_line = 0;
  std::vector<PendingPoint> points;
};

void check_label(const std::string &label, const std::string &context) {
  if (label.empty()) {
    throw ValidationError(context + ": algorithm_id must be non-empty");
  }
  if (label.find_first_of(",\r\n") != std::string::npos) {
    throw ValidationError(context + ": algorithm_id may not contain commas or newlines");
  }
}

} // namespace

std::size_t RunSet::point_count() const {
  std::size_t n = 0;
  for (const auto &run : runs) {
    n += run.points.size();
  }
  return n;
}

void validate(const RunSet &rs) {
  for (std::size_t r = 0; r < rs.runs.size(); ++r) {
    const TrainingRun &run = rs.runs[r];
    const std::string context = "run " + std::to_string(r) + " ('" + run.algorithm_id + "')";
    check_label(run.algorithm_id, context);
    if (!(run.params > 0.0)) {
      throw ValidationError(context + ": params must be positive");
    }
    if (run.points.empty()) {
      throw ValidationError(context + ": no points");
    }
    for (std::size_t i = 0; i < run.points.size(); ++i) {
      const RunPoint &p = run.points[i];
      if (!(p.flops > 0.0) || !(p.tokens_seen > 0.0) || !(p.val_loss > 0.0)) {
        throw ValidationError(context + ": point " + std::to_string(i) +
                              " has a non-positive field");
      }
      if (i > 0) {
        const RunPoint &q = run.points[i - 1];
        if (!(p.step > q.step) || !(p.tokens_seen > q.tokens_seen) || !(p.flops > q.flops)) {
          throw ValidationError(context + ": step, tokens_seen and flops must be strictly "
                                          "increasing (point " +
                                std::to_string(i) + ")");
        }
      }
    }
  }
}

RunSet parse_runs(std::istream &in, std::string source) {
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (!have_header && std::getline(in, line)) {
    ++line_no;
    std::string_view view = trim(line);
    if (line_no == 1 && view.substr(0, 3) == "\xEF\xBB\xBF") {
      view.remove_prefix(3);
    }
    if (view.empty()) {
      continue;
    }
    if (view != kRunCsvHeader) {
      throw ParseError(line_no, "expected header '" + std::string(kRunCsvHeader) + "'");
    }
    have_header = true;
  }
  if (!have_header) {
    throw ParseError(line_no == 0 ? 1 : line_no, "empty input: missing run-CSV header");
  }

  std::vector<PendingRun> pending;
  std::map<std::pair<std::string, double>, std::size_t> index;

  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view view = trim(line);
    if (view.empty()) {
      continue;
    }
    const auto fields = split_fields(view);
    if (fields.size() != kColumns) {
      throw ParseError(line_no, "expected " + std::to_string(kColumns) + " fields, found " +
                                    std::to_string(fields.size()));
    }
    const std::string label(trim(fields[0]));
    if (label.empty()) {
      throw ParseError(line_no, "algorithm_id is empty");
    }
    std::optional<std::int64_t> hidden_dim;
    if (!trim(fields[1]).empty()) {
      hidden_dim = parse_count(fields[1], "hidden_dim", line_no);
      if (*hidden_dim <= 0) {
        throw ParseError(line_no, "hidden_dim must be positive");
      }
    }
    const double params = parse_positive(fields[2], "params", line_no);
    RunPoint point;
    point.step = parse_count(fields[3], "step", line_no);
    point.tokens_seen = parse_positive(fields[4], "tokens_seen", line_no);
    point.flops = parse_positive(fields[5], "flops", line_no);
    point.val_loss = parse_positive(fields[6], "val_loss", line_no);

    const auto key = std::make_pair(label, params);
    auto it = index.find(key);
    if (it == index.end()) {
      it = index.emplace(key, pending.size()).first;
      PendingRun run;
      run.run.algorithm_id = label;
      run.run.params = params;
      run.run.hidden_dim = hidden_dim;
      run.first_line = line_no;
      pending.push_back(std::move(run));
    }
    PendingRun &run = pending[it->second];
    if (run.run.hidden_dim != hidden_dim) {
      throw ParseError(line_no, "hidden_dim differs from earlier rows of the same run (line " +
                                    std::to_string(run.first_line) + ")");
    }
    run.points.push_back({point, line_no});
  }

  RunSet rs;
  rs.source = std::move(source);
  rs.runs.reserve(pending.size());
  for (PendingRun &run : pending) {
    std::stable_sort(run.points.begin(), run.points.end(),
                     [](const PendingPoint &a, const PendingPoint &b) {
                       return a.point.step < b.point.step;
                     });
    for (std::size_t i = 1; i < run.points.size(); ++i) {
      const PendingPoint &prev = run.points[i - 1];
      const PendingPoint &cur = run.points[i];
      if (cur.point.step == prev.point.step) {
        throw ParseError(cur.line, "duplicate step " + std::to_string(cur.point.step) +
                                       " for run '" + run.run.algorithm_id + "' (also line " +
                                       std::to_string(prev.line) + ")");
      }
      if (!(cur.point.flops > prev.point.flops)) {
        throw ParseError(cur.line, "flops not strictly increasing within run '" +
                                       run.run.algorithm_id + "' (previous step on line " +
                                       std::to_string(prev.line) + ")");
      }
      if (!(cur.point.tokens_seen > prev.point.tokens_seen)) {
        throw ParseError(cur.line, "tokens_seen not strictly increasing within run '" +
                                       run.run.algorithm_id + "' (previous step on line " +
                                       std::to_string(prev.line) + ")");
      }
    }
    run.run.points.reserve(run.points.size());
    for (const PendingPoint &p : run.points) {
      run.run.points.push_back(p.point);
    }
    rs.runs.push_back(std::move(run.run));
  }
  return rs;
}

RunSet parse_runs(std::string_view text, std::string source) {
  std::istringstream in{std::string(text)};
  return parse_runs(in, std::move(source));
}

RunSet read_runs_file(const std::string &path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open run file '" + path + "'");
  }
  return parse_runs(in, path);
}

void serialize_runs(const RunSet &rs, std::ostream &out) {
  out << kRunCsvHeader << '\n';
  for (const TrainingRun &run : rs.runs) {
    const std::string hidden = run.hidden_dim ? std::to_string(*run.hidden_dim) : "";
    const std::string params = format_double(run.params);
    for (const RunPoint &p : run.points) {
      out << run.algorithm_id << ',' << hidden << ',' << params << ',' << p.step << ','
          << format_double(p.tokens_seen) << ',' << format_double(p.flops) << ','
          << format_double(p.val_loss) << '\n';
    }
  }
}

std::string serialize_runs(const RunSet &rs) {
  std::ostringstream out;
  serialize_runs(rs, out);
  return out.str();
}

SynthSpec SynthSpec::defaults() {
  SynthSpec spec;
  spec.model_sizes = log_space(1e6, 1e8, 8);
  return spec;
}

void validate(const SynthSpec &spec) {
  check_label(spec.algorithm_id, "synth spec");
  validate(spec.surface);
  if (const auto *k = std::get_if<KaplanFixed>(&spec.policy)) {
    validate(*k);
  } else {
    validate(std::get<ChinchillaOptimal>(spec.policy).surface);
  }
  if (spec.model_sizes.empty()) {
    throw ValidationError("synth spec: model_sizes is empty");
  }
  for (std::size_t i = 0; i < spec.model_sizes.size(); ++i) {
    if (!(spec.model_sizes[i] > 0.0)) {
      throw ValidationError("synth spec: model_sizes[" + std::to_string(i) + "] must be positive");
    }
    if (i > 0 && !(spec.model_sizes[i] > spec.model_sizes[i - 1])) {
      throw ValidationError("synth spec: model_sizes must be strictly increasing");
    }
  }
  if (!(spec.token_param_ratio > 0.0)) {
    throw ValidationError("synth spec: token_param_ratio must be positive");
  }
  if (!(spec.noise_sigma >= 0.0) || !std::isfinite(spec.noise_sigma)) {
    throw ValidationError("synth spec: noise_sigma must be non-negative");
  }
  if (spec.points_per_run < 2) {
    throw ValidationError("synth spec: points_per_run must be at least 2");
  }
  if (!(spec.token_span > 1.0)) {
    throw ValidationError("synth spec: token_span must exceed 1");
  }
}

RunSet synthesize_runs(const SynthSpec &spec) {
  validate(spec);
  const LossSurface &s = spec.surface;
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> noise(0.0, spec.noise_sigma > 0.0 ? spec.noise_sigma : 1.0);

  RunSet rs;
  rs.source = "synthetic(seed=" + std::to_string(spec.seed) + ")";
  for (const double n : spec.model_sizes) {
    TrainingRun run;
    run.algorithm_id = spec.algorithm_id;
    run.params = n;
    const double final_tokens = spec.token_param_ratio * n;
    const auto tokens = log_space(final_tokens / spec.token_span, final_tokens,
                                  spec.points_per_run);
    const double param_term = s.A / std::pow(n, s.alpha);
    run.points.reserve(tokens.size());
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      double reduced = param_term + s.B / std::pow(tokens[i], s.beta);
      if (spec.noise_sigma > 0.0) {
        reduced *= std::exp(noise(rng));
      }
      RunPoint p;
      p.step = static_cast<std::int64_t>(i + 1);
      p.tokens_seen = tokens[i];
      p.flops = 6.0 * n * tokens[i];
      p.val_loss = s.E + reduced;
      run.points.push_back(p);
    }
    rs.runs.push_back(std::move(run));
  }
  return rs;
}

} // namespace ceglab
