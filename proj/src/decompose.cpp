#include "ceglab/decompose.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include "ceglab/errors.hpp"
#include "ceglab/numeric.hpp"

namespace ceglab {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string &path, const std::string &what) {
  throw ValidationError(path + ": " + what);
}

const json &require_object(const json &j, const std::string &path) {
  if (!j.is_object()) {
    fail(path, "expected an object");
  }
  return j;
}

const json &require_field(const json &j, const char *key, const std::string &path) {
  require_object(j, path);
  auto it = j.find(key);
  if (it == j.end()) {
    fail(path + "." + key, "missing required field");
  }
  return *it;
}

double number_at(const json &j, const std::string &path) {
  if (!j.is_number()) {
    fail(path, "expected a number");
  }
  const double v = j.get<double>();
  if (!std::isfinite(v)) {
    fail(path, "expected a finite number");
  }
  return v;
}

double number_field(const json &j, const char *key, const std::string &path) {
  return number_at(require_field(j, key, path), path + "." + key);
}

double number_field_or(const json &j, const char *key, const std::string &path,
                       double fallback) {
  require_object(j, path);
  auto it = j.find(key);
  if (it == j.end()) {
    return fallback;
  }
  return number_at(*it, path + "." + key);
}

std::pair<double, double> pair_at(const json &j, const std::string &path) {
  if (!j.is_array() || j.size() != 2) {
    fail(path, "expected a [compute, multiplier] pair");
  }
  return {number_at(j[0], path + "[0]"), number_at(j[1], path + "[1]")};
}

// Rewraps library validation failures so the message names the config field.
template <typename F> auto at_path(const std::string &path, F &&build) {
  try {
    return build();
  } catch (const ValidationError &e) {
    throw ValidationError(path + ": " + e.what());
  }
}

} // namespace

std::vector<double> grid_years(const GridSpec &grid) {
  if (!(grid.step > 0.0)) {
    throw ValidationError("grid.step must be positive");
  }
  if (!(grid.end_year >= grid.start_year)) {
    throw ValidationError("grid.end_year must not precede grid.start_year");
  }
  std::vector<double> years;
  const double span = grid.end_year - grid.start_year;
  const auto count = static_cast<std::size_t>(std::floor(span / grid.step + 1e-9)) + 1;
  years.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    years.push_back(grid.start_year + static_cast<double>(k) * grid.step);
  }
  return years;
}

void validate(const StackConfig &cfg) {
  validate(cfg.timeline);
  std::set<std::string> names;
  for (std::size_t i = 0; i < cfg.innovations.size(); ++i) {
    const InnovationSpec &inn = cfg.innovations[i];
    const std::string path = "innovations[" + std::to_string(i) + "]";
    if (inn.name.empty()) {
      fail(path + ".name", "must be non-empty");
    }
    if (inn.name.find_first_of(",\r\n") != std::string::npos) {
      fail(path + ".name", "may not contain commas or newlines");
    }
    if (!names.insert(inn.name).second) {
      fail(path + ".name", "duplicate innovation name '" + inn.name + "'");
    }
    if (inn.group && !cfg.group_measured_joint.count(*inn.group)) {
      fail(path + ".group", "group '" + *inn.group + "' has no measured joint in groups");
    }
  }
  for (const auto &[label, joint] : cfg.group_measured_joint) {
    if (!(joint > 0.0) || !std::isfinite(joint)) {
      fail("groups." + label, "measured joint must be positive");
    }
  }
  if (cfg.grid.empty()) {
    fail("grid", "no evaluation years");
  }
}

StackConfig apply_interaction_groups(const StackConfig &cfg) {
  validate(cfg);
  StackConfig out = cfg;
  std::map<std::string, std::vector<std::size_t>> members;
  for (std::size_t i = 0; i < cfg.innovations.size(); ++i) {
    const InnovationSpec &inn = cfg.innovations[i];
    if (!inn.group) {
      continue;
    }
    if (!inn.curve.as<ConstantCeg>()) {
      throw ValidationError("innovations[" + std::to_string(i) + "] ('" + inn.name +
                            "'): only constant curves may join interaction group '" +
                            *inn.group + "', found " + inn.curve.kind());
    }
    members[*inn.group].push_back(i);
  }
  for (const auto &[label, indices] : members) {
    std::vector<double> values;
    values.reserve(indices.size());
    for (const std::size_t i : indices) {
      values.push_back(cfg.innovations[i].curve.as<ConstantCeg>()->multiplier);
    }
    std::vector<double> rescaled;
    try {
      rescaled = rescale_log_proportional(values, cfg.group_measured_joint.at(label));
    } catch (const DomainError &e) {
      throw DomainError("group '" + label + "': " + e.what());
    }
    for (std::size_t k = 0; k < indices.size(); ++k) {
      out.innovations[indices[k]].curve = CegCurve::constant(rescaled[k]);
    }
  }
  return out;
}

DecompositionReport evaluate_stack(const StackConfig &cfg) {
  validate(cfg);
  DecompositionReport report;
  for (const InnovationSpec &inn : cfg.innovations) {
    report.innovations.push_back(inn.name);
  }
  report.rows.reserve(cfg.grid.size());
  for (const double year : cfg.grid) {
    DecompositionRow row;
    row.year = year;
    row.compute = timeline_compute(cfg.timeline, year);
    row.multipliers.reserve(cfg.innovations.size());
    for (const InnovationSpec &inn : cfg.innovations) {
      if (inn.introduced_year && year < *inn.introduced_year) {
        row.multipliers.push_back(1.0);
        continue;
      }
      try {
        row.multipliers.push_back(ceg_eval(inn.curve, row.compute));
      } catch (const DomainError &e) {
        throw DomainError("innovation '" + inn.name + "' at year " + format_double(year) +
                          ": " + e.what());
      }
    }
    // Multiplying in sorted order makes the cumulative value independent of
    // the order innovations are listed in.
    std::vector<double> sorted = row.multipliers;
    std::sort(sorted.begin(), sorted.end());
    row.cumulative = 1.0;
    for (const double m : sorted) {
      row.cumulative *= m;
    }
    const double log_total = std::log(row.cumulative);
    if (std::fabs(log_total) > 1e-12) {
      std::vector<double> shares;
      shares.reserve(row.multipliers.size());
      for (const double m : row.multipliers) {
        shares.push_back(std::log(m) / log_total);
      }
      row.shares = std::move(shares);
    }
    report.rows.push_back(std::move(row));
  }
  return report;
}

const DecompositionRow &row_at_year(const DecompositionReport &report,
                                    const ComputeTimeline &timeline, double year) {
  const double target = timeline_compute(timeline, year);
  for (const DecompositionRow &row : report.rows) {
    if (std::fabs(row.compute / target - 1.0) < 1e-9) {
      return row;
    }
  }
  throw DomainError("decomposition grid does not cover year " + format_double(year) +
                    " (compute " + format_double(target) + ")");
}

double annualized_total(const DecompositionReport &report, const ComputeTimeline &timeline,
                        double y0, double y1) {
  if (!(y1 > y0)) {
    throw ValidationError("annualized_total: y1 must exceed y0");
  }
  const DecompositionRow &start = row_at_year(report, timeline, y0);
  const DecompositionRow &end = row_at_year(report, timeline, y1);
  return std::pow(end.cumulative / start.cumulative, 1.0 / (y1 - y0));
}

LossSurface surface_from_json(const json &j, const std::string &path) {
  require_object(j, path);
  const LossSurface d = LossSurface::chinchilla();
  LossSurface s;
  s.E = number_field_or(j, "E", path, d.E);
  s.A = number_field_or(j, "A", path, d.A);
  s.B = number_field_or(j, "B", path, d.B);
  s.alpha = number_field_or(j, "alpha", path, d.alpha);
  s.beta = number_field_or(j, "beta", path, d.beta);
  at_path(path, [&] {
    validate(s);
    return 0;
  });
  return s;
}

KaplanFixed kaplan_from_json(const json &j, const std::string &path) {
  require_object(j, path);
  const KaplanFixed d;
  KaplanFixed k;
  k.cN = number_field_or(j, "cN", path, d.cN);
  k.pN = number_field_or(j, "pN", path, d.pN);
  k.cD = number_field_or(j, "cD", path, d.cD);
  k.pD = number_field_or(j, "pD", path, d.pD);
  at_path(path, [&] {
    validate(k);
    return 0;
  });
  return k;
}

ComputeTimeline timeline_from_json(const json &j, const std::string &path) {
  require_object(j, path);
  ComputeTimeline tl = ComputeTimeline::frontier_2025();
  if (auto it = j.find("preset"); it != j.end()) {
    if (!it->is_string()) {
      fail(path + ".preset", "expected a string");
    }
    const std::string preset = it->get<std::string>();
    if (preset == "frontier_2025") {
      tl = ComputeTimeline::frontier_2025();
    } else if (preset == "frontier_2023") {
      tl = ComputeTimeline::frontier_2023();
    } else {
      fail(path + ".preset", "unknown preset '" + preset +
                                 "' (expected frontier_2025 or frontier_2023)");
    }
  }
  tl.anchor_year = number_field_or(j, "anchor_year", path, tl.anchor_year);
  tl.anchor_compute = number_field_or(j, "anchor_compute", path, tl.anchor_compute);
  tl.annual_factor = number_field_or(j, "annual_factor", path, tl.annual_factor);
  at_path(path, [&] {
    validate(tl);
    return 0;
  });
  return tl;
}

CegCurve curve_from_json(const json &j, const std::string &path) {
  const json &kind_j = require_field(j, "kind", path);
  if (!kind_j.is_string()) {
    fail(path + ".kind", "expected a string");
  }
  const std::string kind = kind_j.get<std::string>();
  static const json kEmpty = json::object();
  const auto params_it = j.find("params");
  const json &params = params_it == j.end() ? kEmpty : *params_it;
  const std::string pp = path + ".params";
  require_object(params, pp);

  if (kind == "constant") {
    const double m = number_field(params, "multiplier", pp);
    return at_path(pp + ".multiplier", [&] { return CegCurve::constant(m); });
  }
  if (kind == "power_law") {
    if (auto it = params.find("calibrate"); it != params.end()) {
      const std::string cp = pp + ".calibrate";
      if (!it->is_array() || it->size() != 2) {
        fail(cp, "expected two [compute, multiplier] points");
      }
      const auto p1 = pair_at((*it)[0], cp + "[0]");
      const auto p2 = pair_at((*it)[1], cp + "[1]");
      return at_path(cp, [&] { return calibrate_power_ceg(p1, p2); });
    }
    const double k = number_field(params, "k", pp);
    const double delta = number_field(params, "delta", pp);
    return at_path(pp, [&] { return CegCurve::power_law(k, delta); });
  }
  if (kind == "kaplan_chinchilla") {
    LossSurface s = LossSurface::chinchilla();
    KaplanFixed k;
    if (auto it = params.find("surface"); it != params.end()) {
      s = surface_from_json(*it, pp + ".surface");
    }
    if (auto it = params.find("kaplan"); it != params.end()) {
      k = kaplan_from_json(*it, pp + ".kaplan");
    }
    return CegCurve::kaplan_chinchilla(s, k);
  }
  if (kind == "tabulated") {
    const json &pts = require_field(params, "points", pp);
    if (!pts.is_array()) {
      fail(pp + ".points", "expected an array");
    }
    std::vector<std::pair<double, double>> points;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      points.push_back(pair_at(pts[i], pp + ".points[" + std::to_string(i) + "]"));
    }
    return at_path(pp + ".points", [&] { return CegCurve::tabulated(std::move(points)); });
  }
  if (kind == "product") {
    const json &factors = require_field(params, "factors", pp);
    if (!factors.is_array() || factors.empty()) {
      fail(pp + ".factors", "expected a non-empty array of curves");
    }
    std::vector<CegCurve> curves;
    for (std::size_t i = 0; i < factors.size(); ++i) {
      curves.push_back(curve_from_json(factors[i], pp + ".factors[" + std::to_string(i) + "]"));
    }
    return CegCurve::product(std::move(curves));
  }
  if (kind == "quotient") {
    CegCurve num = curve_from_json(require_field(params, "numerator", pp), pp + ".numerator");
    CegCurve den =
        curve_from_json(require_field(params, "denominator", pp), pp + ".denominator");
    return CegCurve::quotient(std::move(num), std::move(den));
  }
  fail(path + ".kind", "unknown curve kind '" + kind +
                           "' (expected constant, power_law, kaplan_chinchilla, tabulated, "
                           "product or quotient)");
}

json curve_to_json(const CegCurve &curve) {
  json out;
  out["kind"] = curve.kind();
  json params = json::object();
  if (const auto *c = curve.as<ConstantCeg>()) {
    params["multiplier"] = c->multiplier;
  } else if (const auto *p = curve.as<PowerLawCeg>()) {
    params["k"] = p->k;
    params["delta"] = p->delta;
  } else if (const auto *kc = curve.as<KaplanChinchillaCeg>()) {
    params["surface"] = {{"E", kc->surface.E},         {"A", kc->surface.A},
                         {"B", kc->surface.B},         {"alpha", kc->surface.alpha},
                         {"beta", kc->surface.beta}};
    params["kaplan"] = {
        {"cN", kc->kaplan.cN}, {"pN", kc->kaplan.pN}, {"cD", kc->kaplan.cD}, {"pD", kc->kaplan.pD}};
  } else if (const auto *t = curve.as<TabulatedCeg>()) {
    json pts = json::array();
    for (const auto &[c, m] : t->points) {
      pts.push_back({c, m});
    }
    params["points"] = pts;
  } else if (const auto *pr = curve.as<ProductCeg>()) {
    json factors = json::array();
    for (const CegCurve &f : pr->factors) {
      factors.push_back(curve_to_json(f));
    }
    params["factors"] = factors;
  } else if (const auto *q = curve.as<QuotientCeg>()) {
    params["numerator"] = curve_to_json(*q->numerator);
    params["denominator"] = curve_to_json(*q->denominator);
  }
  out["params"] = params;
  return out;
}

StackConfig stack_config_from_json(const json &j) {
  require_object(j, "$");
  StackConfig cfg;
  if (auto it = j.find("timeline"); it != j.end()) {
    cfg.timeline = timeline_from_json(*it, "timeline");
  }
  GridSpec grid;
  if (auto it = j.find("grid"); it != j.end()) {
    require_object(*it, "grid");
    grid.start_year = number_field_or(*it, "start_year", "grid", grid.start_year);
    grid.end_year = number_field_or(*it, "end_year", "grid", grid.end_year);
    grid.step = number_field_or(*it, "step", "grid", grid.step);
  }
  cfg.grid = at_path("grid", [&] { return grid_years(grid); });

  if (auto it = j.find("groups"); it != j.end()) {
    require_object(*it, "groups");
    for (const auto &[label, value] : it->items()) {
      cfg.group_measured_joint[label] = number_at(value, "groups." + label);
    }
  }

  const json &innovations = require_field(j, "innovations", "$");
  if (!innovations.is_array()) {
    fail("innovations", "expected an array");
  }
  for (std::size_t i = 0; i < innovations.size(); ++i) {
    const std::string path = "innovations[" + std::to_string(i) + "]";
    const json &entry = innovations[i];
    require_object(entry, path);
    InnovationSpec inn;
    const json &name = require_field(entry, "name", path);
    if (!name.is_string()) {
      fail(path + ".name", "expected a string");
    }
    inn.name = name.get<std::string>();
    inn.curve = curve_from_json(entry, path);
    if (auto g = entry.find("group"); g != entry.end() && !g->is_null()) {
      if (!g->is_string()) {
        fail(path + ".group", "expected a string");
      }
      inn.group = g->get<std::string>();
    }
    if (auto y = entry.find("introduced_year"); y != entry.end() && !y->is_null()) {
      inn.introduced_year = number_at(*y, path + ".introduced_year");
    }
    cfg.innovations.push_back(std::move(inn));
  }
  validate(cfg);
  return cfg;
}

StackConfig read_stack_config(const std::string &path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open configuration '" + path + "'");
  }
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error &e) {
    throw ValidationError(path + ": invalid JSON: " + e.what());
  }
  return stack_config_from_json(j);
}

} // namespace ceglab
