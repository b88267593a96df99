#include "ceglab/report.hpp"

#include <sstream>

#include "ceglab/errors.hpp"
#include "ceglab/numeric.hpp"

namespace ceglab {

std::string to_string(ReportKind kind) {
  switch (kind) {
  case ReportKind::fit:
    return "fit";
  case ReportKind::frontier:
    return "frontier";
  case ReportKind::ceg:
    return "ceg";
  case ReportKind::allocation:
    return "allocation";
  case ReportKind::decomposition:
    return "decomposition";
  case ReportKind::timeline:
    return "timeline";
  }
  return "unknown";
}

namespace {

std::string value_text(const ReportValue &v) {
  if (const auto *d = std::get_if<double>(&v)) {
    return format_double(*d);
  }
  if (const auto *b = std::get_if<bool>(&v)) {
    return *b ? "true" : "false";
  }
  return std::get<std::string>(v);
}

// Quote a CSV cell when it contains a delimiter, quote or line break.
std::string csv_cell(const std::string &text) {
  if (text.find_first_of(",\"\r\n") == std::string::npos) {
    return text;
  }
  std::string out = "\"";
  for (const char c : text) {
    out += c;
    if (c == '"') {
      out += '"';
    }
  }
  return out + '"';
}

} // namespace

void ReportDocument::add(std::string key, ReportValue value) {
  fields.emplace_back(std::move(key), std::move(value));
}

const ReportValue *ReportDocument::find(const std::string &key) const {
  for (const auto &[k, v] : fields) {
    if (k == key) {
      return &v;
    }
  }
  return nullptr;
}

double ReportDocument::number(const std::string &key) const {
  const ReportValue *v = find(key);
  if (v == nullptr || !std::holds_alternative<double>(*v)) {
    throw std::out_of_range("report has no numeric field '" + key + "'");
  }
  return std::get<double>(*v);
}

nlohmann::json ReportDocument::to_json() const {
  nlohmann::json out;
  out["kind"] = to_string(kind);
  nlohmann::json f = nlohmann::json::object();
  for (const auto &[k, v] : fields) {
    std::visit([&](const auto &x) { f[k] = x; }, v);
  }
  out["fields"] = f;
  nlohmann::json tables_j = nlohmann::json::object();
  for (const ReportTable &t : tables) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto &row : t.rows) {
      nlohmann::json r = nlohmann::json::array();
      for (const auto &cell : row) {
        if (cell) {
          r.push_back(*cell);
        } else {
          r.push_back(nullptr);
        }
      }
      rows.push_back(std::move(r));
    }
    tables_j[t.name] = {{"columns", t.columns}, {"rows", rows}};
  }
  out["tables"] = tables_j;
  return out;
}

std::string ReportDocument::fields_csv() const {
  std::ostringstream out;
  out << "key,value\n";
  for (const auto &[k, v] : fields) {
    out << csv_cell(k) << ',' << csv_cell(value_text(v)) << '\n';
  }
  return out.str();
}

std::string ReportDocument::to_text() const {
  std::ostringstream out;
  for (const auto &[k, v] : fields) {
    out << k << '=' << value_text(v) << '\n';
  }
  return out.str();
}

std::string table_csv(const ReportTable &table) {
  std::ostringstream out;
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    out << (i ? "," : "") << csv_cell(table.columns[i]);
  }
  out << '\n';
  for (const auto &row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) {
        out << ',';
      }
      if (row[i]) {
        out << format_double(*row[i]);
      }
    }
    out << '\n';
  }
  return out.str();
}

} // namespace ceglab
