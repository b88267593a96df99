#pragma once

#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

namespace ceglab {

enum class ReportKind { fit, frontier, ceg, allocation, decomposition, timeline };

std::string to_string(ReportKind kind);

using ReportValue = std::variant<double, std::string, bool>;

// Rectangular numeric table; empty cells are undefined values.
struct ReportTable {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<std::optional<double>>> rows;
};

// One command's result: headline fields plus zero or more tables. JSON holds
// everything; CSV holds either the fields ("key,value") or one table.
struct ReportDocument {
  ReportKind kind = ReportKind::fit;
  std::vector<std::pair<std::string, ReportValue>> fields;
  std::vector<ReportTable> tables;

  void add(std::string key, ReportValue value);
  const ReportValue *find(const std::string &key) const;
  double number(const std::string &key) const;

  nlohmann::json to_json() const;
  std::string fields_csv() const;
  std::string to_text() const; // `key=value` lines
};

std::string table_csv(const ReportTable &table);

} // namespace ceglab
