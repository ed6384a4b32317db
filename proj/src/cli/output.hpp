#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "floquet/cli.hpp"
#include "json.hpp"

namespace floquet::cli {

using ojson = nlohmann::ordered_json;

/// Rows are JSON objects whose keys follow `columns`.
struct Table {
  std::string name;
  std::vector<std::string> columns;
  ojson rows = ojson::array();
};

void write_csv(std::ostream& os, const Table& table);

/// CSV: the first table goes to cfg.output_path (or stdout), further tables
/// to "<stem>.<name><ext>" next to it (or stdout after a blank line).
/// JSON: one document holding `header` fields plus one array per table.
void emit(const RunConfig& cfg, const ojson& header, const std::vector<Table>& tables, std::ostream& out);

std::string derived_path(const std::string& path, const std::string& name);

}  // namespace floquet::cli
