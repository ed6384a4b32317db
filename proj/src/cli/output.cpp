#include "output.hpp"

#include <filesystem>
#include <fstream>
#include <ostream>

#include <fmt/format.h>

namespace floquet::cli {

namespace {

std::string cell(const ojson& v) {
  if (v.is_null()) return {};
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number_integer()) return fmt::format("{}", v.get<long long>());
  if (v.is_number()) return fmt::format("{}", v.get<double>());
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

std::ofstream open_for_write(const std::string& path) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw ConfigError("cannot write output file '" + path + "'");
  return f;
}

}  // namespace

void write_csv(std::ostream& os, const Table& table) {
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    if (c) os << ',';
    os << table.columns[c];
  }
  os << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
      if (c) os << ',';
      const auto it = row.find(table.columns[c]);
      if (it != row.end()) os << cell(*it);
    }
    os << '\n';
  }
}

std::string derived_path(const std::string& path, const std::string& name) {
  const std::filesystem::path p(path);
  std::filesystem::path out = p.parent_path() / p.stem();
  out += "." + name;
  out += p.extension();
  return out.string();
}

void emit(const RunConfig& cfg, const ojson& header, const std::vector<Table>& tables, std::ostream& out) {
  if (cfg.output_format == OutputFormat::Json) {
    ojson doc = header;
    for (const auto& t : tables) doc[t.name] = t.rows;
    const std::string text = doc.dump(2) + "\n";
    if (cfg.output_path.empty()) {
      out << text;
    } else {
      auto f = open_for_write(cfg.output_path);
      f << text;
    }
    return;
  }
  for (std::size_t i = 0; i < tables.size(); ++i) {
    if (cfg.output_path.empty()) {
      if (i) out << '\n';
      write_csv(out, tables[i]);
    } else {
      auto f = open_for_write(i == 0 ? cfg.output_path : derived_path(cfg.output_path, tables[i].name));
      write_csv(f, tables[i]);
    }
  }
}

}  // namespace floquet::cli
