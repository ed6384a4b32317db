#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "floquet/cli.hpp"
#include "json.hpp"

namespace floquet::cli {

std::string preset_potential(std::string_view name, double v0) {
  if (name == "free") return "0";
  if (name == "mathieu") return "cos(2*x)";
  if (name == "pt-lattice") return fmt::format("cos(2*x)+{}i*sin(2*x)", v0);
  if (name == "pt-exp") return "exp(2*i*x)";
  throw ConfigError("unknown preset '" + std::string(name) + "' (expected free, mathieu, pt-lattice or pt-exp)");
}

std::string RunConfig::potential_text() const {
  if (!potential.empty()) return potential;
  if (!preset.empty()) return preset_potential(preset, v0);
  throw ConfigError("no potential given: use --potential or --preset");
}

void RunConfig::validate() const {
  if (!(e_min < e_max)) throw ConfigError(fmt::format("energy range {}:{} is empty", e_min, e_max));
  if (n_samples < 2) throw ConfigError("n_samples must be >= 2");
  if (steps_per_period < 16 || steps_per_period % 2 != 0) throw ConfigError("steps_per_period must be even and >= 16");
  if (hill_N < 1) throw ConfigError("hill_N must be >= 1");
  if (!(tol_identity > 0.0) || !(tol_root > 0.0) || !(merge_tol > 0.0)) {
    throw ConfigError("tolerances must be positive");
  }
  if (!preset.empty()) preset_potential(preset, v0);
}

namespace {

OutputFormat parse_format(const std::string& s) {
  if (s == "csv") return OutputFormat::Csv;
  if (s == "json") return OutputFormat::Json;
  throw ConfigError("output format must be csv or json, got '" + s + "'");
}

}  // namespace

void apply_config_json(std::string_view json_text, RunConfig& cfg) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("config file is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config file must hold a JSON object");
  try {
    for (auto it = j.begin(); it != j.end(); ++it) {
      const std::string& key = it.key();
      const nlohmann::json& v = it.value();
      if (key == "potential") cfg.potential = v.get<std::string>();
      else if (key == "preset") cfg.preset = v.get<std::string>();
      else if (key == "v0") cfg.v0 = v.get<double>();
      else if (key == "e_min") cfg.e_min = v.get<double>();
      else if (key == "e_max") cfg.e_max = v.get<double>();
      else if (key == "n_samples") cfg.n_samples = v.get<int>();
      else if (key == "steps_per_period") cfg.steps_per_period = v.get<int>();
      else if (key == "hill_N") cfg.hill_N = v.get<int>();
      else if (key == "tol_identity") cfg.tol_identity = v.get<double>();
      else if (key == "tol_root") cfg.tol_root = v.get<double>();
      else if (key == "merge_tol") cfg.merge_tol = v.get<double>();
      else if (key == "output_format") cfg.output_format = parse_format(v.get<std::string>());
      else if (key == "output_path") cfg.output_path = v.get<std::string>();
      else throw ConfigError("unknown config key '" + key + "'");
    }
  } catch (const nlohmann::json::type_error& e) {
    throw ConfigError(std::string("config value has the wrong type: ") + e.what());
  }
}

void apply_config_file(const std::string& path, RunConfig& cfg) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  apply_config_json(buf.str(), cfg);
}

void parse_energy_range(std::string_view text, double& e_min, double& e_max) {
  const auto colon = text.find(':');
  const auto bad = [&] { return ConfigError("energy range must look like a:b, got '" + std::string(text) + "'"); };
  if (colon == std::string_view::npos) throw bad();
  const auto parse = [&](std::string_view part, double& value) {
    if (!part.empty() && part.front() == '+') part.remove_prefix(1);
    const auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), value);
    if (part.empty() || ec != std::errc() || ptr != part.data() + part.size()) throw bad();
  };
  parse(text.substr(0, colon), e_min);
  parse(text.substr(colon + 1), e_max);
}

unsigned threads_from_env() {
  const char* v = std::getenv("FLOQUET_BANDS_THREADS");
  if (v == nullptr || *v == '\0') return 0;
  unsigned n = 0;
  const std::string_view s(v);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), n);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ConfigError("FLOQUET_BANDS_THREADS must be a non-negative integer");
  }
  return n;
}

}  // namespace floquet::cli
