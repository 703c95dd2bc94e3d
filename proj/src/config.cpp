#include "panelshock/config.hpp"

#include <algorithm>
#include <sstream>

#include "panelshock/csv.hpp"
#include "panelshock/errors.hpp"

namespace panelshock {

namespace {

std::string trim(const std::string& s) {
  const size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::string unquote(const std::string& s) {
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') return s.substr(1, s.size() - 2);
  return s;
}

}  // namespace

ConfigFile ConfigFile::parse(const std::string& text, const std::string& origin) {
  ConfigFile out;
  out.origin_ = origin;
  std::istringstream in(text);
  std::string line, section;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::string where = origin + ":" + std::to_string(line_no);
    if (line.front() == '[') {
      if (line.back() != ']') fail(ErrorCategory::ConfigError, where + ": unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty()) fail(ErrorCategory::ConfigError, where + ": empty section name");
      out.values_.try_emplace(section);
      continue;
    }
    const size_t eq = line.find('=');
    if (eq == std::string::npos) fail(ErrorCategory::ConfigError, where + ": expected key = value");
    if (section.empty()) fail(ErrorCategory::ConfigError, where + ": key outside any [section]");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = unquote(trim(line.substr(eq + 1)));
    if (key.empty()) fail(ErrorCategory::ConfigError, where + ": empty key");
    if (!out.values_[section].emplace(key, value).second)
      fail(ErrorCategory::ConfigError, where + ": duplicate key '" + key + "'");
  }
  return out;
}

ConfigFile ConfigFile::load(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path))
    fail(ErrorCategory::ConfigError, "config file not found: " + path.string());
  return parse(read_text_file(path), path.string());
}

bool ConfigFile::has(const std::string& section, const std::string& key) const {
  const auto s = values_.find(section);
  return s != values_.end() && s->second.count(key) > 0;
}

std::string ConfigFile::require(const std::string& section, const std::string& key) const {
  if (!has(section, key))
    fail(ErrorCategory::ConfigError, origin_ + ": missing required [" + section + "] " + key);
  consumed_.insert(section + "." + key);
  return values_.at(section).at(key);
}

std::string ConfigFile::get(const std::string& section, const std::string& key,
                            const std::string& fallback) const {
  if (!has(section, key)) return fallback;
  consumed_.insert(section + "." + key);
  return values_.at(section).at(key);
}

double ConfigFile::get_double(const std::string& section, const std::string& key, double fallback) const {
  if (!has(section, key)) return fallback;
  return parse_double(get(section, key, ""), origin_ + " [" + section + "] " + key);
}

int ConfigFile::get_int(const std::string& section, const std::string& key, int fallback) const {
  if (!has(section, key)) return fallback;
  return static_cast<int>(parse_long(get(section, key, ""), origin_ + " [" + section + "] " + key));
}

std::uint64_t ConfigFile::get_u64(const std::string& section, const std::string& key,
                                  std::uint64_t fallback) const {
  if (!has(section, key)) return fallback;
  const std::string text = get(section, key, "");
  try {
    return std::stoull(text);
  } catch (const std::exception&) {
    fail(ErrorCategory::ConfigError, origin_ + " [" + section + "] " + key + ": not an unsigned integer");
  }
}

bool ConfigFile::get_bool(const std::string& section, const std::string& key, bool fallback) const {
  if (!has(section, key)) return fallback;
  const std::string text = get(section, key, "");
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  fail(ErrorCategory::ConfigError, origin_ + " [" + section + "] " + key + ": expected true/false");
}

std::vector<std::string> ConfigFile::get_list(const std::string& section, const std::string& key) const {
  std::vector<std::string> out;
  if (!has(section, key)) return out;
  std::istringstream in(get(section, key, ""));
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(unquote(item));
  }
  return out;
}

void ConfigFile::ensure_consumed() const {
  for (const auto& [section, keys] : values_)
    for (const auto& [key, value] : keys)
      if (!consumed_.count(section + "." + key))
        fail(ErrorCategory::ConfigError, origin_ + ": unknown key [" + section + "] " + key);
}

const char* to_string(ShockVariant v) {
  switch (v) {
    case ShockVariant::mp: return "MP";
    case ShockVariant::id: return "ID";
    case ShockVariant::total: return "total";
    case ShockVariant::poor_man_mp: return "poor_man_mp";
    case ShockVariant::poor_man_id: return "poor_man_id";
  }
  return "?";
}

ShockVariant parse_variant(const std::string& text) {
  for (ShockVariant v : all_variants())
    if (text == to_string(v)) return v;
  fail(ErrorCategory::ConfigError, "unknown shock variant '" + text + "'");
}

std::vector<ShockVariant> all_variants() {
  return {ShockVariant::mp, ShockVariant::id, ShockVariant::total, ShockVariant::poor_man_mp,
          ShockVariant::poor_man_id};
}

DgpSpec LabConfig::to_dgp(std::uint64_t seed) const {
  DgpSpec spec = DgpSpec::benchmark(seed);
  spec.n_countries = n_countries;
  spec.months = months;
  spec.bias = bias;
  return spec;
}

void RunConfig::validate() const {
  if (window.end.index() < window.start.index())
    fail(ErrorCategory::ConfigError, "window is empty");
  if (decomposition.calibrate_target &&
      !(*decomposition.calibrate_target > 0.0 && *decomposition.calibrate_target < 1.0))
    fail(ErrorCategory::ConfigError, "calibrate_target must lie in (0,1)");
  if (!decomposition.calibrate_target && !(decomposition.w > 0.0 && decomposition.w < 1.0))
    fail(ErrorCategory::ConfigError, "w must lie in (0,1)");
  if (variants.empty()) fail(ErrorCategory::ConfigError, "no shock variants requested");
  if (!run_bvar && !run_lp) fail(ErrorCategory::ConfigError, "no estimator requested");
  if (bvar_horizon < 1) fail(ErrorCategory::ConfigError, "bvar horizon must be positive");
  bvar.validate();
  lp.validate();
  if (!events_csv.empty() && events_csv == panel_csv)
    fail(ErrorCategory::ConfigError, "events_csv and panel_csv must be distinct paths");
}

RunConfig parse_run_config(const ConfigFile& file) {
  RunConfig cfg;

  cfg.events_csv = file.require("data", "events_csv");
  cfg.panel_csv = file.require("data", "panel_csv");
  cfg.window.start = parse_month(file.require("data", "window_start"));
  cfg.window.end = parse_month(file.require("data", "window_end"));
  for (const auto& name : file.get_list("data", "variables")) {
    SeriesPriorityRule rule;
    rule.variable = name;
    rule.candidates = file.get_list("data", "sources_" + name);
    if (rule.candidates.empty()) rule.candidates = {name};
    rule.transform = parse_transform(file.get("data", "transform_" + name, "level"));
    cfg.rules.push_back(std::move(rule));
  }
  if (cfg.rules.empty()) fail(ErrorCategory::ConfigError, "[data] variables must be nonempty");

  const std::string method = file.get("decomposition", "method", "rotation");
  if (method == "rotation") cfg.decomposition.method = DecompositionMethod::rotation;
  else if (method == "poor_man") cfg.decomposition.method = DecompositionMethod::poor_man;
  else fail(ErrorCategory::ConfigError, "unknown decomposition method '" + method + "'");
  cfg.decomposition.w = file.get_double("decomposition", "w", 0.5);
  if (file.has("decomposition", "calibrate_target"))
    cfg.decomposition.calibrate_target = file.get_double("decomposition", "calibrate_target", 0.68);

  cfg.bvar.p = file.get_int("bvar", "p", 6);
  cfg.bvar.prior.ar1_mean = file.get_double("bvar", "ar1_mean", 0.9);
  cfg.bvar.prior.lambda1 = file.get_double("bvar", "lambda1", 0.1);
  cfg.bvar.prior.lambda2 = file.get_double("bvar", "lambda2", 1.0);
  cfg.bvar.prior.lambda3 = file.get_double("bvar", "lambda3", 1.0);
  cfg.bvar.prior.lambda4 = file.get_double("bvar", "lambda4", 100.0);
  cfg.bvar.draws = file.get_int("bvar", "draws", 2000);
  cfg.bvar.burn_in = file.get_int("bvar", "burn_in", 0);
  cfg.bvar_horizon = file.get_int("bvar", "horizon", 36);

  cfg.lp.horizons = file.get_int("lp", "horizons", 12);
  cfg.lp.j_y = file.get_int("lp", "j_y", 2);
  cfg.lp.j_x = file.get_int("lp", "j_x", 2);
  cfg.lp.j_i = file.get_int("lp", "j_i", 2);
  cfg.lp.include_country_fe = file.get_bool("lp", "country_fe", true);
  cfg.lp.include_trend = file.get_bool("lp", "trend", true);
  const std::string crit = file.get("lp", "critical_values", "normal");
  if (crit == "normal") cfg.lp.critical_values = CriticalValues::normal;
  else if (crit == "t") cfg.lp.critical_values = CriticalValues::student_t;
  else fail(ErrorCategory::ConfigError, "critical_values must be normal|t");

  const auto variant_names = file.get_list("run", "variants");
  if (!variant_names.empty()) {
    cfg.variants.clear();
    for (const auto& name : variant_names) cfg.variants.push_back(parse_variant(name));
  }
  const auto estimators = file.get_list("run", "estimators");
  if (!estimators.empty()) {
    cfg.run_bvar = cfg.run_lp = false;
    for (const auto& e : estimators) {
      if (e == "bvar") cfg.run_bvar = true;
      else if (e == "lp") cfg.run_lp = true;
      else fail(ErrorCategory::ConfigError, "unknown estimator '" + e + "'");
    }
  }
  cfg.out_dir = file.get("run", "out_dir", "out");
  cfg.seed = file.get_u64("run", "seed", 0);
  cfg.threads = file.get_int("run", "threads", 0);

  cfg.lab.n_countries = file.get_int("lab", "n_countries", 23);
  cfg.lab.months = file.get_int("lab", "months", 156);
  cfg.lab.bias.b_mp = file.get_double("lab", "bias_b_mp", -1.0);
  cfg.lab.bias.b_id = file.get_double("lab", "bias_b_id", 0.35);
  cfg.lab.bias.rho = file.get_double("lab", "bias_rho", 0.9);
  cfg.lab.bias.noise_sd = file.get_double("lab", "bias_noise_sd", 0.5);
  cfg.lab.bias.replications = file.get_int("lab", "replications", 200);
  cfg.lab.bias.horizon = file.get_int("lab", "bias_horizon", 12);
  cfg.lab.recovery_draws = file.get_int("lab", "recovery_draws", 2000);
  cfg.lab.sign_table_horizon = file.get_int("lab", "sign_table_horizon", 6);

  file.ensure_consumed();
  cfg.bvar.seed = cfg.seed;
  cfg.bvar.threads = cfg.threads;
  cfg.lp.threads = cfg.threads;
  cfg.validate();
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  return parse_run_config(ConfigFile::load(path));
}

std::string RunConfig::effective_text() const {
  std::ostringstream out;
  out << "[data]\n";
  out << "events_csv = " << events_csv.string() << "\n";
  out << "panel_csv = " << panel_csv.string() << "\n";
  out << "window_start = " << format_month(window.start) << "\n";
  out << "window_end = " << format_month(window.end) << "\n";
  std::string names;
  for (const auto& rule : rules) names += (names.empty() ? "" : ", ") + rule.variable;
  out << "variables = " << names << "\n";
  for (const auto& rule : rules) {
    std::string cands;
    for (const auto& c : rule.candidates) cands += (cands.empty() ? "" : ", ") + c;
    out << "sources_" << rule.variable << " = " << cands << "\n";
    out << "transform_" << rule.variable << " = " << to_string(rule.transform) << "\n";
  }
  out << "\n[decomposition]\n";
  out << "method = " << to_string(decomposition.method) << "\n";
  out << "w = " << format_double(decomposition.w) << "\n";
  if (decomposition.calibrate_target)
    out << "calibrate_target = " << format_double(*decomposition.calibrate_target) << "\n";
  out << "\n[bvar]\n";
  out << "p = " << bvar.p << "\n";
  out << "ar1_mean = " << format_double(bvar.prior.ar1_mean) << "\n";
  out << "lambda1 = " << format_double(bvar.prior.lambda1) << "\n";
  out << "lambda2 = " << format_double(bvar.prior.lambda2) << "\n";
  out << "lambda3 = " << format_double(bvar.prior.lambda3) << "\n";
  out << "lambda4 = " << format_double(bvar.prior.lambda4) << "\n";
  out << "draws = " << bvar.draws << "\n";
  out << "burn_in = " << bvar.burn_in << "\n";
  out << "horizon = " << bvar_horizon << "\n";
  out << "\n[lp]\n";
  out << "horizons = " << lp.horizons << "\n";
  out << "j_y = " << lp.j_y << "\n";
  out << "j_x = " << lp.j_x << "\n";
  out << "j_i = " << lp.j_i << "\n";
  out << "country_fe = " << (lp.include_country_fe ? "true" : "false") << "\n";
  out << "trend = " << (lp.include_trend ? "true" : "false") << "\n";
  out << "critical_values = " << (lp.critical_values == CriticalValues::normal ? "normal" : "t") << "\n";
  out << "\n[run]\n";
  std::string vars;
  for (ShockVariant v : variants) vars += (vars.empty() ? "" : ", ") + std::string(to_string(v));
  out << "variants = " << vars << "\n";
  std::string est;
  if (run_bvar) est += "bvar";
  if (run_lp) est += est.empty() ? "lp" : ", lp";
  out << "estimators = " << est << "\n";
  // out_dir and threads are execution details, not experiment inputs; they
  // are omitted so reruns and different worker counts echo identical text.
  out << "seed = " << seed << "\n";
  out << "\n[lab]\n";
  out << "n_countries = " << lab.n_countries << "\n";
  out << "months = " << lab.months << "\n";
  out << "bias_b_mp = " << format_double(lab.bias.b_mp) << "\n";
  out << "bias_b_id = " << format_double(lab.bias.b_id) << "\n";
  out << "bias_rho = " << format_double(lab.bias.rho) << "\n";
  out << "bias_noise_sd = " << format_double(lab.bias.noise_sd) << "\n";
  out << "replications = " << lab.bias.replications << "\n";
  out << "bias_horizon = " << lab.bias.horizon << "\n";
  out << "recovery_draws = " << lab.recovery_draws << "\n";
  out << "sign_table_horizon = " << lab.sign_table_horizon << "\n";
  return out.str();
}

}  // namespace panelshock
