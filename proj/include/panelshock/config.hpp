#ifndef PANELSHOCK_CONFIG_HPP
#define PANELSHOCK_CONFIG_HPP

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "panelshock/bvar.hpp"
#include "panelshock/lab.hpp"
#include "panelshock/local_projection.hpp"
#include "panelshock/pipeline.hpp"

namespace panelshock {

// Sectioned key-value text: [section] headers, `key = value` lines, '#'
// comments, comma-separated lists, optional double quotes around values.
class ConfigFile {
 public:
  static ConfigFile parse(const std::string& text, const std::string& origin);
  static ConfigFile load(const std::filesystem::path& path);

  bool has(const std::string& section, const std::string& key) const;
  std::string require(const std::string& section, const std::string& key) const;
  std::string get(const std::string& section, const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& section, const std::string& key, double fallback) const;
  int get_int(const std::string& section, const std::string& key, int fallback) const;
  std::uint64_t get_u64(const std::string& section, const std::string& key, std::uint64_t fallback) const;
  bool get_bool(const std::string& section, const std::string& key, bool fallback) const;
  std::vector<std::string> get_list(const std::string& section, const std::string& key) const;

  // Typo guard: every present key must have been read by the time the
  // config is fully consumed.
  void ensure_consumed() const;

 private:
  std::string origin_;
  std::map<std::string, std::map<std::string, std::string>> values_;
  mutable std::set<std::string> consumed_;
};

enum class ShockVariant { mp, id, total, poor_man_mp, poor_man_id };

const char* to_string(ShockVariant v);
ShockVariant parse_variant(const std::string& text);
std::vector<ShockVariant> all_variants();

struct DecompositionConfig {
  DecompositionMethod method = DecompositionMethod::rotation;
  double w = 0.5;
  std::optional<double> calibrate_target;  // overrides w when set
};

struct LabConfig {
  int n_countries = 23;
  int months = 156;
  BiasDesign bias;
  int recovery_draws = 2000;
  int sign_table_horizon = 6;

  DgpSpec to_dgp(std::uint64_t seed) const;
};

struct RunConfig {
  std::filesystem::path events_csv;
  std::filesystem::path panel_csv;
  MonthRange window;
  std::vector<SeriesPriorityRule> rules;

  DecompositionConfig decomposition;
  BvarSpec bvar;
  int bvar_horizon = 36;
  LpSpec lp;

  std::vector<ShockVariant> variants{ShockVariant::mp, ShockVariant::id, ShockVariant::total};
  bool run_bvar = true;
  bool run_lp = true;

  std::filesystem::path out_dir = "out";
  std::uint64_t seed = 0;
  int threads = 0;

  LabConfig lab;

  void validate() const;
  // Full key-value echo with defaults resolved; reparsable by load_run_config.
  std::string effective_text() const;
};

RunConfig parse_run_config(const ConfigFile& file);
RunConfig load_run_config(const std::filesystem::path& path);

}  // namespace panelshock

#endif
