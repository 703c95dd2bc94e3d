#include <CLI11.hpp>
#include <cstdint>
#include <iostream>
#include <string>

#include "panelshock/config.hpp"
#include "panelshock/csv.hpp"
#include "panelshock/decomposition.hpp"
#include "panelshock/errors.hpp"
#include "panelshock/pipeline.hpp"
#include "panelshock/runner.hpp"

namespace {

using namespace panelshock;

struct CommonFlags {
  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool seed_set = false;
  int threads = 0;
  bool threads_set = false;
};

void add_common(CLI::App* cmd, CommonFlags& flags, bool config_required) {
  auto* opt = cmd->add_option("--config", flags.config_path, "config file path");
  if (config_required) opt->required();
  cmd->add_option("--out", flags.out_dir, "output directory (overrides config)");
  cmd->add_option("--seed", flags.seed, "random seed (overrides config)")
      ->each([&flags](const std::string&) { flags.seed_set = true; });
  cmd->add_option("--threads", flags.threads, "worker cap (overrides config and PANELSHOCK_THREADS)")
      ->each([&flags](const std::string&) { flags.threads_set = true; });
}

RunConfig load_with_overrides(const CommonFlags& flags) {
  RunConfig config = load_run_config(flags.config_path);
  if (!flags.out_dir.empty()) config.out_dir = flags.out_dir;
  if (flags.seed_set) config.seed = flags.seed;
  if (flags.threads_set) config.threads = flags.threads;
  config.bvar.seed = config.seed;
  config.bvar.threads = config.threads;
  config.lp.threads = config.threads;
  return config;
}

void print_artifacts(const RunArtifacts& artifacts) {
  for (const auto& [name, hash] : artifacts.hashes)
    std::cout << name << "  " << hash << "\n";
  for (const auto& d : artifacts.diagnostics) std::cout << "note: " << d << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sign-restriction shock decomposition, pooled panel BVAR and local projections"};
  app.require_subcommand(1);

  CommonFlags run_flags, lab_flags;
  bool list_variants = false;

  CLI::App* run_cmd = app.add_subcommand("run", "decompose, estimate and emit IRF/LP tables");
  add_common(run_cmd, run_flags, false);
  run_cmd->add_flag("--list-variants", list_variants, "print the available shock variants and exit");

  CLI::App* lab_cmd = app.add_subcommand("lab", "synthetic-laboratory experiments");
  add_common(lab_cmd, lab_flags, true);
  bool emit_bundle = false;
  lab_cmd->add_flag("--emit-bundle", emit_bundle,
                    "write a synthetic events/panel input bundle instead of running experiments");

  // Standalone decomposition: events in, decomposition CSV out.
  std::string dec_events, dec_out = "decomposition.csv", dec_method = "rotation";
  double dec_w = 0.5;
  double dec_target = -1.0;
  CLI::App* dec_cmd = app.add_subcommand("decompose", "decompose an event CSV without estimation");
  dec_cmd->add_option("--events", dec_events, "events CSV (date,i_total,s)")->required();
  dec_cmd->add_option("--out", dec_out, "output CSV path");
  dec_cmd->add_option("--method", dec_method, "rotation | poor_man");
  dec_cmd->add_option("--w", dec_w, "rotation weight in (0,1)");
  dec_cmd->add_option("--calibrate-target", dec_target, "calibrate w to this MP variance share");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run_cmd->parsed()) {
      if (list_variants) {
        for (ShockVariant v : all_variants()) std::cout << to_string(v) << "\n";
        return 0;
      }
      if (run_flags.config_path.empty())
        fail(ErrorCategory::ConfigError, "run requires --config (or --list-variants)");
      print_artifacts(run(load_with_overrides(run_flags)));
      return 0;
    }
    if (lab_cmd->parsed()) {
      const RunConfig config = load_with_overrides(lab_flags);
      print_artifacts(emit_bundle ? make_lab_bundle(config) : lab(config));
      return 0;
    }
    // decompose
    const auto events = read_events(dec_events);
    ShockDecomposition d;
    if (dec_method == "poor_man") {
      d = decompose_poor_man(events);
    } else if (dec_method == "rotation") {
      const SurpriseMatrix m = SurpriseMatrix::from_events(events);
      double w = dec_w;
      if (dec_target > 0.0) {
        const CalibratedWeight cal = calibrate_weight(m, dec_target);
        w = cal.w;
        std::cout << "calibrated w = " << format_double(cal.w) << " (share "
                  << format_double(cal.achieved_share) << ")\n";
      }
      d = decompose_rotation(m, w);
    } else {
      fail(ErrorCategory::ConfigError, "unknown method '" + dec_method + "'");
    }
    CsvTable table;
    table.header = {"date", "i_total", "s", "i_mp", "i_id", "method", "alpha", "w"};
    for (size_t t = 0; t < events.size(); ++t) {
      const long row = static_cast<long>(t);
      table.rows.push_back({format_date(events[t].date), format_double(events[t].i_total),
                            format_double(events[t].s), format_double(d.u(row, 0)),
                            format_double(d.u(row, 1)), to_string(d.method),
                            d.alpha ? format_double(*d.alpha) : "nan",
                            d.w ? format_double(*d.w) : "nan"});
    }
    write_csv(dec_out, table);
    std::cout << dec_out << "  " << hash_file(dec_out) << "\n";
    return 0;
  } catch (const Error& e) {
    std::cerr << "error: category=" << to_string(e.category()) << " message=" << e.what() << "\n";
    return exit_code(e.category());
  } catch (const std::exception& e) {
    std::cerr << "error: category=Internal message=" << e.what() << "\n";
    return 1;
  }
}
