#ifndef PANELSHOCK_RUNNER_HPP
#define PANELSHOCK_RUNNER_HPP

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "panelshock/config.hpp"
#include "panelshock/lab.hpp"

namespace panelshock {

inline constexpr const char* kToolName = "panelshock";
inline constexpr const char* kToolVersion = "0.1.0";

struct RunArtifacts {
  std::filesystem::path out_dir;
  std::map<std::string, std::string> hashes;  // artifact name -> content hash
  std::vector<std::string> diagnostics;
};

// Full pipeline: decompose events, aggregate to months, ingest the panel,
// estimate the requested (variant, estimator) pairs, and write the artifact
// set plus a manifest that suffices to re-run. Artifact bytes depend only on
// the config and seed, not on the worker count or output location.
RunArtifacts run(const RunConfig& config);

struct LabSignRow {
  int horizon = 0;
  std::string variable;
  int expected = 0;   // from the DGP spec
  int estimated = 0;  // sign of the posterior median response
  double median = 0.0;
  bool match = false;
};

struct LabOutcome {
  BiasReport bias;
  int coefficients_total = 0;
  int coefficients_covered = 0;  // true values inside the 95% posterior band
  double coverage() const {
    return coefficients_total ? static_cast<double>(coefficients_covered) / coefficients_total : 0.0;
  }
  std::vector<LabSignRow> sign_table;
};

// Synthetic-laboratory experiments: the attenuation study plus a posterior
// recovery check on a freshly simulated panel.
LabOutcome run_lab_experiments(const RunConfig& config);

// run_lab_experiments + artifact emission (attenuation and recovery tables,
// summary text, manifest).
RunArtifacts lab(const RunConfig& config);

// Writes a synthetic input bundle (events.csv + panel.csv) in the exact
// formats the data pipeline consumes, so lab data exercises the real
// ingestion path. The panel responds to the composite monthly shock implied
// by the events; log100 variables are emitted as index levels.
RunArtifacts make_lab_bundle(const RunConfig& config);

}  // namespace panelshock

#endif
