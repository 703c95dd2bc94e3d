#ifndef PANELSHOCK_PIPELINE_HPP
#define PANELSHOCK_PIPELINE_HPP

#include <filesystem>
#include <string>
#include <vector>

#include "panelshock/decomposition.hpp"
#include "panelshock/panel.hpp"

namespace panelshock {

// Target variable assembled from the first source series with full coverage
// over the window, in candidate order.
struct SeriesPriorityRule {
  std::string variable;
  std::vector<std::string> candidates;
  Transform transform = Transform::level;
};

struct ProvenanceEntry {
  std::string country;
  std::string variable;
  std::string source;     // selected candidate column
  Transform transform = Transform::level;
};

struct IngestResult {
  PanelDataset dataset;  // country variables only; no shock column yet
  std::vector<ProvenanceEntry> provenance;
  std::vector<std::string> diagnostics;
};

// Long-form panel CSV `country,date,variable,value`; one value per
// (country, month, source series). Countries are ordered alphabetically,
// variables in rule order. Throws MissingCoverage naming the gap months
// when no candidate covers the window.
IngestResult ingest_panel(const std::filesystem::path& csv_path,
                          const std::vector<SeriesPriorityRule>& rules, const MonthRange& window);

// Events CSV `date,i_total,s` with ISO dates, strictly increasing.
std::vector<EventSurprise> read_events(const std::filesystem::path& csv_path);

// Emits the stored (already transformed) values in the long-form schema;
// re-ingesting with level transforms reproduces the dataset exactly.
void emit_panel(const PanelDataset& dataset, const std::filesystem::path& csv_path);

std::string provenance_text(const std::vector<ProvenanceEntry>& entries);

struct AlignResult {
  PanelDataset dataset;  // shock prepended as variable 0
  std::vector<std::string> diagnostics;
};

// Prepends the monthly shock as variable 0 of every country block. A shock
// series extending beyond the panel is truncated with a diagnostic; a panel
// month missing from the shock series is a RangeMismatch.
AlignResult align_shock(const MonthlySeries& shock, const std::string& shock_name,
                        const PanelDataset& panel);

}  // namespace panelshock

#endif
