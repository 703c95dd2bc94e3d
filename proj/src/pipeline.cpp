#include "panelshock/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "panelshock/csv.hpp"
#include "panelshock/errors.hpp"

namespace panelshock {

namespace {

double apply_transform(Transform t, double value, const std::string& context) {
  if (t == Transform::level) return value;
  if (!(value > 0.0))
    fail(ErrorCategory::ParseError, context + ": non-positive value under log100 transform");
  return 100.0 * std::log(value);
}

}  // namespace

IngestResult ingest_panel(const std::filesystem::path& csv_path,
                          const std::vector<SeriesPriorityRule>& rules, const MonthRange& window) {
  if (rules.empty()) fail(ErrorCategory::ConfigError, "no variable rules configured");
  for (const auto& rule : rules)
    if (rule.candidates.empty())
      fail(ErrorCategory::ConfigError, "rule for '" + rule.variable + "' has no source candidates");

  const CsvTable table = read_csv(csv_path);
  const std::string file = csv_path.string();
  const int c_country = table.require_column("country", file);
  const int c_date = table.require_column("date", file);
  const int c_variable = table.require_column("variable", file);
  const int c_value = table.require_column("value", file);

  // country -> source series -> month index -> value
  std::map<std::string, std::map<std::string, std::map<int, double>>> cells;
  for (size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const std::string context = file + ":" + std::to_string(table.line_numbers[r]);
    const YearMonth m = month_of(parse_date(row[static_cast<size_t>(c_date)]));
    const double value = parse_double(row[static_cast<size_t>(c_value)], context);
    auto& series = cells[row[static_cast<size_t>(c_country)]][row[static_cast<size_t>(c_variable)]];
    if (!series.emplace(m.index(), value).second)
      fail(ErrorCategory::ParseError, context + ": duplicate cell for " + format_month(m));
  }
  if (cells.empty()) fail(ErrorCategory::ParseError, file + ": no data rows");

  IngestResult out;
  out.dataset.start = window.start;
  for (const auto& rule : rules) {
    out.dataset.variables.push_back(rule.variable);
    out.dataset.transforms.push_back(rule.transform);
  }

  const int t_len = window.length();
  for (const auto& [country, sources] : cells) {  // std::map: alphabetical, deterministic
    Eigen::MatrixXd block(t_len, static_cast<long>(rules.size()));
    for (size_t v = 0; v < rules.size(); ++v) {
      const auto& rule = rules[v];
      const std::map<int, double>* chosen = nullptr;
      std::string chosen_name;
      std::vector<std::string> best_gaps;
      size_t best_gap_count = static_cast<size_t>(-1);
      for (const auto& candidate : rule.candidates) {
        const auto it = sources.find(candidate);
        std::vector<std::string> gaps;
        for (int k = 0; k < t_len; ++k) {
          const int idx = window.start.index() + k;
          if (it == sources.end() || !it->second.count(idx))
            gaps.push_back(format_month(YearMonth::from_index(idx)));
        }
        if (gaps.empty() && it != sources.end()) {
          chosen = &it->second;
          chosen_name = candidate;
          break;
        }
        if (gaps.size() < best_gap_count) {
          best_gap_count = gaps.size();
          best_gaps = std::move(gaps);
        }
      }
      if (!chosen) {
        std::string shown;
        for (size_t k = 0; k < best_gaps.size() && k < 3; ++k) shown += (k ? ", " : "") + best_gaps[k];
        if (best_gaps.size() > 3) shown += ", ...";
        fail(ErrorCategory::MissingCoverage,
             country + "/" + rule.variable + ": no candidate covers the window; missing " + shown);
      }
      for (int k = 0; k < t_len; ++k) {
        const double raw = chosen->at(window.start.index() + k);
        block(k, static_cast<long>(v)) =
            apply_transform(rule.transform, raw, country + "/" + chosen_name + "@" +
                                                     format_month(YearMonth::from_index(window.start.index() + k)));
      }
      out.provenance.push_back(ProvenanceEntry{country, rule.variable, chosen_name, rule.transform});
    }
    out.dataset.countries.push_back(country);
    out.dataset.data.push_back(std::move(block));
  }
  out.dataset.validate_shape();
  return out;
}

std::vector<EventSurprise> read_events(const std::filesystem::path& csv_path) {
  const CsvTable table = read_csv(csv_path);
  const std::string file = csv_path.string();
  const int c_date = table.require_column("date", file);
  const int c_total = table.require_column("i_total", file);
  const int c_s = table.require_column("s", file);
  std::vector<EventSurprise> events;
  events.reserve(table.rows.size());
  for (size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const std::string context = file + ":" + std::to_string(table.line_numbers[r]);
    EventSurprise e;
    e.date = parse_date(row[static_cast<size_t>(c_date)]);
    e.i_total = parse_double(row[static_cast<size_t>(c_total)], context);
    e.s = parse_double(row[static_cast<size_t>(c_s)], context);
    if (!events.empty() && !(events.back().date < e.date))
      fail(ErrorCategory::ParseError, context + ": event dates must be strictly increasing");
    events.push_back(e);
  }
  if (events.empty()) fail(ErrorCategory::ParseError, file + ": no events");
  return events;
}

void emit_panel(const PanelDataset& dataset, const std::filesystem::path& csv_path) {
  dataset.validate_shape();
  CsvTable table;
  table.header = {"country", "date", "variable", "value"};
  const long t_len = dataset.n_periods();
  for (size_t i = 0; i < dataset.countries.size(); ++i)
    for (long t = 0; t < t_len; ++t) {
      const Date date = first_day(YearMonth::from_index(dataset.start.index() + static_cast<int>(t)));
      for (size_t v = 0; v < dataset.variables.size(); ++v)
        table.rows.push_back({dataset.countries[i], format_date(date), dataset.variables[v],
                              format_double(dataset.data[i](t, static_cast<long>(v)))});
    }
  write_csv(csv_path, table);
}

std::string provenance_text(const std::vector<ProvenanceEntry>& entries) {
  std::ostringstream out;
  for (const auto& e : entries)
    out << "country=" << e.country << " variable=" << e.variable << " source=" << e.source
        << " transform=" << to_string(e.transform) << '\n';
  return out.str();
}

AlignResult align_shock(const MonthlySeries& shock, const std::string& shock_name,
                        const PanelDataset& panel) {
  panel.validate_shape();
  const MonthRange panel_range = panel.range();
  if (shock.range.start.index() > panel_range.start.index() ||
      shock.range.end.index() < panel_range.end.index())
    fail(ErrorCategory::RangeMismatch,
         "shock series " + format_month(shock.range.start) + ".." + format_month(shock.range.end) +
             " does not cover the panel window " + format_month(panel_range.start) + ".." +
             format_month(panel_range.end));

  AlignResult out;
  if (shock.range.start != panel_range.start || shock.range.end != panel_range.end)
    out.diagnostics.push_back("shock series truncated to the panel window " +
                              format_month(panel_range.start) + ".." + format_month(panel_range.end));

  const int offset = panel_range.start.index() - shock.range.start.index();
  const Eigen::VectorXd aligned = shock.values.segment(offset, panel.n_periods());

  out.dataset.start = panel.start;
  out.dataset.countries = panel.countries;
  out.dataset.variables.reserve(panel.variables.size() + 1);
  out.dataset.variables.push_back(shock_name);
  out.dataset.transforms.push_back(Transform::level);
  for (size_t v = 0; v < panel.variables.size(); ++v) {
    out.dataset.variables.push_back(panel.variables[v]);
    out.dataset.transforms.push_back(panel.transforms[v]);
  }
  out.dataset.data.reserve(panel.data.size());
  for (const auto& block : panel.data) {
    Eigen::MatrixXd with_shock(block.rows(), block.cols() + 1);
    with_shock.col(0) = aligned;
    with_shock.rightCols(block.cols()) = block;
    out.dataset.data.push_back(std::move(with_shock));
  }
  out.dataset.validate();
  return out;
}

}  // namespace panelshock
