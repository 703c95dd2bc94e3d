#ifndef PANELSHOCK_PANEL_HPP
#define PANELSHOCK_PANEL_HPP

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "panelshock/dates.hpp"

namespace panelshock {

enum class Transform { level, log100 };

const char* to_string(Transform t);
Transform parse_transform(const std::string& text);

// Balanced country x month x variable panel. Variable 0 is the identified
// shock and is identical across countries; the remaining columns are the
// country-specific series.
struct PanelDataset {
  std::vector<std::string> countries;
  std::vector<std::string> variables;
  std::vector<Transform> transforms;  // one per variable, as applied on ingest
  YearMonth start;
  std::vector<Eigen::MatrixXd> data;  // one T x n matrix per country

  long n_countries() const { return static_cast<long>(countries.size()); }
  long n_variables() const { return static_cast<long>(variables.size()); }
  long n_periods() const { return data.empty() ? 0 : data.front().rows(); }
  MonthRange range() const {
    return {start, YearMonth::from_index(start.index() + static_cast<int>(n_periods()) - 1)};
  }
  int variable_index(const std::string& name) const;  // -1 if absent

  // Balance, shape and finiteness; throws on violation.
  void validate_shape() const;
  // Shape checks plus the common-shock requirement on variable 0.
  void validate() const;
};

// Content equality: countries, variables, calendar and cells. Transform
// provenance is metadata about ingestion, not content, and is not compared.
bool identical(const PanelDataset& a, const PanelDataset& b);

}  // namespace panelshock

#endif
