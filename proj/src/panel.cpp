#include "panelshock/panel.hpp"

#include <cmath>

#include "panelshock/errors.hpp"

namespace panelshock {

const char* to_string(Transform t) { return t == Transform::level ? "level" : "log100"; }

Transform parse_transform(const std::string& text) {
  if (text == "level") return Transform::level;
  if (text == "log100") return Transform::log100;
  fail(ErrorCategory::ConfigError, "unknown transform '" + text + "' (expected level|log100)");
}

int PanelDataset::variable_index(const std::string& name) const {
  for (size_t j = 0; j < variables.size(); ++j)
    if (variables[j] == name) return static_cast<int>(j);
  return -1;
}

void PanelDataset::validate_shape() const {
  if (countries.empty()) fail(ErrorCategory::EmptySample, "panel has no countries");
  if (countries.size() != data.size())
    fail(ErrorCategory::Internal, "panel country/data size mismatch");
  if (transforms.size() != variables.size())
    fail(ErrorCategory::Internal, "panel variable/transform size mismatch");
  const long t = n_periods();
  const long n = n_variables();
  for (size_t i = 0; i < data.size(); ++i) {
    if (data[i].rows() != t || data[i].cols() != n)
      fail(ErrorCategory::Internal, "unbalanced panel: country " + countries[i] + " has wrong shape");
    if (!data[i].allFinite())
      fail(ErrorCategory::MissingCoverage, "non-finite cell in country " + countries[i]);
  }
}

void PanelDataset::validate() const {
  validate_shape();
  for (size_t i = 1; i < data.size(); ++i)
    if ((data[i].col(0) - data[0].col(0)).lpNorm<Eigen::Infinity>() != 0.0)
      fail(ErrorCategory::Internal, "shock column differs between " + countries[0] + " and " + countries[i]);
}

bool identical(const PanelDataset& a, const PanelDataset& b) {
  if (a.countries != b.countries || a.variables != b.variables || a.start != b.start) return false;
  for (size_t i = 0; i < a.data.size(); ++i)
    if (a.data[i] != b.data[i]) return false;
  return true;
}

}  // namespace panelshock
