#ifndef PANELSHOCK_LOCAL_PROJECTION_HPP
#define PANELSHOCK_LOCAL_PROJECTION_HPP

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "panelshock/panel.hpp"

namespace panelshock {

enum class CriticalValues { normal, student_t };

// Horizon-by-horizon projection of y_{i,t+h} on the period-t shock with
// outcome/control/shock lags, country fixed effects and a pooled linear
// trend; inference clustered on the time dimension (the shock hits every
// country at once).
struct LpSpec {
  int horizons = 12;
  int j_y = 2;  // outcome lags
  int j_x = 2;  // lags of each control variable
  int j_i = 2;  // shock lags
  bool include_country_fe = true;
  bool include_trend = true;
  CriticalValues critical_values = CriticalValues::normal;
  bool fe_via_dummies = false;  // validation path, numerically equal to demeaning
  int threads = 0;

  void validate() const;
};

struct LpDesign {
  Eigen::VectorXd y;
  Eigen::MatrixXd x;              // regressors after fixed-effect handling
  std::vector<long> time_cluster; // cluster id per row
  std::vector<std::string> columns;
  long shock_columns = 1;         // leading shock regressors
  long absorbed = 0;              // absorbed fixed effects, counted in dof
};

struct LpCell {
  int horizon = 0;
  double beta = 0.0;
  double se = 0.0;
  double ci68_lo = 0.0, ci68_hi = 0.0;
  double ci90_lo = 0.0, ci90_hi = 0.0;
  long nobs = 0;
};

struct LpEstimate {
  std::string shock;
  std::string variable;
  std::vector<LpCell> cells;  // horizon 0..H
};

struct LpResult {
  std::vector<LpEstimate> estimates;
  std::vector<std::string> diagnostics;  // warn-level, e.g. too few clusters
};

// Design for one (outcome, horizon): rows drop where any lead or lag leaves
// the sample. extra_shock adds a second common shock series (rate race).
LpDesign build_lp_design(const PanelDataset& data, const LpSpec& spec, int outcome, int h,
                         const Eigen::VectorXd* extra_shock = nullptr);

// All non-shock outcomes, one estimate path per outcome.
LpResult estimate_lp(const PanelDataset& data, const LpSpec& spec);

// Both shocks in the same regression; the second series runs on the panel
// calendar. Throws CollinearShocks when the two series correlate above 0.999.
LpResult estimate_rate_race(const PanelDataset& data, const Eigen::VectorXd& second_shock,
                            const std::string& second_name, const LpSpec& spec);

}  // namespace panelshock

#endif
