#include "panelshock/local_projection.hpp"

#include <algorithm>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <map>

#include "panelshock/errors.hpp"
#include "panelshock/parallel.hpp"

namespace panelshock {

namespace {

// Normal critical values pinned for the 68% and 90% two-sided intervals.
constexpr double kz68 = 0.994;
constexpr double kz90 = 1.645;

struct Critical {
  double c68;
  double c90;
};

Critical critical_values_for(CriticalValues kind, long clusters) {
  if (kind == CriticalValues::normal) return {kz68, kz90};
  const boost::math::students_t dist(static_cast<double>(std::max<long>(clusters - 1, 1)));
  return {boost::math::quantile(dist, 0.84), boost::math::quantile(dist, 0.95)};
}

struct FitResult {
  Eigen::VectorXd beta;
  Eigen::VectorXd se;
  long clusters = 0;
};

// OLS with CR1 time-clustered covariance:
//   V = c (X'X)^{-1} [sum_g X_g'e_g e_g'X_g] (X'X)^{-1},
//   c = G/(G-1) * (M-1)/(M-k), k counting absorbed fixed effects.
FitResult fit_clustered(const LpDesign& design) {
  const long rows = design.x.rows();
  const long cols = design.x.cols();
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design.x);
  if (qr.rank() < cols)
    fail(ErrorCategory::RankDeficient,
         "design rank " + std::to_string(qr.rank()) + " < " + std::to_string(cols) + " columns");

  FitResult fit;
  fit.beta = qr.solve(design.y);
  const Eigen::VectorXd resid = design.y - design.x * fit.beta;

  std::map<long, Eigen::VectorXd> score_by_cluster;
  for (long r = 0; r < rows; ++r) {
    auto [it, inserted] =
        score_by_cluster.try_emplace(design.time_cluster[static_cast<size_t>(r)],
                                     Eigen::VectorXd::Zero(cols));
    it->second += design.x.row(r).transpose() * resid[r];
  }
  Eigen::MatrixXd meat = Eigen::MatrixXd::Zero(cols, cols);
  for (const auto& [id, score] : score_by_cluster) meat += score * score.transpose();

  const Eigen::MatrixXd bread =
      (design.x.transpose() * design.x).ldlt().solve(Eigen::MatrixXd::Identity(cols, cols));
  const double g = static_cast<double>(score_by_cluster.size());
  const double mm = static_cast<double>(rows);
  const double k = static_cast<double>(cols + design.absorbed);
  if (g < 2.0 || mm <= k)
    fail(ErrorCategory::InsufficientSample, "not enough clusters or residual degrees of freedom");
  const double cr1 = g / (g - 1.0) * (mm - 1.0) / (mm - k);
  const Eigen::MatrixXd vcov = cr1 * bread * meat * bread;

  fit.se = vcov.diagonal().cwiseMax(0.0).cwiseSqrt();
  fit.clusters = static_cast<long>(score_by_cluster.size());
  return fit;
}

std::vector<int> control_indices(const PanelDataset& data, int outcome) {
  std::vector<int> controls;
  for (int v = 1; v < data.n_variables(); ++v)
    if (v != outcome) controls.push_back(v);
  return controls;
}

double pearson(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const Eigen::VectorXd da = a.array() - a.mean();
  const Eigen::VectorXd db = b.array() - b.mean();
  const double denom = da.norm() * db.norm();
  if (denom == 0.0) return 1.0;
  return da.dot(db) / denom;
}

LpResult estimate_impl(const PanelDataset& data, const LpSpec& spec,
                       const Eigen::VectorXd* extra_shock, const std::string& extra_name) {
  spec.validate();
  data.validate_shape();  // cross-country shock identity is enforced at alignment

  std::vector<std::string> shock_names{data.variables[0]};
  if (extra_shock) shock_names.push_back(extra_name);

  LpResult result;
  std::vector<std::vector<std::vector<LpCell>>> cells(  // [outcome][shock][h]
      static_cast<size_t>(data.n_variables() - 1),
      std::vector<std::vector<LpCell>>(shock_names.size(),
                                       std::vector<LpCell>(static_cast<size_t>(spec.horizons + 1))));
  std::vector<long> min_clusters(static_cast<size_t>(spec.horizons + 1), 0);

  for (int outcome = 1; outcome < data.n_variables(); ++outcome) {
    const auto run_horizon = [&](std::size_t hz) {
      const int h = static_cast<int>(hz);
      const LpDesign design = build_lp_design(data, spec, outcome, h, extra_shock);
      const FitResult fit = fit_clustered(design);
      const Critical crit = critical_values_for(spec.critical_values, fit.clusters);
      for (size_t sh = 0; sh < shock_names.size(); ++sh) {
        LpCell& cell = cells[static_cast<size_t>(outcome - 1)][sh][hz];
        cell.horizon = h;
        cell.beta = fit.beta[static_cast<long>(sh)];
        cell.se = fit.se[static_cast<long>(sh)];
        cell.ci68_lo = cell.beta - crit.c68 * cell.se;
        cell.ci68_hi = cell.beta + crit.c68 * cell.se;
        cell.ci90_lo = cell.beta - crit.c90 * cell.se;
        cell.ci90_hi = cell.beta + crit.c90 * cell.se;
        cell.nobs = design.x.rows();
      }
      min_clusters[hz] = fit.clusters;
    };
    parallel_for(static_cast<size_t>(spec.horizons + 1), resolve_thread_count(spec.threads),
                 run_horizon);
  }

  const long fewest = *std::min_element(min_clusters.begin(), min_clusters.end());
  if (fewest < 10)
    result.diagnostics.push_back("only " + std::to_string(fewest) +
                                 " time clusters at the longest horizon; clustered inference is fragile");

  for (int outcome = 1; outcome < data.n_variables(); ++outcome)
    for (size_t sh = 0; sh < shock_names.size(); ++sh) {
      LpEstimate est;
      est.shock = shock_names[sh];
      est.variable = data.variables[static_cast<size_t>(outcome)];
      est.cells = cells[static_cast<size_t>(outcome - 1)][sh];
      result.estimates.push_back(std::move(est));
    }
  return result;
}

}  // namespace

void LpSpec::validate() const {
  if (horizons < 0) fail(ErrorCategory::ConfigError, "horizons must be nonnegative");
  if (j_y < 0 || j_x < 0 || j_i < 0) fail(ErrorCategory::ConfigError, "lag counts must be nonnegative");
}

LpDesign build_lp_design(const PanelDataset& data, const LpSpec& spec, int outcome, int h,
                         const Eigen::VectorXd* extra_shock) {
  const long t_len = data.n_periods();
  const long n_c = data.n_countries();
  if (outcome < 1 || outcome >= data.n_variables())
    fail(ErrorCategory::ConfigError, "outcome index out of range (variable 0 is the shock)");
  if (extra_shock && extra_shock->size() != t_len)
    fail(ErrorCategory::RangeMismatch, "second shock series length differs from panel");

  const int p_max = std::max({spec.j_y, spec.j_x, spec.j_i});
  const long t_lo = p_max;
  const long t_hi = t_len - 1 - h;  // inclusive
  if (t_hi < t_lo) fail(ErrorCategory::EmptySample, "no usable rows at horizon " + std::to_string(h));

  const auto controls = control_indices(data, outcome);
  const long n_shocks = extra_shock ? 2 : 1;

  std::vector<std::string> columns;
  columns.push_back(data.variables[0]);
  if (extra_shock) columns.push_back("shock2");
  for (int j = 1; j <= spec.j_y; ++j)
    columns.push_back(data.variables[static_cast<size_t>(outcome)] + ".l" + std::to_string(j));
  for (int c : controls)
    for (int j = 1; j <= spec.j_x; ++j)
      columns.push_back(data.variables[static_cast<size_t>(c)] + ".l" + std::to_string(j));
  for (int j = 1; j <= spec.j_i; ++j)
    columns.push_back(data.variables[0] + ".l" + std::to_string(j));
  if (extra_shock)
    for (int j = 1; j <= spec.j_i; ++j) columns.push_back("shock2.l" + std::to_string(j));
  if (spec.include_trend) columns.push_back("trend");

  const long base_cols = static_cast<long>(columns.size());
  long cols = base_cols;
  long dummy_start = -1;
  if (spec.include_country_fe && spec.fe_via_dummies) {
    dummy_start = cols;
    cols += n_c;
    for (long i = 0; i < n_c; ++i) columns.push_back("fe." + data.countries[static_cast<size_t>(i)]);
  } else if (!spec.include_country_fe) {
    columns.push_back("const");
    cols += 1;
  }

  const long rows_per_country = t_hi - t_lo + 1;
  LpDesign design;
  design.columns = std::move(columns);
  design.shock_columns = n_shocks;
  design.y.resize(n_c * rows_per_country);
  design.x = Eigen::MatrixXd::Zero(n_c * rows_per_country, cols);
  design.time_cluster.resize(static_cast<size_t>(n_c * rows_per_country));

  long row = 0;
  for (long i = 0; i < n_c; ++i) {
    const Eigen::MatrixXd& yi = data.data[static_cast<size_t>(i)];
    for (long t = t_lo; t <= t_hi; ++t, ++row) {
      design.y[row] = yi(t + h, outcome);
      design.time_cluster[static_cast<size_t>(row)] = t;
      long col = 0;
      design.x(row, col++) = yi(t, 0);
      if (extra_shock) design.x(row, col++) = (*extra_shock)[t];
      for (int j = 1; j <= spec.j_y; ++j) design.x(row, col++) = yi(t - j, outcome);
      for (int c : controls)
        for (int j = 1; j <= spec.j_x; ++j) design.x(row, col++) = yi(t - j, c);
      for (int j = 1; j <= spec.j_i; ++j) design.x(row, col++) = yi(t - j, 0);
      if (extra_shock)
        for (int j = 1; j <= spec.j_i; ++j) design.x(row, col++) = (*extra_shock)[t - j];
      if (spec.include_trend) design.x(row, col++) = static_cast<double>(t);
      if (dummy_start >= 0) design.x(row, dummy_start + i) = 1.0;
      else if (!spec.include_country_fe) design.x(row, col) = 1.0;
    }
  }

  // Within transformation: demean outcome and regressors by country.
  if (spec.include_country_fe && !spec.fe_via_dummies) {
    for (long i = 0; i < n_c; ++i) {
      auto yseg = design.y.segment(i * rows_per_country, rows_per_country);
      yseg.array() -= yseg.mean();
      auto xblk = design.x.middleRows(i * rows_per_country, rows_per_country);
      xblk.rowwise() -= xblk.colwise().mean();
    }
    design.absorbed = n_c;
  }
  return design;
}

LpResult estimate_lp(const PanelDataset& data, const LpSpec& spec) {
  return estimate_impl(data, spec, nullptr, "");
}

LpResult estimate_rate_race(const PanelDataset& data, const Eigen::VectorXd& second_shock,
                            const std::string& second_name, const LpSpec& spec) {
  if (second_shock.size() != data.n_periods())
    fail(ErrorCategory::RangeMismatch, "second shock series length differs from panel");
  const Eigen::VectorXd first = data.data.front().col(0);
  const double corr = pearson(first, second_shock);
  if (std::abs(corr) > 0.999)
    fail(ErrorCategory::CollinearShocks,
         "shock series correlate at " + std::to_string(corr) + "; rate race is not identified");
  return estimate_impl(data, spec, &second_shock, second_name);
}

}  // namespace panelshock
