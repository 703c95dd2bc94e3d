#ifndef PANELSHOCK_LAB_HPP
#define PANELSHOCK_LAB_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "panelshock/decomposition.hpp"
#include "panelshock/panel.hpp"

namespace panelshock {

// Attenuation experiment design: one outcome responding to the two latent
// meeting shocks with opposed-sign loadings and AR(1) propagation.
struct BiasDesign {
  double b_mp = -1.0;    // outcome loading on the MP shock
  double b_id = 0.35;    // outcome loading on the ID shock (opposite sign)
  double rho = 0.9;      // outcome persistence
  double noise_sd = 0.5; // idiosyncratic innovation sd
  int replications = 200;
  int horizon = 12;
};

// Fully specified data-generating process: meeting-level surprises with a
// known orthogonal MP/ID split, and a pooled panel VAR with known
// coefficients. Everything an estimator recovers here has a stored truth.
struct DgpSpec {
  int n_countries = 23;
  int months = 156;
  YearMonth start{2004, 1};
  std::vector<Date> meeting_calendar;  // empty = one meeting per month (the 15th)

  // surprise process
  Eigen::Matrix2d true_c;       // rows (1, c_mp), (1, c_id)
  double latent_mp_sd = 0.0;    // per-event sd of the MP component
  double latent_id_sd = 0.0;

  // panel process; first row of every lag block must be zero so the shock
  // variable stays white noise
  std::vector<Eigen::MatrixXd> true_a;
  Eigen::MatrixXd true_sigma;
  // true: the aggregate-shock design, variable 0 identical across countries
  // (innovations correlate across countries through it). false: every
  // country's innovation vector is independent, which is exactly the pooled
  // model's own assumption; posterior recovery experiments use this mode.
  bool common_shock = true;
  double country_intercept_sd = 0.0;  // non-shock variables only
  std::vector<std::string> variable_names;
  std::vector<int> irf_signs;  // expected response sign per variable, -1/0/+1

  BiasDesign bias;
  std::uint64_t seed = 0;

  // Desk-scale default: N=23, T=156, n=5, p=2, MP variance share 0.68.
  static DgpSpec benchmark(std::uint64_t seed);

  int lag_order() const { return static_cast<int>(true_a.size()); }
  std::vector<Date> meetings() const;  // calendar with the default filled in
  void validate() const;
};

struct SimulatedSurprises {
  std::vector<EventSurprise> events;
  ShockDecomposition truth;  // exact latent U and loading C
};

// Spectral radius of the companion matrix built from the given lag blocks.
double companion_spectral_radius(const std::vector<Eigen::MatrixXd>& a);

// y_t = sum_j a[j] y_{t-j} + e_t with zero pre-sample history; returns the
// deterministic path given the innovation sequence (T x n).
Eigen::MatrixXd iterate_var(const std::vector<Eigen::MatrixXd>& a, const Eigen::MatrixXd& innovations);

// Draws exactly orthogonal latent columns, forms M = U C and returns both
// the events and the ground-truth decomposition.
SimulatedSurprises simulate_surprises(const DgpSpec& spec);

// Rotation coordinates reproducing a known decomposition of m: the angle is
// acos(sqrt(MP share)) and the weight inverts the admissible-interval map.
double implied_alpha(const ShockDecomposition& truth);
double implied_weight(const SurpriseMatrix& m, double alpha);

// Simulates every country with common lag blocks, common shock innovations
// in position 0 and country-specific remaining innovations conditional on
// the shock; discards 100 burn-in periods.
PanelDataset simulate_panel(const DgpSpec& spec, const Eigen::VectorXd& shock_series);
// Same, with the shock innovations drawn internally from true_sigma.
PanelDataset simulate_panel(const DgpSpec& spec);

// True one-standard-deviation structural responses (H+1 x n) implied by
// true_a and true_sigma; divide by sqrt(sigma(0,0)) for per-unit responses.
Eigen::MatrixXd true_irf(const DgpSpec& spec, int horizon);

struct BiasRow {
  int horizon = 0;
  double true_mp = 0.0;
  double true_id = 0.0;
  double beta_mp = 0.0;     // replication means
  double beta_id = 0.0;
  double beta_total = 0.0;
  double attenuation = 0.0; // 1 - |beta_total| / |beta_mp|
  bool composite_between = false;
};

struct BiasReport {
  std::vector<BiasRow> rows;
  double mp_variance_share = 0.0;  // realized, averaged over replications
  int replications = 0;
};

// Estimates the outcome response to the true MP series, the true ID series
// and the composite, replication by replication, and reports the attenuation
// produced by mixing opposing shocks.
BiasReport bias_experiment(const DgpSpec& spec);

}  // namespace panelshock

#endif
