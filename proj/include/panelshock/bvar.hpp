#ifndef PANELSHOCK_BVAR_HPP
#define PANELSHOCK_BVAR_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "panelshock/panel.hpp"

namespace panelshock {

// Minnesota-structured Normal-Wishart hyperparameters. The conjugate prior
// covariance factors as Sigma (x) Phi0, which cannot carry a per-equation
// own-versus-cross distinction, so lambda2 acts as a uniform extra tightness
// on all lag coefficients; lambda2 = 1 is the textbook Normal-Wishart.
struct NormalWishartPrior {
  double ar1_mean = 0.9;  // prior mean on the first own lag of log-level variables
  double lambda1 = 0.1;   // overall tightness
  double lambda2 = 1.0;   // cross-variable tightness, in (0,1]
  double lambda3 = 1.0;   // lag decay
  double lambda4 = 100.0; // constant tightness
};

struct BvarSpec {
  int p = 6;  // lag order, monthly data
  NormalWishartPrior prior;
  int draws = 2000;
  int burn_in = 0;  // no-op for the direct conjugate sampler, kept as config surface
  std::uint64_t seed = 0;
  int threads = 0;  // 0 = resolve from PANELSHOCK_THREADS

  void validate() const;
};

// Stacked pooled regression Y = X B + E. One row per (country, period),
// X row = (y_{t-1}', ..., y_{t-p}', 1); coefficients are common across
// countries by construction of the stack.
struct DesignPair {
  Eigen::MatrixXd y;  // N(T-p) x n
  Eigen::MatrixXd x;  // N(T-p) x (n p + 1)
  long n_vars = 0;
  int lag_order = 0;
  std::vector<Transform> transforms;  // per variable, drives the own-lag prior mean
};

// One posterior draw: b stacks (A1', ..., Ap', c') with the constant last.
struct PosteriorDraw {
  Eigen::MatrixXd b;      // (n p + 1) x n
  Eigen::MatrixXd sigma;  // n x n innovation covariance

  Eigen::MatrixXd lag_block(int j) const;  // A_{j+1}, n x n
};

// Conjugate posterior parameters, exposed for testing and diagnostics.
struct NormalWishartPosterior {
  Eigen::MatrixXd b_bar;       // posterior mean of b
  Eigen::MatrixXd phi_bar;     // posterior column covariance factor
  Eigen::MatrixXd s_bar;       // inverse-Wishart scale
  double nu_bar = 0.0;         // inverse-Wishart degrees of freedom
  Eigen::VectorXd sigma_scale; // AR(p) residual sd per variable used in Phi0
};

struct IrfSet {
  int horizon = 0;
  std::vector<Eigen::MatrixXd> responses;         // per draw, (H+1) x n
  Eigen::MatrixXd q05, q16, q50, q84, q95;        // (H+1) x n pointwise quantiles
};

struct StabilityReport {
  bool stable = false;
  double spectral_radius = 0.0;
};

DesignPair build_pooled_regression(const PanelDataset& data, int p);

// Closed-form pooled OLS (X'X)^{-1} X'Y; SingularDesign when X'X is singular.
Eigen::MatrixXd pooled_ols(const DesignPair& design);

NormalWishartPosterior compute_posterior(const BvarSpec& spec, const DesignPair& design);

// Direct sampling from the conjugate posterior: sigma ~ IW(s_bar, nu_bar),
// b | sigma matrix-normal. One derived substream per draw, so any worker
// count yields bitwise-identical output for a fixed seed.
std::vector<PosteriorDraw> sample_posterior(const BvarSpec& spec, const DesignPair& design);

// One-standard-deviation responses to the first (shock) innovation under the
// lower-Cholesky ordering, iterated through the lag dynamics per draw, with
// pointwise {5,16,50,84,95} percentile bands.
IrfSet structural_irf(const std::vector<PosteriorDraw>& draws, int horizon, int threads = 0);

StabilityReport stability_check(const PosteriorDraw& draw);

}  // namespace panelshock

#endif
