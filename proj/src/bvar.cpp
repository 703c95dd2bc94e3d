#include "panelshock/bvar.hpp"

#include <cmath>
#include <string>

#include "panelshock/errors.hpp"
#include "panelshock/parallel.hpp"
#include "panelshock/rng.hpp"
#include "panelshock/stats.hpp"

namespace panelshock {

void BvarSpec::validate() const {
  if (p < 1 || p > 13) fail(ErrorCategory::ConfigError, "lag order must lie in 1..13, got " + std::to_string(p));
  if (draws < 100) fail(ErrorCategory::ConfigError, "need at least 100 draws for quantile bands");
  if (burn_in < 0) fail(ErrorCategory::ConfigError, "burn_in must be nonnegative");
  if (!(prior.lambda1 > 0.0)) fail(ErrorCategory::ConfigError, "lambda1 must be positive");
  if (!(prior.lambda2 > 0.0 && prior.lambda2 <= 1.0))
    fail(ErrorCategory::ConfigError, "lambda2 must lie in (0,1]");
  if (!(prior.lambda3 > 0.0)) fail(ErrorCategory::ConfigError, "lambda3 must be positive");
  if (!(prior.lambda4 > 0.0)) fail(ErrorCategory::ConfigError, "lambda4 must be positive");
}

Eigen::MatrixXd PosteriorDraw::lag_block(int j) const {
  const long n = sigma.rows();
  return b.middleRows(static_cast<long>(j) * n, n).transpose();
}

DesignPair build_pooled_regression(const PanelDataset& data, int p) {
  data.validate_shape();  // cross-country shock identity is enforced at alignment
  const long t = data.n_periods();
  const long n = data.n_variables();
  const long n_c = data.n_countries();
  if (t <= p + 1)
    fail(ErrorCategory::InsufficientSample,
         "T=" + std::to_string(t) + " too short for lag order " + std::to_string(p));

  DesignPair out;
  out.n_vars = n;
  out.lag_order = p;
  out.transforms = data.transforms;
  const long rows = n_c * (t - p);
  if (rows <= n * p + 1)
    fail(ErrorCategory::InsufficientSample,
         std::to_string(rows) + " stacked rows cannot identify " + std::to_string(n * p + 1) +
             " coefficients per equation");
  out.y.resize(rows, n);
  out.x.resize(rows, n * p + 1);
  long row = 0;
  for (long i = 0; i < n_c; ++i) {
    const Eigen::MatrixXd& yi = data.data[static_cast<size_t>(i)];
    for (long s = p; s < t; ++s, ++row) {
      out.y.row(row) = yi.row(s);
      for (int j = 1; j <= p; ++j) out.x.block(row, static_cast<long>(j - 1) * n, 1, n) = yi.row(s - j);
      out.x(row, n * p) = 1.0;
    }
  }
  return out;
}

Eigen::MatrixXd pooled_ols(const DesignPair& design) {
  const Eigen::MatrixXd xtx = design.x.transpose() * design.x;
  Eigen::LDLT<Eigen::MatrixXd> ldlt(xtx);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive())
    fail(ErrorCategory::SingularDesign, "X'X is singular");
  return ldlt.solve(design.x.transpose() * design.y);
}

namespace {

// Residual sd of a pooled univariate AR(p) with constant, per variable; the
// standard scale estimate entering the Minnesota-style prior variances.
Eigen::VectorXd ar_residual_scales(const DesignPair& design) {
  const long n = design.n_vars;
  const int p = design.lag_order;
  const long rows = design.x.rows();
  Eigen::VectorXd scales(n);
  Eigen::MatrixXd xj(rows, p + 1);
  for (long j = 0; j < n; ++j) {
    for (int l = 0; l < p; ++l) xj.col(l) = design.x.col(static_cast<long>(l) * n + j);
    xj.col(p).setOnes();
    const Eigen::VectorXd yj = design.y.col(j);
    const Eigen::VectorXd beta =
        (xj.transpose() * xj).ldlt().solve(xj.transpose() * yj);
    const double ssr = (yj - xj * beta).squaredNorm();
    const long dof = rows - (p + 1);
    const double var = dof > 0 ? ssr / static_cast<double>(dof) : 0.0;
    if (!(var > 0.0))
      fail(ErrorCategory::ZeroVariance,
           "variable " + std::to_string(j) + " is deterministic; prior scale undefined");
    scales[j] = std::sqrt(var);
  }
  return scales;
}

Eigen::MatrixXd prior_mean(const BvarSpec& spec, const DesignPair& design) {
  const long n = design.n_vars;
  Eigen::MatrixXd b0 = Eigen::MatrixXd::Zero(n * spec.p + 1, n);
  for (long j = 0; j < n; ++j) {
    const bool log_level = j < static_cast<long>(design.transforms.size()) &&
                           design.transforms[static_cast<size_t>(j)] == Transform::log100;
    if (log_level) b0(j, j) = spec.prior.ar1_mean;  // first own lag
  }
  return b0;
}

Eigen::VectorXd prior_variances(const BvarSpec& spec, const Eigen::VectorXd& scales) {
  const long n = scales.size();
  Eigen::VectorXd phi0(n * spec.p + 1);
  for (int l = 1; l <= spec.p; ++l) {
    const double decay = std::pow(static_cast<double>(l), spec.prior.lambda3);
    for (long j = 0; j < n; ++j) {
      const double sd = spec.prior.lambda1 * spec.prior.lambda2 / (decay * scales[j]);
      phi0[static_cast<long>(l - 1) * n + j] = sd * sd;
    }
  }
  const double const_sd = spec.prior.lambda1 * spec.prior.lambda4;
  phi0[n * spec.p] = const_sd * const_sd;
  return phi0;
}

}  // namespace

NormalWishartPosterior compute_posterior(const BvarSpec& spec, const DesignPair& design) {
  spec.validate();
  const long n = design.n_vars;
  const long m = design.x.cols();
  if (m != n * spec.p + 1)
    fail(ErrorCategory::ConfigError, "design was built with a different lag order");

  const Eigen::VectorXd scales = ar_residual_scales(design);
  const Eigen::MatrixXd b0 = prior_mean(spec, design);
  const Eigen::VectorXd phi0 = prior_variances(spec, scales);
  const Eigen::VectorXd phi0_inv = phi0.cwiseInverse();

  const double nu0 = static_cast<double>(n) + 2.0;
  const Eigen::MatrixXd s0 = scales.array().square().matrix().asDiagonal();

  Eigen::MatrixXd phi_bar_inv = design.x.transpose() * design.x;
  phi_bar_inv.diagonal() += phi0_inv;
  Eigen::LLT<Eigen::MatrixXd> llt(phi_bar_inv);
  if (llt.info() != Eigen::Success)
    fail(ErrorCategory::SingularDesign, "posterior precision is not positive definite");

  const Eigen::MatrixXd rhs = phi0_inv.asDiagonal() * b0 + design.x.transpose() * design.y;
  NormalWishartPosterior post;
  post.b_bar = llt.solve(rhs);
  post.phi_bar = llt.solve(Eigen::MatrixXd::Identity(m, m));
  post.nu_bar = nu0 + static_cast<double>(design.y.rows());
  post.sigma_scale = scales;

  Eigen::MatrixXd s_bar = s0 + design.y.transpose() * design.y +
                          b0.transpose() * (phi0_inv.asDiagonal() * b0) -
                          post.b_bar.transpose() * rhs;
  post.s_bar = 0.5 * (s_bar + s_bar.transpose());

  if (Eigen::LLT<Eigen::MatrixXd>(post.s_bar).info() != Eigen::Success)
    fail(ErrorCategory::NonPsdPosteriorScale, "posterior scale matrix is not positive definite");
  return post;
}

std::vector<PosteriorDraw> sample_posterior(const BvarSpec& spec, const DesignPair& design) {
  const NormalWishartPosterior post = compute_posterior(spec, design);
  const long n = design.n_vars;
  const long m = design.x.cols();

  const Eigen::MatrixXd chol_phi_bar = Eigen::LLT<Eigen::MatrixXd>(post.phi_bar).matrixL();
  const Eigen::MatrixXd s_bar_inv =
      Eigen::LLT<Eigen::MatrixXd>(post.s_bar).solve(Eigen::MatrixXd::Identity(n, n));
  const Eigen::MatrixXd chol_s_inv =
      Eigen::LLT<Eigen::MatrixXd>(0.5 * (s_bar_inv + s_bar_inv.transpose())).matrixL();

  std::vector<PosteriorDraw> draws(static_cast<size_t>(spec.draws));
  const auto sample_one = [&](std::size_t dr) {
    Rng rng = Rng::substream(spec.seed, "bvar.draw", dr);

    // Bartlett factor: diagonal first, then the strict lower triangle.
    Eigen::MatrixXd bartlett = Eigen::MatrixXd::Zero(n, n);
    for (long i = 0; i < n; ++i) bartlett(i, i) = std::sqrt(rng.chi_squared(post.nu_bar - static_cast<double>(i)));
    for (long j = 0; j < n; ++j)
      for (long i = j + 1; i < n; ++i) bartlett(i, j) = rng.normal();

    // W = (chol_s_inv A)(chol_s_inv A)' ~ Wishart(s_bar^{-1}, nu_bar), so
    // sigma = W^{-1} = T'T with T the lower-triangular inverse below.
    const Eigen::MatrixXd w_factor = chol_s_inv * bartlett;
    const Eigen::MatrixXd t_inv = w_factor.triangularView<Eigen::Lower>().solve(
        Eigen::MatrixXd::Identity(n, n));

    PosteriorDraw& d = draws[dr];
    d.sigma = t_inv.transpose() * t_inv;
    d.sigma = 0.5 * (d.sigma + d.sigma.transpose());

    Eigen::MatrixXd z(m, n);
    for (long j = 0; j < n; ++j)
      for (long i = 0; i < m; ++i) z(i, j) = rng.normal();
    // vec covariance sigma (x) phi_bar: right factor satisfies t_inv' t_inv = sigma
    d.b = post.b_bar + chol_phi_bar * z * t_inv;
  };
  parallel_for(draws.size(), resolve_thread_count(spec.threads), sample_one);
  return draws;
}

IrfSet structural_irf(const std::vector<PosteriorDraw>& draws, int horizon, int threads) {
  if (draws.empty()) fail(ErrorCategory::EmptySample, "no posterior draws");
  const long n = draws.front().sigma.rows();
  const long m = draws.front().b.rows();
  const int p = static_cast<int>((m - 1) / n);

  IrfSet out;
  out.horizon = horizon;
  out.responses.resize(draws.size());

  const auto one_draw = [&](std::size_t dr) {
    const PosteriorDraw& d = draws[dr];
    Eigen::LLT<Eigen::MatrixXd> llt(d.sigma);
    if (llt.info() != Eigen::Success)
      fail(ErrorCategory::CholeskyFailure, "sigma draw is not positive definite");
    const Eigen::VectorXd impulse = Eigen::MatrixXd(llt.matrixL()).col(0);

    Eigen::MatrixXd resp(horizon + 1, n);
    resp.row(0) = impulse.transpose();
    for (int h = 1; h <= horizon; ++h) {
      Eigen::RowVectorXd acc = Eigen::RowVectorXd::Zero(n);
      for (int j = 1; j <= std::min(h, p); ++j)
        acc += resp.row(h - j) * d.lag_block(j - 1).transpose();
      resp.row(h) = acc;
    }
    out.responses[dr] = std::move(resp);
  };
  parallel_for(draws.size(), resolve_thread_count(threads), one_draw);

  const auto fill_quantile = [&](double prob, Eigen::MatrixXd& dest) {
    dest.resize(horizon + 1, n);
    std::vector<double> cell(draws.size());
    for (int h = 0; h <= horizon; ++h)
      for (long v = 0; v < n; ++v) {
        for (size_t dr = 0; dr < draws.size(); ++dr) cell[dr] = out.responses[dr](h, v);
        dest(h, v) = quantile(cell, prob);
      }
  };
  fill_quantile(0.05, out.q05);
  fill_quantile(0.16, out.q16);
  fill_quantile(0.50, out.q50);
  fill_quantile(0.84, out.q84);
  fill_quantile(0.95, out.q95);
  return out;
}

StabilityReport stability_check(const PosteriorDraw& draw) {
  const long n = draw.sigma.rows();
  const long m = draw.b.rows();
  const int p = static_cast<int>((m - 1) / n);
  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(n * p, n * p);
  for (int j = 0; j < p; ++j) companion.block(0, static_cast<long>(j) * n, n, n) = draw.lag_block(j);
  if (p > 1)
    companion.block(n, 0, n * (p - 1), n * (p - 1)) =
        Eigen::MatrixXd::Identity(n * (p - 1), n * (p - 1));

  const Eigen::VectorXcd eigenvalues = Eigen::EigenSolver<Eigen::MatrixXd>(companion, false).eigenvalues();
  StabilityReport report;
  report.spectral_radius = eigenvalues.cwiseAbs().maxCoeff();
  report.stable = report.spectral_radius < 1.0;
  return report;
}

}  // namespace panelshock
