#include "panelshock/lab.hpp"

#include <cmath>

#include "panelshock/errors.hpp"
#include "panelshock/local_projection.hpp"
#include "panelshock/parallel.hpp"
#include "panelshock/rng.hpp"

namespace panelshock {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr int kBurnIn = 100;

std::string country_name(int i) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "C%02d", i + 1);
  return buf;
}

}  // namespace

DgpSpec DgpSpec::benchmark(std::uint64_t seed) {
  DgpSpec spec;
  spec.seed = seed;
  spec.n_countries = 23;
  spec.months = 156;

  // Poor-man-style MP share of 0.68 in the latent variances; loadings sized
  // so rate surprises read in basis points and stock surprises in percent.
  spec.latent_mp_sd = 8.0;
  spec.latent_id_sd = 8.0 * std::sqrt(0.32 / 0.68);
  spec.true_c << 1.0, -0.12,
                 1.0, 0.09;

  const int n = 5;
  Eigen::MatrixXd a1 = Eigen::MatrixXd::Zero(n, n);
  a1 << 0.00, 0.00, 0.00, 0.00, 0.00,
        0.20, 0.45, 0.05, 0.00, 0.00,
       -0.10, 0.05, 0.45, 0.05, 0.00,
       -0.02, 0.00, 0.05, 0.50, 0.00,
       -0.15, 0.00, 0.08, 0.00, 0.40;
  Eigen::MatrixXd a2 = Eigen::MatrixXd::Zero(n, n);
  a2.diagonal() << 0.0, 0.15, 0.15, 0.15, 0.15;
  spec.true_a = {a1, a2};

  // Contemporaneous loadings through the innovation covariance: a rate hike
  // depreciates the currency and lowers activity and equity on impact.
  Eigen::MatrixXd sigma = Eigen::MatrixXd::Zero(n, n);
  sigma.diagonal() << 1.0, 1.0, 0.8, 0.3, 1.2;
  const Eigen::Vector4d load(0.50, -0.25, -0.05, -0.50);
  sigma.block<4, 1>(1, 0) = load;
  sigma.block<1, 4>(0, 1) = load.transpose();
  spec.true_sigma = sigma;

  spec.variable_names = {"shock", "ner", "ip", "cpi", "equity"};
  spec.irf_signs = {1, 1, -1, -1, -1};
  return spec;
}

std::vector<Date> DgpSpec::meetings() const {
  if (!meeting_calendar.empty()) return meeting_calendar;
  std::vector<Date> out;
  out.reserve(static_cast<size_t>(months));
  for (int k = 0; k < months; ++k) {
    const YearMonth m = YearMonth::from_index(start.index() + k);
    out.push_back(Date{m.year, m.month, 15});
  }
  return out;
}

void DgpSpec::validate() const {
  if (n_countries < 1) fail(ErrorCategory::ConfigError, "need at least one country");
  if (months < 12) fail(ErrorCategory::ConfigError, "need at least 12 months");
  if (true_c(0, 0) != 1.0 || true_c(1, 0) != 1.0)
    fail(ErrorCategory::ConfigError, "true_c first column must be ones");
  if (!(true_c(0, 1) < 0.0 && true_c(1, 1) > 0.0))
    fail(ErrorCategory::ConfigError, "true_c must satisfy c_mp < 0 and c_id > 0");
  if (!(latent_mp_sd >= 0.0 && latent_id_sd >= 0.0))
    fail(ErrorCategory::ConfigError, "latent shock scales must be nonnegative");
  if (true_a.empty()) fail(ErrorCategory::ConfigError, "need at least one lag block");
  const long n = true_sigma.rows();
  if (true_sigma.cols() != n || n < 2) fail(ErrorCategory::ConfigError, "true_sigma must be square, n >= 2");
  for (const auto& a : true_a) {
    if (a.rows() != n || a.cols() != n) fail(ErrorCategory::ConfigError, "lag block shape mismatch");
    if (a.row(0).cwiseAbs().maxCoeff() != 0.0)
      fail(ErrorCategory::ConfigError, "first row of each lag block must be zero (common shock)");
  }
  if (Eigen::LLT<Eigen::MatrixXd>(true_sigma).info() != Eigen::Success)
    fail(ErrorCategory::ConfigError, "true_sigma is not positive definite");
  const double radius = companion_spectral_radius(true_a);
  if (radius >= 1.0)
    fail(ErrorCategory::ExplosiveDgp, "companion spectral radius " + std::to_string(radius));
  if (!variable_names.empty() && static_cast<long>(variable_names.size()) != n)
    fail(ErrorCategory::ConfigError, "variable_names size mismatch");
  if (!irf_signs.empty() && static_cast<long>(irf_signs.size()) != n)
    fail(ErrorCategory::ConfigError, "irf_signs size mismatch");
}

double companion_spectral_radius(const std::vector<Eigen::MatrixXd>& a) {
  const long n = a.front().rows();
  const int p = static_cast<int>(a.size());
  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(n * p, n * p);
  for (int j = 0; j < p; ++j) companion.block(0, static_cast<long>(j) * n, n, n) = a[static_cast<size_t>(j)];
  if (p > 1)
    companion.block(n, 0, n * (p - 1), n * (p - 1)) = Eigen::MatrixXd::Identity(n * (p - 1), n * (p - 1));
  return Eigen::EigenSolver<Eigen::MatrixXd>(companion, false).eigenvalues().cwiseAbs().maxCoeff();
}

Eigen::MatrixXd iterate_var(const std::vector<Eigen::MatrixXd>& a, const Eigen::MatrixXd& innovations) {
  const long t_len = innovations.rows();
  const long n = innovations.cols();
  const int p = static_cast<int>(a.size());
  Eigen::MatrixXd path(t_len, n);
  for (long t = 0; t < t_len; ++t) {
    Eigen::RowVectorXd row = innovations.row(t);
    for (int j = 1; j <= p && t - j >= 0; ++j)
      row += path.row(t - j) * a[static_cast<size_t>(j - 1)].transpose();
    path.row(t) = row;
  }
  return path;
}

SimulatedSurprises simulate_surprises(const DgpSpec& spec) {
  spec.validate();
  const auto dates = spec.meetings();
  const long t_len = static_cast<long>(dates.size());
  if (t_len < 2) fail(ErrorCategory::ConfigError, "need at least two meetings");

  Rng rng = Rng::substream(spec.seed, "lab.surprises");
  Eigen::MatrixXd g(t_len, 2);
  for (long t = 0; t < t_len; ++t) {
    g(t, 0) = rng.normal();
    g(t, 1) = rng.normal();
  }
  // Exact orthogonal latents with the configured scales.
  Eigen::VectorXd u_mp = g.col(0);
  Eigen::VectorXd u_id = g.col(1) - (u_mp.dot(g.col(1)) / u_mp.squaredNorm()) * u_mp;
  const double root_t = std::sqrt(static_cast<double>(t_len));
  u_mp *= spec.latent_mp_sd * root_t / u_mp.norm();
  u_id *= spec.latent_id_sd * root_t / u_id.norm();

  SimulatedSurprises out;
  out.truth.method = DecompositionMethod::rotation;
  out.truth.dates = dates;
  out.truth.u.resize(t_len, 2);
  out.truth.u.col(0) = u_mp;
  out.truth.u.col(1) = u_id;
  out.truth.c = spec.true_c;

  const Eigen::MatrixXd m = out.truth.u * spec.true_c;
  out.events.reserve(static_cast<size_t>(t_len));
  for (long t = 0; t < t_len; ++t)
    out.events.push_back(EventSurprise{dates[static_cast<size_t>(t)], m(t, 0), m(t, 1)});

  // The rotation coordinates exist only when both latent columns are live.
  if (spec.latent_mp_sd > 0.0 && spec.latent_id_sd > 0.0) {
    out.truth.alpha = implied_alpha(out.truth);
    out.truth.w = implied_weight(SurpriseMatrix::from_events(out.events), *out.truth.alpha);
  }
  return out;
}

double implied_alpha(const ShockDecomposition& truth) {
  const double share = truth.u.col(0).squaredNorm() / truth.i_total().squaredNorm();
  return std::acos(std::sqrt(share));
}

double implied_weight(const SurpriseMatrix& m, double alpha) {
  const QrFactors f = qr_signed(m);
  const double r12 = f.r(0, 1);
  const double r22 = f.r(1, 1);
  if (r12 > 0.0) {
    const double lower = std::atan(r12 / r22);
    return (alpha - lower) / (0.5 * kPi - lower);
  }
  const double upper = r12 == 0.0 ? 0.5 * kPi : std::atan(-r22 / r12);
  return alpha / upper;
}

namespace {

PanelDataset simulate_panel_impl(const DgpSpec& spec, const Eigen::VectorXd* shock_series) {
  spec.validate();
  const long n = spec.true_sigma.rows();
  const long t_len = spec.months;
  if (shock_series && shock_series->size() != t_len)
    fail(ErrorCategory::RangeMismatch, "shock series length differs from the panel window");
  if (shock_series && !spec.common_shock)
    fail(ErrorCategory::ConfigError, "an external shock series requires the common-shock design");

  // Common-shock design: shock innovations shared by every country, burn-in
  // draws first, then either the provided series or more from the stream.
  Rng shock_rng = Rng::substream(spec.seed, "lab.panel.shock");
  const double shock_sd = std::sqrt(spec.true_sigma(0, 0));
  Eigen::VectorXd shock_innov(kBurnIn + t_len);
  for (int t = 0; t < kBurnIn; ++t) shock_innov[t] = shock_rng.normal(0.0, shock_sd);
  for (long t = 0; t < t_len; ++t)
    shock_innov[kBurnIn + t] = shock_series ? (*shock_series)[t] : shock_rng.normal(0.0, shock_sd);

  // Remaining innovations conditional on the shock draw.
  const double sigma11 = spec.true_sigma(0, 0);
  const Eigen::VectorXd gamma = spec.true_sigma.block(1, 0, n - 1, 1) / sigma11;
  const Eigen::MatrixXd cond = spec.true_sigma.block(1, 1, n - 1, n - 1) -
                               spec.true_sigma.block(1, 0, n - 1, 1) *
                                   spec.true_sigma.block(0, 1, 1, n - 1) / sigma11;
  Eigen::LLT<Eigen::MatrixXd> cond_llt(cond);
  if (cond_llt.info() != Eigen::Success)
    fail(ErrorCategory::ConfigError, "conditional innovation covariance is not positive definite");
  const Eigen::MatrixXd chol_cond = cond_llt.matrixL();
  const Eigen::MatrixXd chol_full = Eigen::LLT<Eigen::MatrixXd>(spec.true_sigma).matrixL();

  PanelDataset panel;
  panel.start = spec.start;
  panel.variables = spec.variable_names;
  if (panel.variables.empty()) {
    panel.variables.push_back("shock");
    for (long v = 1; v < n; ++v) panel.variables.push_back("v" + std::to_string(v));
  }
  panel.transforms.assign(static_cast<size_t>(n), Transform::log100);
  panel.transforms[0] = Transform::level;
  panel.countries.reserve(static_cast<size_t>(spec.n_countries));
  panel.data.reserve(static_cast<size_t>(spec.n_countries));

  for (int i = 0; i < spec.n_countries; ++i) {
    Rng rng = Rng::substream(spec.seed, "lab.panel.innov", static_cast<std::uint64_t>(i));
    Eigen::VectorXd intercept = Eigen::VectorXd::Zero(n);
    if (spec.country_intercept_sd > 0.0)
      for (long v = 1; v < n; ++v) intercept[v] = rng.normal(0.0, spec.country_intercept_sd);

    Eigen::MatrixXd innov(kBurnIn + t_len, n);
    if (spec.common_shock) {
      Eigen::VectorXd z(n - 1);
      for (long t = 0; t < kBurnIn + t_len; ++t) {
        innov(t, 0) = shock_innov[t];
        for (long v = 0; v < n - 1; ++v) z[v] = rng.normal();
        innov.row(t).tail(n - 1) =
            (gamma * shock_innov[t] + chol_cond * z).transpose() + intercept.tail(n - 1).transpose();
      }
    } else {
      Eigen::VectorXd z(n);
      for (long t = 0; t < kBurnIn + t_len; ++t) {
        for (long v = 0; v < n; ++v) z[v] = rng.normal();
        innov.row(t) = (chol_full * z + intercept).transpose();
      }
    }
    const Eigen::MatrixXd path = iterate_var(spec.true_a, innov);
    panel.countries.push_back(country_name(i));
    panel.data.push_back(path.bottomRows(t_len));
  }
  if (spec.common_shock) panel.validate();
  else panel.validate_shape();
  return panel;
}

}  // namespace

PanelDataset simulate_panel(const DgpSpec& spec, const Eigen::VectorXd& shock_series) {
  return simulate_panel_impl(spec, &shock_series);
}

PanelDataset simulate_panel(const DgpSpec& spec) { return simulate_panel_impl(spec, nullptr); }

Eigen::MatrixXd true_irf(const DgpSpec& spec, int horizon) {
  const long n = spec.true_sigma.rows();
  const int p = spec.lag_order();
  const Eigen::VectorXd impulse =
      Eigen::MatrixXd(Eigen::LLT<Eigen::MatrixXd>(spec.true_sigma).matrixL()).col(0);
  Eigen::MatrixXd resp(horizon + 1, n);
  resp.row(0) = impulse.transpose();
  for (int h = 1; h <= horizon; ++h) {
    Eigen::RowVectorXd acc = Eigen::RowVectorXd::Zero(n);
    for (int j = 1; j <= std::min(h, p); ++j)
      acc += resp.row(h - j) * spec.true_a[static_cast<size_t>(j - 1)].transpose();
    resp.row(h) = acc;
  }
  return resp;
}

BiasReport bias_experiment(const DgpSpec& spec) {
  spec.validate();
  const BiasDesign& design = spec.bias;
  if (design.replications < 1) fail(ErrorCategory::ConfigError, "need at least one replication");
  if (!(std::abs(design.rho) < 1.0)) fail(ErrorCategory::ConfigError, "bias outcome must be stationary");
  if (design.b_mp == 0.0) fail(ErrorCategory::ConfigError, "MP loading must be nonzero");

  const int h_max = design.horizon;
  const MonthRange calendar{spec.start, YearMonth::from_index(spec.start.index() + spec.months - 1)};

  struct RepResult {
    Eigen::VectorXd beta_mp, beta_id, beta_total;
    double share = 0.0;
  };
  std::vector<RepResult> reps(static_cast<size_t>(design.replications));

  LpSpec lp;
  lp.horizons = h_max;
  lp.j_y = 1;
  lp.j_x = 0;
  lp.j_i = 1;
  lp.include_country_fe = true;
  lp.include_trend = false;
  lp.threads = 1;  // replication level already runs in parallel

  const auto run_rep = [&](std::size_t r) {
    DgpSpec rep_spec = spec;
    rep_spec.seed = Rng::derive_seed(spec.seed, "lab.bias.rep", r);
    const SimulatedSurprises sim = simulate_surprises(rep_spec);

    const MonthlySeries mp = aggregate_monthly(sim.truth.dates, sim.truth.u.col(0), calendar);
    const MonthlySeries id = aggregate_monthly(sim.truth.dates, sim.truth.u.col(1), calendar);
    const Eigen::VectorXd total = mp.values + id.values;

    // Outcome panel: AR(1) response to both latent shocks plus country level.
    const long t_len = spec.months;
    std::vector<Eigen::MatrixXd> outcome(static_cast<size_t>(spec.n_countries));
    for (int i = 0; i < spec.n_countries; ++i) {
      Rng rng = Rng::substream(rep_spec.seed, "lab.bias.outcome", static_cast<std::uint64_t>(i));
      const double level = rng.normal(0.0, 1.0);
      Eigen::MatrixXd y(t_len, 1);
      double prev = 0.0;
      for (long t = 0; t < t_len; ++t) {
        prev = level + design.rho * prev + design.b_mp * mp.values[t] + design.b_id * id.values[t] +
               rng.normal(0.0, design.noise_sd);
        y(t, 0) = prev;
      }
      outcome[static_cast<size_t>(i)] = y;
    }

    const auto estimate_with = [&](const Eigen::VectorXd& shock) {
      PanelDataset panel;
      panel.start = spec.start;
      panel.variables = {"shock", "y"};
      panel.transforms = {Transform::level, Transform::level};
      for (int i = 0; i < spec.n_countries; ++i) {
        Eigen::MatrixXd block(t_len, 2);
        block.col(0) = shock;
        block.col(1) = outcome[static_cast<size_t>(i)].col(0);
        panel.countries.push_back(country_name(i));
        panel.data.push_back(block);
      }
      const LpResult res = estimate_lp(panel, lp);
      Eigen::VectorXd betas(h_max + 1);
      for (int h = 0; h <= h_max; ++h) betas[h] = res.estimates.front().cells[static_cast<size_t>(h)].beta;
      return betas;
    };

    RepResult& rep = reps[r];
    rep.beta_mp = estimate_with(mp.values);
    rep.beta_id = estimate_with(id.values);
    rep.beta_total = estimate_with(total);
    rep.share = mp.values.squaredNorm() / total.squaredNorm();
  };
  parallel_for(reps.size(), resolve_thread_count(0), run_rep);

  BiasReport report;
  report.replications = design.replications;
  for (const auto& rep : reps) report.mp_variance_share += rep.share;
  report.mp_variance_share /= static_cast<double>(design.replications);

  report.rows.resize(static_cast<size_t>(h_max + 1));
  for (int h = 0; h <= h_max; ++h) {
    BiasRow& row = report.rows[static_cast<size_t>(h)];
    row.horizon = h;
    const double decay = std::pow(design.rho, h);
    row.true_mp = design.b_mp * decay;
    row.true_id = design.b_id * decay;
    for (const auto& rep : reps) {
      row.beta_mp += rep.beta_mp[h];
      row.beta_id += rep.beta_id[h];
      row.beta_total += rep.beta_total[h];
    }
    const double nr = static_cast<double>(design.replications);
    row.beta_mp /= nr;
    row.beta_id /= nr;
    row.beta_total /= nr;
    row.attenuation = 1.0 - std::abs(row.beta_total) / std::abs(row.beta_mp);
    const double lo = std::min(std::abs(row.beta_mp), std::abs(row.beta_id));
    const double hi = std::max(std::abs(row.beta_mp), std::abs(row.beta_id));
    row.composite_between = std::abs(row.beta_total) > lo && std::abs(row.beta_total) < hi;
  }
  return report;
}

}  // namespace panelshock
