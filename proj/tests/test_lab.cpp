#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "oracles.hpp"
#include "panelshock/bvar.hpp"
#include "panelshock/errors.hpp"
#include "panelshock/lab.hpp"
#include "panelshock/rng.hpp"
#include "panelshock/stats.hpp"

using namespace panelshock;

TEST_CASE("benchmark spec is admissible and stable") {
  const DgpSpec spec = DgpSpec::benchmark(1);
  spec.validate();
  CHECK(companion_spectral_radius(spec.true_a) < 1.0);
  CHECK(spec.true_c(0, 1) < 0.0);
  CHECK(spec.true_c(1, 1) > 0.0);
  CHECK(spec.meetings().size() == 156);
}

TEST_CASE("surprise simulation: zero latents give zero surprises") {
  DgpSpec spec = DgpSpec::benchmark(2);
  spec.months = 24;
  spec.latent_mp_sd = 0.0;
  spec.latent_id_sd = 0.0;
  const SimulatedSurprises sim = simulate_surprises(spec);
  for (const auto& e : sim.events) {
    CHECK(e.i_total == 0.0);
    CHECK(e.s == 0.0);
  }
}

TEST_CASE("surprise simulation: symmetric loadings decorrelate the surprises") {
  DgpSpec spec = DgpSpec::benchmark(3);
  spec.months = 120;
  spec.true_c << 1.0, -1.0, 1.0, 1.0;
  spec.latent_mp_sd = 5.0;
  spec.latent_id_sd = 5.0;
  const SimulatedSurprises sim = simulate_surprises(spec);

  double dot = 0.0, centered_num = 0.0, mean_i = 0.0, mean_s = 0.0;
  for (const auto& e : sim.events) {
    dot += e.i_total * e.s;
    mean_i += e.i_total;
    mean_s += e.s;
  }
  mean_i /= static_cast<double>(sim.events.size());
  mean_s /= static_cast<double>(sim.events.size());
  double var_i = 0.0, var_s = 0.0;
  for (const auto& e : sim.events) {
    centered_num += (e.i_total - mean_i) * (e.s - mean_s);
    var_i += (e.i_total - mean_i) * (e.i_total - mean_i);
    var_s += (e.s - mean_s) * (e.s - mean_s);
  }
  // uncentered co-movement vanishes exactly by orthogonality of the latents
  CHECK(std::abs(dot) < 1e-8 * 25.0 * sim.events.size());
  CHECK(std::abs(centered_num / std::sqrt(var_i * var_s)) < 0.15);
}

TEST_CASE("rotation decomposition at the implied weight recovers the latent truth") {
  DgpSpec spec = DgpSpec::benchmark(4);
  spec.months = 80;
  const SimulatedSurprises sim = simulate_surprises(spec);
  const SurpriseMatrix m = SurpriseMatrix::from_events(sim.events);

  REQUIRE(sim.truth.w.has_value());
  CHECK(*sim.truth.w > 0.0);
  CHECK(*sim.truth.w < 1.0);
  const ShockDecomposition d = decompose_rotation(m, *sim.truth.w);
  CHECK((d.u - sim.truth.u).lpNorm<Eigen::Infinity>() <
        1e-8 * sim.truth.u.lpNorm<Eigen::Infinity>());
  CHECK((*d.c - *sim.truth.c).lpNorm<Eigen::Infinity>() < 1e-8);
}

TEST_CASE("identical seeds reproduce identical datasets bitwise") {
  DgpSpec spec = DgpSpec::benchmark(5);
  spec.n_countries = 3;
  spec.months = 48;
  const SimulatedSurprises s1 = simulate_surprises(spec);
  const SimulatedSurprises s2 = simulate_surprises(spec);
  CHECK(s1.truth.u == s2.truth.u);
  const PanelDataset p1 = simulate_panel(spec);
  const PanelDataset p2 = simulate_panel(spec);
  CHECK(identical(p1, p2));

  spec.seed = 6;
  const PanelDataset p3 = simulate_panel(spec);
  CHECK(!identical(p1, p3));
}

TEST_CASE("white-noise panel has negligible autocorrelation") {
  DgpSpec spec = DgpSpec::benchmark(7);
  spec.n_countries = 1;
  spec.months = 1000;
  for (auto& a : spec.true_a) a.setZero();
  spec.true_sigma = Eigen::MatrixXd::Identity(5, 5);
  const PanelDataset panel = simulate_panel(spec);
  for (long v = 0; v < panel.n_variables(); ++v) {
    const Eigen::VectorXd series = panel.data[0].col(v);
    const long t_len = series.size();
    const double mean = series.mean();
    double num = 0.0, den = 0.0;
    for (long t = 1; t < t_len; ++t) num += (series[t] - mean) * (series[t - 1] - mean);
    for (long t = 0; t < t_len; ++t) den += (series[t] - mean) * (series[t] - mean);
    CHECK(std::abs(num / den) < 0.1);
  }
}

TEST_CASE("deterministic impulse propagates along the analytic irf") {
  const DgpSpec spec = DgpSpec::benchmark(8);
  const long n = spec.true_sigma.rows();
  const int horizon = 20;

  // single unit innovation in the shock position, nothing else
  Eigen::MatrixXd innovations = Eigen::MatrixXd::Zero(horizon + 1, n);
  const Eigen::VectorXd impulse =
      Eigen::MatrixXd(Eigen::LLT<Eigen::MatrixXd>(spec.true_sigma).matrixL()).col(0);
  innovations.row(0) = impulse.transpose();
  const Eigen::MatrixXd path = iterate_var(spec.true_a, innovations);
  const Eigen::MatrixXd expected = true_irf(spec, horizon);
  CHECK((path - expected).lpNorm<Eigen::Infinity>() < 1e-12);
}

TEST_CASE("explosive dynamics are rejected") {
  DgpSpec spec = DgpSpec::benchmark(9);
  spec.true_a[0].diagonal().tail(4).setConstant(1.05);
  CHECK_THROWS_AS(spec.validate(), Error);

  DgpSpec bad_c = DgpSpec::benchmark(10);
  bad_c.true_c(0, 1) = 0.5;  // c_mp must be negative
  CHECK_THROWS_AS(bad_c.validate(), Error);
}

TEST_CASE("full chain: bvar bands on simulated panels cover the true irf") {
  // Band coverage is a statement across realizations, so average a few
  // replications rather than conditioning on a single draw of the data.
  const int reps = 5;
  const int horizon = 20;
  int cells = 0, covered = 0;
  for (int r = 0; r < reps; ++r) {
    DgpSpec dgp = DgpSpec::benchmark(Rng::derive_seed(11, "chain.rep", static_cast<std::uint64_t>(r)));
    dgp.n_countries = 10;
    dgp.months = 140;
    dgp.common_shock = false;  // simulate the pooled model itself
    const PanelDataset panel = simulate_panel(dgp);

    BvarSpec spec;
    spec.p = dgp.lag_order();
    spec.prior.lambda1 = 10.0;
    spec.draws = 400;
    spec.seed = 17;
    const auto draws = sample_posterior(spec, build_pooled_regression(panel, spec.p));
    const IrfSet irf = structural_irf(draws, horizon);
    const Eigen::MatrixXd truth = true_irf(dgp, horizon);

    std::vector<double> sample(draws.size());
    for (int h = 0; h <= horizon; ++h)
      for (long v = 0; v < panel.n_variables(); ++v) {
        for (size_t d = 0; d < draws.size(); ++d) sample[d] = irf.responses[d](h, v);
        ++cells;
        if (truth(h, v) >= quantile(sample, 0.025) && truth(h, v) <= quantile(sample, 0.975))
          ++covered;
      }
  }
  CHECK(static_cast<double>(covered) / cells >= 0.9);
}

TEST_CASE("bias experiment: perfect cancellation zeroes the composite") {
  DgpSpec spec = DgpSpec::benchmark(12);
  spec.n_countries = 6;
  spec.months = 100;
  spec.latent_mp_sd = 6.0;
  spec.latent_id_sd = 6.0;  // equal shock variances
  spec.bias.b_mp = -1.0;
  spec.bias.b_id = 1.0;  // exactly opposite effect
  spec.bias.replications = 40;
  spec.bias.horizon = 4;
  const BiasReport report = bias_experiment(spec);
  CHECK(report.mp_variance_share == doctest::Approx(0.5).epsilon(0.05));
  for (const auto& row : report.rows) {
    CHECK(std::abs(row.beta_total) < 0.05 * std::abs(row.beta_mp) + 0.01);
    CHECK(row.attenuation > 0.9);
  }
}

TEST_CASE("bias experiment: zero information effect attenuates by the variance share") {
  DgpSpec spec = DgpSpec::benchmark(13);
  spec.n_countries = 6;
  spec.months = 120;
  spec.bias.b_mp = -1.0;
  spec.bias.b_id = 0.0;
  spec.bias.replications = 60;
  spec.bias.horizon = 4;
  const BiasReport report = bias_experiment(spec);
  const double share = report.mp_variance_share;
  CHECK(share == doctest::Approx(0.68).epsilon(0.05));
  for (int h = 0; h <= 2; ++h) {
    const double ratio = std::abs(report.rows[static_cast<size_t>(h)].beta_total) /
                         std::abs(report.rows[static_cast<size_t>(h)].beta_mp);
    CHECK(ratio == doctest::Approx(share).epsilon(0.06));
  }
}

TEST_CASE("bias experiment: default opposed-sign design sits between the pure shocks") {
  DgpSpec spec = DgpSpec::benchmark(14);
  spec.n_countries = 6;
  spec.months = 100;
  spec.bias.replications = 40;
  spec.bias.horizon = 6;
  const BiasReport report = bias_experiment(spec);
  for (const auto& row : report.rows) {
    CHECK(row.composite_between);
    CHECK(row.attenuation > 0.3);
    CHECK(row.attenuation < 0.7);
  }
}

TEST_CASE("bias experiment: attenuation grows with the opposing effect") {
  double previous = -1.0;
  for (double b_id : {0.0, 0.3, 0.6}) {
    DgpSpec spec = DgpSpec::benchmark(15);
    spec.n_countries = 5;
    spec.months = 100;
    spec.bias.b_mp = -1.0;
    spec.bias.b_id = b_id;
    spec.bias.replications = 60;
    spec.bias.horizon = 2;
    const BiasReport report = bias_experiment(spec);
    const double attenuation = report.rows[0].attenuation;
    CHECK(attenuation > previous);
    previous = attenuation;
  }
}
