#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "panelshock/decomposition.hpp"
#include "panelshock/errors.hpp"
#include "panelshock/rng.hpp"

using namespace panelshock;

namespace {

constexpr double kPi = 3.14159265358979323846;

SurpriseMatrix matrix_from(const Eigen::MatrixXd& m) {
  SurpriseMatrix out;
  out.m = m;
  out.dates.reserve(static_cast<size_t>(m.rows()));
  for (long t = 0; t < m.rows(); ++t)
    out.dates.push_back(Date{2004 + static_cast<int>(t) / 12, static_cast<int>(t) % 12 + 1, 15});
  return out;
}

SurpriseMatrix random_matrix(Rng& rng, long rows) {
  Eigen::MatrixXd m(rows, 2);
  for (long t = 0; t < rows; ++t) {
    m(t, 0) = rng.normal();
    m(t, 1) = rng.normal();
  }
  return matrix_from(m);
}

}  // namespace

TEST_CASE("qr_signed identity cases") {
  Eigen::MatrixXd m(2, 2);
  m << 1, 0, 0, 1;
  const QrFactors f = qr_signed(matrix_from(m));
  CHECK((f.q - Eigen::MatrixXd::Identity(2, 2)).norm() == doctest::Approx(0.0).epsilon(1e-14));
  CHECK((f.r - Eigen::Matrix2d::Identity()).norm() == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("qr_signed absorbs signs into Q") {
  Eigen::MatrixXd m(2, 2);
  m << -1, 0, 0, 1;
  const QrFactors f = qr_signed(matrix_from(m));
  CHECK(f.q(0, 0) == doctest::Approx(-1.0));
  CHECK(f.q(1, 1) == doctest::Approx(1.0));
  CHECK((f.r - Eigen::Matrix2d::Identity()).norm() == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(f.r(0, 0) > 0.0);
  CHECK(f.r(1, 1) > 0.0);
}

TEST_CASE("qr_signed matches the Gram-Schmidt oracle") {
  Eigen::MatrixXd m(3, 2);
  m << 1, 1, 1, -1, 0, 1;
  const QrFactors f = qr_signed(matrix_from(m));
  Eigen::MatrixXd q_ref, r_ref;
  oracles::gram_schmidt_qr(m, q_ref, r_ref);
  CHECK((f.q - q_ref).norm() < 1e-12);
  CHECK((f.r - r_ref).norm() < 1e-12);
}

TEST_CASE("qr_signed rejects collinear columns") {
  Eigen::MatrixXd m(3, 2);
  m << 1, 2, 2, 4, 3, 6;
  CHECK_THROWS_AS(qr_signed(matrix_from(m)), Error);
  Eigen::MatrixXd one_row(1, 2);
  one_row << 1, 2;
  CHECK_THROWS_AS(qr_signed(matrix_from(one_row)), Error);
}

TEST_CASE("qr_signed property: reconstruction and orthonormality") {
  Rng rng(91);
  for (int rep = 0; rep < 200; ++rep) {
    const SurpriseMatrix m = random_matrix(rng, 5 + rep % 40);
    const QrFactors f = qr_signed(m);
    CHECK((f.q * f.r - m.m).lpNorm<Eigen::Infinity>() < 1e-12 * m.m.lpNorm<Eigen::Infinity>() + 1e-14);
    CHECK((f.q.transpose() * f.q - Eigen::Matrix2d::Identity()).norm() < 1e-12);
    CHECK(f.r(0, 0) > 0.0);
    CHECK(f.r(1, 1) > 0.0);
    CHECK(f.r(1, 0) == 0.0);
  }
}

TEST_CASE("rotation_angle limit and endpoint cases") {
  QrFactors f;
  f.r << 1.0, 0.0, 0.0, 1.0;
  CHECK(rotation_angle(f, 0.5) == doctest::Approx(kPi / 4));

  f.r << 1.0, 1.0, 0.0, 1.0;  // r12 > 0
  CHECK(rotation_angle(f, 0.999999) == doctest::Approx(kPi / 2).epsilon(1e-5));
  CHECK(rotation_angle(f, 0.999999) < kPi / 2);

  CHECK_THROWS_AS(rotation_angle(f, 0.0), Error);
  CHECK_THROWS_AS(rotation_angle(f, 1.0), Error);
  CHECK_THROWS_AS(rotation_angle(f, -0.2), Error);
}

TEST_CASE("rotation_angle median of the r12 > 0 interval") {
  QrFactors f;
  f.r << 1.0, 1.0, 0.0, 1.0;
  const double alpha = rotation_angle(f, 0.5);
  CHECK(alpha == doctest::Approx(3.0 * kPi / 8));

  // direct multiplication D^{-1} P' R with r11 = 1
  const double c = std::cos(alpha), s = std::sin(alpha);
  Eigen::Matrix2d p, d;
  p << c, s, -s, c;
  d << c, 0, 0, s;
  const Eigen::Matrix2d loading = d.inverse() * p.transpose() * f.r;
  CHECK(loading(0, 0) == doctest::Approx(1.0));
  CHECK(loading(1, 0) == doctest::Approx(1.0));
  CHECK(loading(0, 1) < 0.0);  // c_mp
  CHECK(loading(1, 1) > 0.0);  // c_id
}

TEST_CASE("decompose_rotation invariants on random inputs") {
  Rng rng(1234);
  for (int rep = 0; rep < 300; ++rep) {
    const SurpriseMatrix m = random_matrix(rng, 8 + rep % 60);
    const double w = rng.uniform(0.05, 0.95);
    const ShockDecomposition d = decompose_rotation(m, w);

    // unit first column of C, sign restrictions
    CHECK((*d.c)(0, 0) == 1.0);
    CHECK((*d.c)(1, 0) == 1.0);
    CHECK((*d.c)(0, 1) < 0.0);
    CHECK((*d.c)(1, 1) > 0.0);

    // reconstruction and adding-up
    const double scale = m.m.lpNorm<Eigen::Infinity>();
    CHECK((d.u * *d.c - m.m).lpNorm<Eigen::Infinity>() <= 1e-10 * scale);
    CHECK((d.i_total() - m.m.col(0)).lpNorm<Eigen::Infinity>() <= 1e-12 * scale);

    // orthogonality relative to the component size
    CHECK(std::abs(d.u.col(0).dot(d.u.col(1))) <= 1e-10 * d.u.squaredNorm());
  }
}

TEST_CASE("decompose_rotation recovers a known latent split (grid oracle)") {
  Rng rng(777);
  // Build M = U0 C0 with orthogonal U0 and admissible C0.
  const long t_len = 50;
  Eigen::MatrixXd g(t_len, 2);
  for (long t = 0; t < t_len; ++t) {
    g(t, 0) = rng.normal();
    g(t, 1) = rng.normal();
  }
  Eigen::MatrixXd u0 = g;
  u0.col(1) -= (u0.col(0).dot(u0.col(1)) / u0.col(0).squaredNorm()) * u0.col(0);
  u0.col(0) *= 2.0 / u0.col(0).norm() * std::sqrt(static_cast<double>(t_len));
  u0.col(1) *= 1.5 / u0.col(1).norm() * std::sqrt(static_cast<double>(t_len));
  Eigen::Matrix2d c0;
  c0 << 1.0, -0.8, 1.0, 1.1;
  const SurpriseMatrix m = matrix_from(u0 * c0);

  const double alpha_star = oracles::closest_angle(m.m, u0, 1e-4);
  const double share_oracle = oracles::rotation_share(m.m, alpha_star);
  const double share_true = u0.col(0).squaredNorm() / m.m.col(0).squaredNorm();
  CHECK(share_oracle == doctest::Approx(share_true).epsilon(1e-3));

  // The library decomposition at the matching weight reproduces the split.
  const QrFactors f = qr_signed(m);
  double w_star;
  if (f.r(0, 1) > 0.0) {
    const double lower = std::atan(f.r(0, 1) / f.r(1, 1));
    w_star = (alpha_star - lower) / (kPi / 2 - lower);
  } else {
    const double upper = f.r(0, 1) == 0.0 ? kPi / 2 : std::atan(-f.r(1, 1) / f.r(0, 1));
    w_star = alpha_star / upper;
  }
  const ShockDecomposition d = decompose_rotation(m, w_star);
  CHECK(variance_share(d) == doctest::Approx(share_true).epsilon(1e-3));
  CHECK((d.u - u0).lpNorm<Eigen::Infinity>() < 1e-3 * u0.lpNorm<Eigen::Infinity>());
}

TEST_CASE("poor man classification matches the product rule") {
  std::vector<EventSurprise> events{
      {Date{2004, 1, 7}, 10.0, -0.5},  // opposite co-movement: MP
      {Date{2004, 2, 4}, 10.0, 0.5},   // same co-movement: ID
      {Date{2004, 3, 3}, 0.0, 2.0},    // zero product: MP branch
  };
  const ShockDecomposition d = decompose_poor_man(events);
  CHECK(d.u(0, 0) == 10.0);
  CHECK(d.u(0, 1) == 0.0);
  CHECK(d.u(1, 0) == 0.0);
  CHECK(d.u(1, 1) == 10.0);
  CHECK(d.u(2, 0) == 0.0);
  CHECK(d.u(2, 1) == 0.0);
  CHECK(!d.c.has_value());
  CHECK_THROWS_AS(decompose_poor_man({}), Error);
}

TEST_CASE("poor man classification invariant to positive rescaling of s") {
  Rng rng(5150);
  for (int rep = 0; rep < 100; ++rep) {
    std::vector<EventSurprise> events;
    for (int t = 0; t < 24; ++t)
      events.push_back(
          EventSurprise{Date{2004 + t / 12, t % 12 + 1, 10}, rng.normal(), rng.normal()});
    std::vector<EventSurprise> scaled = events;
    const double k = rng.uniform(0.1, 10.0);
    for (auto& e : scaled) e.s *= k;
    const ShockDecomposition a = decompose_poor_man(events);
    const ShockDecomposition b = decompose_poor_man(scaled);
    CHECK(a.u == b.u);
  }
}

TEST_CASE("variance_share on poor man extremes") {
  std::vector<EventSurprise> all_mp{{Date{2004, 1, 7}, 5.0, -1.0}, {Date{2004, 2, 4}, -3.0, 1.0}};
  CHECK(variance_share(decompose_poor_man(all_mp)) == 1.0);

  std::vector<EventSurprise> all_id{{Date{2004, 1, 7}, 5.0, 1.0}, {Date{2004, 2, 4}, -3.0, -1.0}};
  CHECK(variance_share(decompose_poor_man(all_id)) == 0.0);

  std::vector<EventSurprise> zeros{{Date{2004, 1, 7}, 0.0, 1.0}, {Date{2004, 2, 4}, 0.0, -1.0}};
  CHECK_THROWS_AS(variance_share(decompose_poor_man(zeros)), Error);
}

TEST_CASE("calibrate_weight fixed point") {
  Rng rng(31);
  const SurpriseMatrix m = random_matrix(rng, 80);
  const double share_mid = variance_share(decompose_rotation(m, 0.5));
  const CalibratedWeight cal = calibrate_weight(m, share_mid);
  CHECK(cal.w == doctest::Approx(0.5).epsilon(1e-4));
  CHECK(cal.achieved_share == doctest::Approx(share_mid).epsilon(1e-6));
  CHECK(cal.monotone);
}

TEST_CASE("calibrate_weight matches the grid-search oracle") {
  Rng rng(32);
  Eigen::MatrixXd raw(120, 2);
  for (long t = 0; t < 120; ++t) {
    const double mp = rng.normal() * 1.4;
    const double id = rng.normal();
    raw(t, 0) = mp + id;
    raw(t, 1) = -1.1 * mp + 0.9 * id;  // negative co-movement dominates
  }
  const SurpriseMatrix m = matrix_from(raw);
  const double target = 0.68;
  const CalibratedWeight cal = calibrate_weight(m, target);
  CHECK(cal.achieved_share == doctest::Approx(target).epsilon(1e-6));

  const double alpha_oracle = oracles::angle_for_share(m.m, target, 1e-4);
  const ShockDecomposition d = decompose_rotation(m, cal.w);
  CHECK(*d.alpha == doctest::Approx(alpha_oracle).epsilon(1e-3));
}

TEST_CASE("calibrate_weight reports unattainable targets") {
  // Strong positive co-movement: r12 > 0 caps the attainable MP share at
  // r22^2/(r12^2+r22^2) = 1/2 here, so 0.9 has no solution.
  Eigen::MatrixXd raw(40, 2);
  Rng rng(33);
  for (long t = 0; t < 40; ++t) {
    const double x = rng.normal();
    raw(t, 0) = x + 0.02 * rng.normal();
    raw(t, 1) = x + 0.02 * rng.normal();
  }
  CHECK_THROWS_AS(calibrate_weight(matrix_from(raw), 0.9), Error);
  CHECK_THROWS_AS(calibrate_weight(matrix_from(raw), 1.5), Error);
}

TEST_CASE("weight ordering: alpha strictly increasing in w when r12 <= 0") {
  Rng rng(34);
  Eigen::MatrixXd raw(60, 2);
  for (long t = 0; t < 60; ++t) {
    const double mp = rng.normal();
    raw(t, 0) = mp + 0.4 * rng.normal();
    raw(t, 1) = -mp + 0.4 * rng.normal();
  }
  const SurpriseMatrix m = matrix_from(raw);
  const QrFactors f = qr_signed(m);
  REQUIRE(f.r(0, 1) <= 0.0);
  double prev = 0.0;
  for (double w : {0.1, 0.3, 0.5, 0.7, 0.9}) {
    const double alpha = rotation_angle(f, w);
    CHECK(alpha > prev);
    prev = alpha;
  }
  const ShockDecomposition d1 = decompose_rotation(m, 0.1);
  const ShockDecomposition d5 = decompose_rotation(m, 0.5);
  const ShockDecomposition d9 = decompose_rotation(m, 0.9);
  CHECK((d1.u - d5.u).norm() > 1e-6);
  CHECK((d5.u - d9.u).norm() > 1e-6);
}

TEST_CASE("aggregate_monthly sums within months and zero-fills") {
  const MonthRange calendar{{2004, 1}, {2004, 4}};
  std::vector<Date> dates{{2004, 1, 7}, {2004, 1, 21}, {2004, 3, 3}};
  Eigen::VectorXd values(3);
  values << 5.0, 3.0, -2.0;
  const MonthlySeries series = aggregate_monthly(dates, values, calendar);
  REQUIRE(series.values.size() == 4);
  CHECK(series.values[0] == 8.0);   // two events summed
  CHECK(series.values[1] == 0.0);   // no meeting
  CHECK(series.values[2] == -2.0);
  CHECK(series.values[3] == 0.0);

  CHECK_THROWS_AS(aggregate_monthly({Date{2005, 1, 1}}, Eigen::VectorXd::Ones(1), calendar), Error);
}

TEST_CASE("aggregate_monthly golden series on the synthetic calendar") {
  // Hand-computed: meetings on 2004-01-08 (+4), 2004-02-05 (-2), 2004-02-19 (+7),
  // 2004-04-01 (+1); window 2004-01..2004-05.
  std::vector<Date> dates{{2004, 1, 8}, {2004, 2, 5}, {2004, 2, 19}, {2004, 4, 1}};
  Eigen::VectorXd values(4);
  values << 4.0, -2.0, 7.0, 1.0;
  const MonthlySeries series = aggregate_monthly(dates, values, {{2004, 1}, {2004, 5}});
  Eigen::VectorXd expected(5);
  expected << 4.0, 5.0, 0.0, 1.0, 0.0;
  CHECK((series.values - expected).lpNorm<Eigen::Infinity>() == 0.0);
}
