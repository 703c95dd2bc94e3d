#include "panelshock/decomposition.hpp"

#include <cmath>

#include "panelshock/errors.hpp"

namespace panelshock {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kHalfPi = 0.5 * kPi;

}  // namespace

const char* to_string(DecompositionMethod m) {
  return m == DecompositionMethod::rotation ? "rotation" : "poor_man";
}

SurpriseMatrix SurpriseMatrix::from_events(const std::vector<EventSurprise>& events) {
  SurpriseMatrix out;
  out.m.resize(static_cast<long>(events.size()), 2);
  out.dates.reserve(events.size());
  for (size_t t = 0; t < events.size(); ++t) {
    const auto& e = events[t];
    if (!std::isfinite(e.i_total) || !std::isfinite(e.s))
      fail(ErrorCategory::ParseError, "non-finite surprise at " + format_date(e.date));
    if (t > 0 && !(events[t - 1].date < e.date))
      fail(ErrorCategory::ParseError, "event dates not strictly increasing at " + format_date(e.date));
    out.m(static_cast<long>(t), 0) = e.i_total;
    out.m(static_cast<long>(t), 1) = e.s;
    out.dates.push_back(e.date);
  }
  return out;
}

QrFactors qr_signed(const SurpriseMatrix& m, double tol) {
  const long t = m.rows();
  if (t < 2) fail(ErrorCategory::RankDeficient, "need at least 2 events, got " + std::to_string(t));

  Eigen::HouseholderQR<Eigen::MatrixXd> qr(m.m);
  Eigen::MatrixXd thin_q = qr.householderQ() * Eigen::MatrixXd::Identity(t, 2);
  Eigen::Matrix2d r = qr.matrixQR().topRows<2>().triangularView<Eigen::Upper>();

  // Absorb signs into Q so the diagonal of R is positive.
  for (int j = 0; j < 2; ++j) {
    if (r(j, j) < 0.0) {
      r.row(j) = -r.row(j);
      thin_q.col(j) = -thin_q.col(j);
    }
  }

  const double scale = m.m.norm();
  if (r(0, 0) <= tol * scale || r(1, 1) <= tol * scale)
    fail(ErrorCategory::RankDeficient, "surprise columns are collinear within tolerance");

  QrFactors out;
  out.q = thin_q;
  out.r = r;
  return out;
}

double rotation_angle(const QrFactors& r, double w) {
  if (!(w > 0.0 && w < 1.0))
    fail(ErrorCategory::InvalidWeight, "weight must lie in (0,1), got " + std::to_string(w));
  const double r12 = r.r(0, 1);
  const double r22 = r.r(1, 1);
  if (r12 > 0.0) return (1.0 - w) * std::atan(r12 / r22) + w * kHalfPi;
  const double upper = r12 == 0.0 ? kHalfPi : std::atan(-r22 / r12);
  return w * upper;
}

ShockDecomposition decompose_rotation(const SurpriseMatrix& m, double w) {
  const QrFactors f = qr_signed(m);
  const double alpha = rotation_angle(f, w);

  constexpr double angle_tol = 1e-12;
  if (alpha < angle_tol || alpha > kHalfPi - angle_tol)
    fail(ErrorCategory::DegenerateAngle, "rotation angle collapses a component: alpha=" + std::to_string(alpha));

  const double c = std::cos(alpha);
  const double s = std::sin(alpha);
  const double r11 = f.r(0, 0);
  const double r12 = f.r(0, 1);
  const double r22 = f.r(1, 1);

  Eigen::Matrix2d rot;  // P(alpha)
  rot << c, s, -s, c;
  const Eigen::Vector2d d(r11 * c, r11 * s);

  ShockDecomposition out;
  out.method = DecompositionMethod::rotation;
  out.dates = m.dates;
  out.u = (f.q * rot) * d.asDiagonal();
  out.alpha = alpha;
  out.w = w;

  // C = D^{-1} P' R reduced: the first column is identically one, the second
  // carries the stock-market loadings.
  Eigen::Matrix2d loading;
  loading << 1.0, (r12 - r22 * s / c) / r11,
             1.0, (r12 + r22 * c / s) / r11;
  out.c = loading;

  if (!(loading(0, 1) < 0.0 && loading(1, 1) > 0.0))
    fail(ErrorCategory::DegenerateAngle, "sign restrictions violated at alpha=" + std::to_string(alpha));
  return out;
}

ShockDecomposition decompose_poor_man(const std::vector<EventSurprise>& events) {
  if (events.empty()) fail(ErrorCategory::EmptySample, "no events to classify");
  ShockDecomposition out;
  out.method = DecompositionMethod::poor_man;
  out.u.resize(static_cast<long>(events.size()), 2);
  out.dates.reserve(events.size());
  for (size_t t = 0; t < events.size(); ++t) {
    const auto& e = events[t];
    const bool monetary = e.i_total * e.s <= 0.0;
    out.u(static_cast<long>(t), 0) = monetary ? e.i_total : 0.0;
    out.u(static_cast<long>(t), 1) = monetary ? 0.0 : e.i_total;
    out.dates.push_back(e.date);
  }
  return out;
}

double variance_share(const ShockDecomposition& d) {
  const double total = d.i_total().squaredNorm();
  if (total == 0.0) fail(ErrorCategory::ZeroVariance, "i_total is identically zero");
  return d.u.col(0).squaredNorm() / total;
}

CalibratedWeight calibrate_weight(const SurpriseMatrix& m, double target_share) {
  if (!(target_share > 0.0 && target_share < 1.0))
    fail(ErrorCategory::InvalidWeight, "target share must lie in (0,1)");

  const auto share_at = [&m](double w) { return variance_share(decompose_rotation(m, w)); };

  constexpr double eps = 1e-9;
  double lo = eps, hi = 1.0 - eps;
  double share_lo = share_at(lo);
  double share_hi = share_at(hi);

  // share(w) = cos^2(alpha(w)) decreases in w; verify on a coarse grid and
  // fall back to the smallest bracketing interval if that ever fails.
  CalibratedWeight out;
  constexpr int grid = 64;
  double prev_w = lo, prev_share = share_lo;
  double bracket_lo = lo, bracket_hi = hi;
  bool bracketed = false;
  for (int k = 1; k <= grid; ++k) {
    const double wk = k == grid ? hi : lo + (hi - lo) * k / grid;
    const double sk = k == grid ? share_hi : share_at(wk);
    if (sk > prev_share + 1e-12) {
      out.monotone = false;
      out.diagnostic = "variance share not monotone near w=" + std::to_string(wk);
    }
    if (!bracketed && (prev_share - target_share) * (sk - target_share) <= 0.0) {
      bracket_lo = prev_w;
      bracket_hi = wk;
      bracketed = true;  // smallest root: keep the first sign change
    }
    prev_w = wk;
    prev_share = sk;
  }
  if (!bracketed)
    fail(ErrorCategory::NoSolution,
         "target share " + std::to_string(target_share) + " outside attainable range [" +
             std::to_string(share_hi) + ", " + std::to_string(share_lo) + "]");

  double f_lo = share_at(bracket_lo) - target_share;
  for (int it = 0; it < 200 && bracket_hi - bracket_lo > 1e-14; ++it) {
    const double mid = 0.5 * (bracket_lo + bracket_hi);
    const double f_mid = share_at(mid) - target_share;
    if (f_lo * f_mid <= 0.0) {
      bracket_hi = mid;
    } else {
      bracket_lo = mid;
      f_lo = f_mid;
    }
  }
  out.w = 0.5 * (bracket_lo + bracket_hi);
  out.achieved_share = share_at(out.w);
  if (std::abs(out.achieved_share - target_share) > 1e-6)
    fail(ErrorCategory::NoSolution, "bisection did not reach the target share within 1e-6");
  return out;
}

MonthlySeries aggregate_monthly(const std::vector<Date>& dates, const Eigen::VectorXd& values,
                                const MonthRange& calendar) {
  if (static_cast<long>(dates.size()) != values.size())
    fail(ErrorCategory::Internal, "dates/values length mismatch");
  MonthlySeries out;
  out.range = calendar;
  out.values = Eigen::VectorXd::Zero(calendar.length());
  for (size_t t = 0; t < dates.size(); ++t) {
    const YearMonth m = month_of(dates[t]);
    if (!calendar.contains(m))
      fail(ErrorCategory::OutOfRange,
           "event on " + format_date(dates[t]) + " outside calendar " +
               format_month(calendar.start) + ".." + format_month(calendar.end));
    out.values[m.index() - calendar.start.index()] += values[static_cast<long>(t)];
  }
  return out;
}

}  // namespace panelshock
