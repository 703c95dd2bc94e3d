#ifndef PANELSHOCK_DECOMPOSITION_HPP
#define PANELSHOCK_DECOMPOSITION_HPP

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "panelshock/dates.hpp"

namespace panelshock {

// One policy-meeting observation: interest-rate surprise (basis points) and
// stock-index surprise (percent) from the same announcement window.
struct EventSurprise {
  Date date;
  double i_total = 0.0;
  double s = 0.0;
};

// T x 2 surprise matrix, column 0 = i_total, column 1 = s.
struct SurpriseMatrix {
  Eigen::MatrixX2d m;
  std::vector<Date> dates;

  static SurpriseMatrix from_events(const std::vector<EventSurprise>& events);
  long rows() const { return m.rows(); }
};

// Thin QR factors of the surprise matrix with the diagonal of R normalized
// positive (column signs absorbed into Q).
struct QrFactors {
  Eigen::MatrixX2d q;  // column-orthonormal
  Eigen::Matrix2d r;   // upper-triangular, r(0,0) > 0, r(1,1) > 0
};

enum class DecompositionMethod { rotation, poor_man };

const char* to_string(DecompositionMethod m);

// Orthogonal split of the rate surprise into a pure-monetary-policy column
// and an information-disclosure column: M = U C with U = (i_mp, i_id).
//
// The loading matrix c, the rotation angle and the weight exist only for the
// rotation method; the poor-man classifier assigns each event wholesale.
struct ShockDecomposition {
  Eigen::MatrixX2d u;  // column 0 = i_mp, column 1 = i_id
  std::vector<Date> dates;
  DecompositionMethod method = DecompositionMethod::rotation;
  std::optional<Eigen::Matrix2d> c;  // row k = (1, loading of s on shock k)
  std::optional<double> alpha;       // radians
  std::optional<double> w;

  Eigen::VectorXd i_mp() const { return u.col(0); }
  Eigen::VectorXd i_id() const { return u.col(1); }
  Eigen::VectorXd i_total() const { return u.col(0) + u.col(1); }
};

struct CalibratedWeight {
  double w = 0.0;
  double achieved_share = 0.0;
  bool monotone = true;         // share(w) should be strictly decreasing
  std::string diagnostic;       // set when the curve misbehaved
};

// Monthly aggregate of event-level values: months with no event carry 0.
struct MonthlySeries {
  MonthRange range;
  Eigen::VectorXd values;
};

// QR with positive-diagonal R. Throws RankDeficient when the two surprise
// columns are collinear within tolerance.
QrFactors qr_signed(const SurpriseMatrix& m, double tol = 1e-12);

// Point inside the admissible rotation range at convex coordinate w:
//   r12 > 0 :  alpha = (1-w) * atan(r12/r22) + w * pi/2
//   r12 <= 0:  alpha = w * atan(-r22/r12), continuity limit w * pi/2 at r12 = 0.
// Any such alpha keeps c_mp < 0 and c_id > 0. Throws InvalidWeight outside (0,1).
double rotation_angle(const QrFactors& r, double w);

// Full rotation decomposition: U = Q P(alpha) D, C = D^{-1} P' R with
// D = diag(r11 cos(alpha), r11 sin(alpha)). Throws DegenerateAngle when alpha
// collapses to 0 or pi/2 (one component would vanish).
ShockDecomposition decompose_rotation(const SurpriseMatrix& m, double w);

// Event-level classifier: everything to MP when i_total * s <= 0, to ID
// otherwise (a zero product counts as MP, including boundary zeros).
ShockDecomposition decompose_poor_man(const std::vector<EventSurprise>& events);

// var(i_mp) / var(i_total) with variances as uncentered second moments
// (sums of squares / T), the convention under which the orthogonal split is
// exact. Throws ZeroVariance when i_total is identically zero.
double variance_share(const ShockDecomposition& d);

// Bisection for the weight whose rotation decomposition attains the target
// MP variance share within 1e-6; NoSolution when the attainable range
// excludes the target.
CalibratedWeight calibrate_weight(const SurpriseMatrix& m, double target_share);

// Within-month sums over the calendar; 0 where no event falls. Throws
// OutOfRange when an event lies outside the calendar.
MonthlySeries aggregate_monthly(const std::vector<Date>& dates, const Eigen::VectorXd& values,
                                const MonthRange& calendar);

}  // namespace panelshock

#endif
