#include "grosc/integrator.hpp"

#include <algorithm>
#include <cmath>

namespace grosc {

namespace {

// Shampine (1982) parameter set for a 4-stage Rosenbrock method.
constexpr double kGam = 1.0 / 2.0;
constexpr double kA21 = 2.0;
constexpr double kA31 = 48.0 / 25.0;
constexpr double kA32 = 6.0 / 25.0;
constexpr double kC21 = -8.0;
constexpr double kC31 = 372.0 / 25.0;
constexpr double kC32 = 12.0 / 5.0;
constexpr double kC41 = -112.0 / 125.0;
constexpr double kC42 = -54.0 / 125.0;
constexpr double kC43 = -2.0 / 5.0;
constexpr double kB1 = 19.0 / 9.0;
constexpr double kB2 = 1.0 / 2.0;
constexpr double kB3 = 25.0 / 108.0;
constexpr double kB4 = 125.0 / 108.0;
constexpr double kE1 = 17.0 / 54.0;
constexpr double kE2 = 7.0 / 36.0;
constexpr double kE3 = 0.0;
constexpr double kE4 = 125.0 / 108.0;

constexpr double kSafety = 0.9;
constexpr double kGrow = 1.5;
constexpr double kShrink = 0.5;
constexpr double kErrcon = 0.1296;  // (kGrow/kSafety)^(1/pgrow)
constexpr double kPgrow = -0.25;
constexpr double kPshrnk = -1.0 / 3.0;

}  // namespace

Vec3 hermite(double t, double t0, const Vec3& y0, const Vec3& f0, double t1,
             const Vec3& y1, const Vec3& f1) {
  const double h = t1 - t0;
  if (h <= 0) return y1;
  const double s = (t - t0) / h;
  const double s2 = s * s;
  const double s3 = s2 * s;
  const double h00 = 2 * s3 - 3 * s2 + 1;
  const double h10 = s3 - 2 * s2 + s;
  const double h01 = -2 * s3 + 3 * s2;
  const double h11 = s3 - s2;
  return h00 * y0 + h10 * h * f0 + h01 * y1 + h11 * h * f1;
}

Mat3 RosenbrockSolver::jacobian(const Rhs3& rhs, const Vec3& y, const Vec3& /*fy*/) {
  Mat3 jac;
  for (int j = 0; j < 3; ++j) {
    const double step = std::max(std::abs(y[j]) * 1e-6, 1e-12);
    Vec3 yp = y;
    Vec3 ym = y;
    yp[j] += step;
    ym[j] -= step;
    jac.col(j) = (rhs(yp) - rhs(ym)) / (2 * step);
  }
  stats_.rhs_evaluations += 6;
  return jac;
}

double RosenbrockSolver::initial_step(const Rhs3& rhs, const Vec3& y, const Vec3& fy,
                                      double span) {
  Vec3 scale;
  for (int i = 0; i < 3; ++i) scale[i] = atol(i) + control_.rtol * std::abs(y[i]);
  const double d0 = (y.array() / scale.array()).matrix().norm() / std::sqrt(3.0);
  const double d1 = (fy.array() / scale.array()).matrix().norm() / std::sqrt(3.0);
  double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 * span : 0.01 * d0 / d1;
  h0 = std::min(h0, span);
  const Vec3 y1 = y + h0 * fy;
  const Vec3 f1 = rhs(y1);
  ++stats_.rhs_evaluations;
  const double d2 = ((f1 - fy).array() / scale.array()).matrix().norm() / std::sqrt(3.0) / h0;
  const double dm = std::max(d1, d2);
  const double h1 = dm <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dm, 0.25);
  return std::min({100 * h0, h1, span});
}

Vec3 RosenbrockSolver::advance(const Rhs3& rhs, const Vec3& y0, double t0, double t1,
                               const StepObserver& observer) {
  const double span = t1 - t0;
  if (span <= 0) return y0;

  Vec3 y = y0;
  Vec3 fy = rhs(y);
  ++stats_.rhs_evaluations;
  double t = t0;
  double h = h_next_ > 0 ? std::min(h_next_, span) : initial_step(rhs, y, fy, span);
  if (control_.h_max > 0) h = std::min(h, control_.h_max);

  long steps = 0;
  while (t < t1) {
    if (++steps > control_.max_steps) throw StepSizeUnderflow(t, y, h);
    bool last = false;
    if (t + h >= t1 || t + 1.01 * h >= t1) {
      h = t1 - t;
      last = true;
    }
    const Mat3 jac = jacobian(rhs, y, fy);

    for (;;) {
      if (h < control_.h_min || h <= std::abs(t) * 1e-15) throw StepSizeUnderflow(t, y, h);
      Mat3 a = -jac;
      a.diagonal().array() += 1.0 / (kGam * h);
      const Eigen::PartialPivLU<Mat3> lu(a);

      const Vec3 g1 = lu.solve(fy);
      Vec3 ys = y + kA21 * g1;
      Vec3 dy = rhs(ys);
      const Vec3 g2 = lu.solve(dy + kC21 * g1 / h);
      ys = y + kA31 * g1 + kA32 * g2;
      dy = rhs(ys);
      const Vec3 g3 = lu.solve(dy + (kC31 * g1 + kC32 * g2) / h);
      const Vec3 g4 = lu.solve(dy + (kC41 * g1 + kC42 * g2 + kC43 * g3) / h);
      stats_.rhs_evaluations += 2;

      const Vec3 ynew = y + kB1 * g1 + kB2 * g2 + kB3 * g3 + kB4 * g4;
      const Vec3 err = kE1 * g1 + kE2 * g2 + kE3 * g3 + kE4 * g4;

      double errmax = 0.0;
      bool finite = ynew.allFinite();
      for (int i = 0; i < 3 && finite; ++i) {
        const double sc = atol(i) + control_.rtol * std::max(std::abs(y[i]), std::abs(ynew[i]));
        errmax = std::max(errmax, std::abs(err[i]) / sc);
      }
      bool in_box = finite;
      for (int i = 0; i < 3 && in_box; ++i) {
        if (ynew[i] < control_.lower[i] - atol(i) ||
            ynew[i] > control_.upper[i] + atol(i)) {
          in_box = false;
        }
      }
      if (!finite || !in_box) {
        ++stats_.rejected;
        h *= kShrink * 0.5;
        last = false;
        continue;
      }
      if (errmax <= 1.0) {
        const double t_new = last ? t1 : t + h;
        const Vec3 f_new = rhs(ynew);
        ++stats_.rhs_evaluations;
        ++stats_.accepted;
        if (observer) observer(t, y, fy, t_new, ynew, f_new);
        t = t_new;
        y = ynew;
        fy = f_new;
        const double hgrow = errmax > kErrcon ? kSafety * h * std::pow(errmax, kPgrow) : kGrow * h;
        // keep the warm-start step meaningful after a short final step
        h_next_ = last ? std::max(h_next_, hgrow) : hgrow;
        h = hgrow;
        if (control_.h_max > 0) h = std::min(h, control_.h_max);
        break;
      }
      ++stats_.rejected;
      h = std::max(kSafety * h * std::pow(errmax, kPshrnk), kShrink * h * 0.2);
      last = false;
    }
  }
  return y;
}

}  // namespace grosc
