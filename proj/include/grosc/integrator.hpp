#pragma once

#include <array>
#include <functional>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace grosc {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Autonomous right-hand side y' = F(y).
using Rhs3 = std::function<Vec3(const Vec3&)>;

struct StepControl {
  double rtol = 1e-6;
  double atol = 1e-9;
  /// Per-component multiplier on atol.
  std::array<double, 3> atol_scale{1.0, 1.0, 1.0};
  double h_initial = 0.0;  // 0 selects automatically
  double h_min = 0.0;      // in the integrator's time unit; underflow below this fails
  double h_max = 0.0;      // 0 means unbounded
  long max_steps = 50'000'000;
  /// Components constrained to [lower, upper]; a step that leaves the box by
  /// more than atol is rejected and retried with a smaller step.
  std::array<double, 3> lower{-1e300, -1e300, -1e300};
  std::array<double, 3> upper{1e300, 1e300, 1e300};
};

struct StepStats {
  long accepted = 0;
  long rejected = 0;
  long rhs_evaluations = 0;
};

/// Thrown when the step size collapses below StepControl::h_min.
class StepSizeUnderflow : public std::runtime_error {
 public:
  StepSizeUnderflow(double t, Vec3 y, double h)
      : std::runtime_error("step size underflow at t=" + std::to_string(t)),
        t_last(t), y_last(std::move(y)), h_last(h) {}
  double t_last;
  Vec3 y_last;
  double h_last;
};

/// Called after each accepted step with (t0, y0, f0, t1, y1, f1) so the caller
/// can resample with cubic Hermite interpolation.
using StepObserver = std::function<void(double, const Vec3&, const Vec3&, double,
                                        const Vec3&, const Vec3&)>;

/// Linearly implicit Rosenbrock integrator (4 stages, order 4 with an
/// embedded order-3 error estimate, L-stable Shampine coefficients).
/// The Jacobian is formed by central differences once per step.
class RosenbrockSolver {
 public:
  explicit RosenbrockSolver(StepControl control) : control_(control) {}

  /// Integrates from t0 to t1 and returns y(t1). The suggested next step is
  /// kept so consecutive segments restart warm.
  Vec3 advance(const Rhs3& rhs, const Vec3& y0, double t0, double t1,
               const StepObserver& observer = {});

  const StepStats& stats() const { return stats_; }
  double last_step() const { return h_next_; }
  void reset_step() { h_next_ = 0.0; }

 private:
  Mat3 jacobian(const Rhs3& rhs, const Vec3& y, const Vec3& fy);
  double atol(int i) const { return control_.atol * control_.atol_scale[i]; }
  double initial_step(const Rhs3& rhs, const Vec3& y, const Vec3& fy, double span);

  StepControl control_;
  StepStats stats_;
  double h_next_ = 0.0;
};

/// Cubic Hermite interpolant on [t0, t1].
Vec3 hermite(double t, double t0, const Vec3& y0, const Vec3& f0, double t1,
             const Vec3& y1, const Vec3& f1);

}  // namespace grosc
