#pragma once

#include <functional>
#include <stdexcept>

#include <Eigen/Dense>

namespace grosc {

/// Residual vector r(x); the solver minimizes |r|^2.
using ResidualFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

struct LMOptions {
  int max_iterations = 200;
  double ftol = 1e-12;   // relative cost reduction
  double xtol = 1e-12;   // relative parameter step
  double lambda0 = 1e-3;
};

struct LMResult {
  Eigen::VectorXd x;
  double cost = 0.0;  // |r|^2
  int iterations = 0;
  bool converged = false;
};

/// Box-constrained Levenberg-Marquardt with a forward-difference Jacobian.
/// Steps are projected onto [lower, upper].
LMResult levenberg_marquardt(const ResidualFn& residual, Eigen::VectorXd x0,
                             const Eigen::VectorXd& lower, const Eigen::VectorXd& upper,
                             const LMOptions& options = {});

class FitFailure : public std::runtime_error {
 public:
  FitFailure(const std::string& what, double best_residual)
      : std::runtime_error(what), residual(best_residual) {}
  double residual;
};

}  // namespace grosc
