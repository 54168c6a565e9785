#include "grosc/least_squares.hpp"

#include <algorithm>
#include <cmath>

namespace grosc {

namespace {

Eigen::VectorXd project(Eigen::VectorXd x, const Eigen::VectorXd& lo, const Eigen::VectorXd& hi) {
  return x.cwiseMax(lo).cwiseMin(hi);
}

}  // namespace

LMResult levenberg_marquardt(const ResidualFn& residual, Eigen::VectorXd x0,
                             const Eigen::VectorXd& lower, const Eigen::VectorXd& upper,
                             const LMOptions& options) {
  const Eigen::Index np = x0.size();
  LMResult res;
  res.x = project(std::move(x0), lower, upper);
  Eigen::VectorXd r = residual(res.x);
  res.cost = r.squaredNorm();
  double lambda = options.lambda0;

  for (int it = 0; it < options.max_iterations; ++it) {
    res.iterations = it + 1;
    Eigen::MatrixXd jac(r.size(), np);
    for (Eigen::Index j = 0; j < np; ++j) {
      double h = 1e-7 * std::max(std::abs(res.x[j]), 1e-8);
      Eigen::VectorXd xp = res.x;
      xp[j] += h;
      if (xp[j] > upper[j]) {
        h = -h;
        xp[j] = res.x[j] + h;
      }
      jac.col(j) = (residual(xp) - r) / h;
    }
    const Eigen::MatrixXd jtj = jac.transpose() * jac;
    const Eigen::VectorXd g = jac.transpose() * r;

    bool improved = false;
    for (int inner = 0; inner < 30; ++inner) {
      Eigen::MatrixXd a = jtj;
      for (Eigen::Index j = 0; j < np; ++j) a(j, j) += lambda * std::max(jtj(j, j), 1e-30);
      const Eigen::VectorXd step = a.ldlt().solve(-g);
      if (!step.allFinite()) {
        lambda *= 10;
        continue;
      }
      const Eigen::VectorXd xn = project(res.x + step, lower, upper);
      const Eigen::VectorXd rn = residual(xn);
      const double cn = rn.allFinite() ? rn.squaredNorm() : INFINITY;
      if (cn < res.cost) {
        const double rel = (res.cost - cn) / std::max(res.cost, 1e-300);
        const double dx = (xn - res.x).norm() / std::max(res.x.norm(), 1e-300);
        res.x = xn;
        r = rn;
        res.cost = cn;
        lambda = std::max(lambda / 10, 1e-12);
        improved = true;
        if (rel < options.ftol || dx < options.xtol) {
          res.converged = true;
          return res;
        }
        break;
      }
      lambda *= 10;
      if (lambda > 1e16) break;
    }
    if (!improved) {
      // No descent direction left: a (constrained) minimum.
      res.converged = true;
      return res;
    }
  }
  return res;
}

}  // namespace grosc
