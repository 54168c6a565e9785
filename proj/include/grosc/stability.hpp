#pragma once

#include <array>
#include <complex>
#include <string>
#include <vector>

#include "grosc/gr_dynamics.hpp"

namespace grosc {

enum class StabilityClass { kStableNode, kStableFocus, kUnstableFocus, kUnstableNode, kSaddle, kMarginal };

std::string to_string(StabilityClass c);

struct StabilityReport {
  GRState fixed_point;
  std::array<std::complex<double>, 3> eigenvalues;  // 1/s, sorted by decreasing real part
  StabilityClass classification = StabilityClass::kMarginal;
  bool oscillatory = false;  // a complex-conjugate pair exists
  double max_real() const { return eigenvalues[0].real(); }
};

/// Roots of l^3 + c2 l^2 + c1 l + c0, real root first.
std::array<std::complex<double>, 3> cubic_roots(double c2, double c1, double c0);

/// Spectrum and sign-pattern classification of a 3x3 Jacobian.
StabilityReport classify_stability(const Mat3& jac);

/// Linearization at a state (fills fixed_point).
StabilityReport stability_at(const GRState& s, double bias, double temperature, const GRParams& p,
                             double optical_power = 0.0);

struct HopfGrid {
  int voltage_points = 41;
  int temperature_points = 12;
};

struct BoundaryPoint {
  double bias;         // V
  double temperature;  // K
  bool hopf;           // the crossing pair is complex
  double frequency;    // Hz, |Im(lambda)|/(2 pi) of the crossing pair
};

/// For each temperature on the grid, locates sign changes of max Re(lambda)
/// at the tracked fixed point along V and refines them by bisection to
/// dV <= 1e-3 of the voltage span.
std::vector<BoundaryPoint> hopf_boundary(double v_min, double v_max, double t_min, double t_max,
                                         const GRParams& p, const HopfGrid& grid = {});

}  // namespace grosc
