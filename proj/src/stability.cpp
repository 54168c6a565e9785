#include "grosc/stability.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>

namespace grosc {

std::string to_string(StabilityClass c) {
  switch (c) {
    case StabilityClass::kStableNode: return "stable-node";
    case StabilityClass::kStableFocus: return "stable-focus";
    case StabilityClass::kUnstableFocus: return "unstable-focus";
    case StabilityClass::kUnstableNode: return "unstable-node";
    case StabilityClass::kSaddle: return "saddle";
    case StabilityClass::kMarginal: return "marginal";
  }
  return "marginal";
}

namespace {

using cd = std::complex<double>;

cd polish(cd z, double c2, double c1, double c0) {
  for (int it = 0; it < 4; ++it) {
    const cd p = ((z + c2) * z + c1) * z + c0;
    const cd dp = (3.0 * z + 2.0 * c2) * z + c1;
    if (std::abs(dp) == 0.0) break;
    const cd step = p / dp;
    const cd next = z - step;
    const cd pn = ((next + c2) * next + c1) * next + c0;
    if (!(std::abs(pn) < std::abs(p))) break;
    z = next;
  }
  return z;
}

double real_cubic_root(double c2, double c1, double c0) {
  // Depressed cubic t^3 + a t + b with l = t - c2/3.
  const double s = c2 / 3.0;
  const double a = c1 - c2 * s;
  const double b = c0 - c1 * s + 2.0 * s * s * s;
  const double q = a / 3.0;
  const double r = -b / 2.0;
  const double disc = q * q * q + r * r;
  double t;
  if (disc >= 0) {
    const double sq = std::sqrt(disc);
    // Cancellation-free pairing of the two cube roots.
    const double u = std::cbrt(r + (r >= 0 ? sq : -sq));
    t = u == 0.0 ? 0.0 : u - q / u;
  } else {
    const double rho = std::sqrt(-q);
    const double theta = std::acos(std::clamp(r / (rho * rho * rho), -1.0, 1.0));
    t = 2.0 * rho * std::cos(theta / 3.0);
  }
  return t - s;
}

}  // namespace

std::array<std::complex<double>, 3> cubic_roots(double c2, double c1, double c0) {
  double x = real_cubic_root(c2, c1, c0);
  x = polish(cd(x, 0.0), c2, c1, c0).real();
  // Deflate: l^2 + b l + c.
  const double b = c2 + x;
  double c = c1 + b * x;
  if (std::abs(x) > 0 && std::abs(c0) > 0 && std::abs(c * x) > 0) {
    // For large |x| the quotient from c0 is better conditioned.
    if (std::abs(x) > 1.0 && std::abs(b * x) > std::abs(c1)) c = -c0 / x;
  }
  const double d = b * b - 4.0 * c;
  cd r1;
  cd r2;
  if (d >= 0) {
    const double sq = std::sqrt(d);
    const double qv = -0.5 * (b + (b >= 0 ? sq : -sq));
    r1 = cd(qv, 0.0);
    r2 = qv != 0.0 ? cd(c / qv, 0.0) : cd(0.0, 0.0);
  } else {
    const double im = 0.5 * std::sqrt(-d);
    r1 = cd(-0.5 * b, im);
    r2 = cd(-0.5 * b, -im);
  }
  r1 = polish(r1, c2, c1, c0);
  r2 = polish(r2, c2, c1, c0);
  if (d < 0) r2 = std::conj(r1);
  return {cd(x, 0.0), r1, r2};
}

StabilityReport classify_stability(const Mat3& jac) {
  if (!jac.allFinite()) throw DomainError("jacobian has non-finite entries");
  const double tr = jac.trace();
  const double minors = jac(0, 0) * jac(1, 1) - jac(0, 1) * jac(1, 0) +
                        jac(0, 0) * jac(2, 2) - jac(0, 2) * jac(2, 0) +
                        jac(1, 1) * jac(2, 2) - jac(1, 2) * jac(2, 1);
  const double det = jac.determinant();
  auto roots = cubic_roots(-tr, minors, -det);
  std::sort(roots.begin(), roots.end(), [](const cd& a, const cd& b) {
    if (a.real() != b.real()) return a.real() > b.real();
    return a.imag() > b.imag();
  });

  StabilityReport rep;
  rep.eigenvalues = roots;
  const double norm = jac.norm();
  const double tol = 1e-10 * norm;
  int unstable = 0;
  bool marginal = false;
  bool complex_unstable = false;
  for (const auto& z : roots) {
    if (std::abs(z.imag()) > tol) rep.oscillatory = true;
    if (std::abs(z.real()) <= tol) marginal = true;
    if (z.real() > tol) {
      ++unstable;
      if (std::abs(z.imag()) > tol) complex_unstable = true;
    }
  }
  if (marginal) {
    rep.classification = StabilityClass::kMarginal;
  } else if (unstable == 0) {
    rep.classification = rep.oscillatory ? StabilityClass::kStableFocus : StabilityClass::kStableNode;
  } else if (complex_unstable) {
    rep.classification = StabilityClass::kUnstableFocus;
  } else if (unstable == 3) {
    rep.classification = StabilityClass::kUnstableNode;
  } else {
    rep.classification = StabilityClass::kSaddle;
  }
  return rep;
}

StabilityReport stability_at(const GRState& s, double bias, double temperature, const GRParams& p,
                             double optical_power) {
  StabilityReport rep = classify_stability(jacobian(s, Drive{bias, optical_power}, temperature, p));
  rep.fixed_point = s;
  return rep;
}

namespace {

struct Probe {
  bool valid = false;
  double max_re = 0.0;
  StabilityReport report;
};

Probe probe(double v, double temperature, const GRParams& p) {
  Probe out;
  const auto s = tracked_fixed_point(v, temperature, p);
  if (!s) return out;
  out.report = stability_at(*s, v, temperature, p);
  out.max_re = out.report.max_real();
  out.valid = true;
  return out;
}

}  // namespace

std::vector<BoundaryPoint> hopf_boundary(double v_min, double v_max, double t_min, double t_max,
                                         const GRParams& p, const HopfGrid& grid) {
  if (!(v_max > v_min)) throw DomainError("voltage range is degenerate");
  if (!(t_max >= t_min) || !(t_min > 0)) throw DomainError("temperature range is invalid");
  if (grid.voltage_points < 2 || grid.temperature_points < 1) throw DomainError("grid too small");
  const double span = v_max - v_min;
  std::vector<BoundaryPoint> out;
  for (int it = 0; it < grid.temperature_points; ++it) {
    const double temperature = grid.temperature_points == 1
                                   ? t_min
                                   : t_min + (t_max - t_min) * it / (grid.temperature_points - 1);
    Probe prev;
    double v_prev = v_min;
    for (int iv = 0; iv < grid.voltage_points; ++iv) {
      const double v = v_min + span * iv / (grid.voltage_points - 1);
      const Probe cur = probe(v, temperature, p);
      if (prev.valid && cur.valid && (prev.max_re > 0) != (cur.max_re > 0)) {
        double lo = v_prev;
        double hi = v;
        const bool lo_unstable = prev.max_re > 0;
        Probe at_lo = prev;
        Probe at_hi = cur;
        while (hi - lo > 1e-3 * span) {
          const double mid = 0.5 * (lo + hi);
          const Probe m = probe(mid, temperature, p);
          if (!m.valid) break;
          if ((m.max_re > 0) == lo_unstable) {
            lo = mid;
            at_lo = m;
          } else {
            hi = mid;
            at_hi = m;
          }
        }
        // Illinois false position on the bracket to pin max Re near zero.
        double flo = at_lo.max_re;
        double fhi = at_hi.max_re;
        int side = 0;
        for (int k = 0; k < 60 && at_lo.valid && at_hi.valid; ++k) {
          const Probe& near = std::abs(flo) <= std::abs(fhi) ? at_lo : at_hi;
          if (std::abs(near.max_re) <= 1e-6 * std::abs(near.report.eigenvalues[0]) ||
              hi - lo <= 1e-13 * span) {
            break;
          }
          const double mid = (lo * fhi - hi * flo) / (fhi - flo);
          const Probe m = probe(mid, temperature, p);
          if (!m.valid) break;
          if ((m.max_re > 0) == lo_unstable) {
            lo = mid;
            at_lo = m;
            flo = m.max_re;
            if (side == -1) fhi *= 0.5;
            side = -1;
          } else {
            hi = mid;
            at_hi = m;
            fhi = m.max_re;
            if (side == 1) flo *= 0.5;
            side = 1;
          }
        }
        // Report the side whose leading real part is closer to zero.
        const bool use_lo = std::abs(at_lo.max_re) <= std::abs(at_hi.max_re);
        const Probe& best = use_lo ? at_lo : at_hi;
        const double norm = jacobian(best.report.fixed_point, Drive{use_lo ? lo : hi, 0.0},
                                     temperature, p).norm();
        const double im = std::abs(best.report.eigenvalues[0].imag());
        out.push_back({use_lo ? lo : hi, temperature, im > 1e-6 * norm,
                       im / (2.0 * std::numbers::pi)});
      }
      prev = cur;
      v_prev = v;
    }
  }
  return out;
}

}  // namespace grosc
