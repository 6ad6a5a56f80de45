#include "fhnpulse/model.hpp"

#include <cmath>
#include <numbers>

#include "fhnpulse/errors.hpp"

namespace fhn {

void ModelParams::validate() const {
  auto finite_pos = [](double x) { return std::isfinite(x) && x > 0.0; };
  if (!finite_pos(d)) throw ValidationError("d", "d must be positive");
  if (!std::isfinite(beta) || !(beta > 0.0 && beta < 0.5))
    throw ValidationError("beta", "beta must lie in (0, 1/2)");
  const double gmax = 4.0 / ((1.0 - beta) * (1.0 - beta));
  if (!finite_pos(gamma) || !(gamma < gmax))
    throw ValidationError("gamma", "gamma must lie in (0, 4/(1-beta)^2)");
  if (!finite_pos(c)) throw ValidationError("c", "c must be positive");
  if (dim == Dimension::strip && !finite_pos(L))
    throw ValidationError("L", "strip half-width L must be positive");
}

double f_cubic(double xi, double beta) noexcept { return xi * (xi - beta) * (1.0 - xi); }

double f_cubic_prime(double xi, double beta) noexcept {
  return -3.0 * xi * xi + 2.0 * (1.0 + beta) * xi - beta;
}

double F_potential(double xi, double beta) noexcept {
  const double x2 = xi * xi;
  return x2 * (0.25 * x2 - (1.0 + beta) * xi / 3.0 + 0.5 * beta);
}

double compute_M1(double gamma, double beta) {
  if (!(gamma > 0.0)) throw ValidationError("gamma", "gamma must be positive");
  const double target = 1.0 / gamma;
  // For xi <= 0 the cubic is decreasing, so g(m) = f(-m) - 1/gamma is increasing in m >= 0.
  auto g = [&](double m) { return f_cubic(-m, beta) - target; };
  if (g(1.0) >= 0.0) return 1.0;
  double lo = 1.0, hi = 2.0;
  while (g(hi) < 0.0) {
    lo = hi;
    hi *= 2.0;
  }
  while (hi - lo > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    (g(mid) < 0.0 ? lo : hi) = mid;
  }
  return hi;
}

EigenPair characteristic_roots(double kappa) {
  const double s = std::sqrt(1.0 + 4.0 * kappa);
  // The positive root is formed without cancellation.
  const double nu2 = 2.0 * kappa / (1.0 + s);
  return {-0.5 * (1.0 + s), nu2};
}

namespace {

double transverse_kappa(const ModelParams& p) {
  if (p.dim != Dimension::strip) return 0.0;
  const double l = p.solver_half_width();
  return std::numbers::pi * std::numbers::pi / (4.0 * l * l);
}

}  // namespace

EigenPair eigen_nu(const ModelParams& p) {
  return characteristic_roots(p.gamma / (p.c * p.c) + transverse_kappa(p));
}

EigenPair eigen_nu_star(const ModelParams& p) { return characteristic_roots(1.0 + transverse_kappa(p)); }

}  // namespace fhn
