#pragma once

#include "fhnpulse/grid.hpp"

namespace fhn {

struct ModelParams {
  double d = 0.0;
  double gamma = 0.0;
  double beta = 0.0;
  double c = 1.0;
  double L = 1.0;  // physical strip half-width; used only for strips
  Dimension dim = Dimension::line;

  // Throws ValidationError naming the first offending field.
  void validate() const;

  // Strip half-width in co-moving coordinates, cL.
  double solver_half_width() const noexcept { return c * L; }

  ModelParams with_c(double new_c) const {
    ModelParams p = *this;
    p.c = new_c;
    return p;
  }
  ModelParams with_d(double new_d) const {
    ModelParams p = *this;
    p.d = new_d;
    return p;
  }
};

struct EigenPair {
  double nu1;  // decaying to the right, < 0
  double nu2;  // > 0
};

double f_cubic(double xi, double beta) noexcept;
double f_cubic_prime(double xi, double beta) noexcept;
double F_potential(double xi, double beta) noexcept;

// Smallest M >= 1 with f(xi) >= 1/gamma for all xi <= -M.
double compute_M1(double gamma, double beta);

// Roots of r^2 + r - kappa = 0, ordered (negative, positive).
EigenPair characteristic_roots(double kappa);

// Pair for the inhibitor operator. For strips the first transverse mode on
// the co-moving half-width cL is included.
EigenPair eigen_nu(const ModelParams& params);

// Pair for the auxiliary (gradient) equation.
EigenPair eigen_nu_star(const ModelParams& params);

}  // namespace fhn
