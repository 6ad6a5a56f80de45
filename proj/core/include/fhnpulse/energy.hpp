#pragma once

#include "fhnpulse/grid.hpp"
#include "fhnpulse/model.hpp"

namespace fhn {

struct EnergyBreakdown {
  double gradient_term = 0.0;   // (d c^2 / 2) |grad w|^2
  double nonlocal_term = 0.0;   // (1/2) w L_c w
  double potential_term = 0.0;  // F(w)
  double total = 0.0;
};

// J_c(w) with v = L_c w supplied by the caller. All terms use the weighted
// midpoint quadrature of grid.hpp.
EnergyBreakdown energy_Jc(const Profile& w, const Profile& v, const ModelParams& params);

// J_c'(w) phi = d c^2 <grad w, grad phi> + <L_c w, phi> - <f(w), phi>.
double dJc_dir(const Profile& w, const Profile& v, const Profile& phi, const ModelParams& params);

// Lagrange multiplier mu = -J_c'(w) w / 2.
double mu_multiplier(const Profile& w, const Profile& v, const ModelParams& params);

// Pointwise f(w) and F(w).
Profile f_of(const Profile& w, double beta);
Profile F_of(const Profile& w, double beta);

}  // namespace fhn
