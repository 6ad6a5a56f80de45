#include "fhnpulse/energy.hpp"

#include "fhnpulse/errors.hpp"

namespace fhn {

Profile f_of(const Profile& w, double beta) {
  std::vector<double> s = w.copy_samples();
  for (double& x : s) x = f_cubic(x, beta);
  return w.with_samples(std::move(s));
}

Profile F_of(const Profile& w, double beta) {
  std::vector<double> s = w.copy_samples();
  for (double& x : s) x = F_potential(x, beta);
  return w.with_samples(std::move(s));
}

EnergyBreakdown energy_Jc(const Profile& w, const Profile& v, const ModelParams& params) {
  if (!(w.grid() == v.grid())) throw InvalidArgument("w and v live on different grids");
  const double dc2 = params.d * params.c * params.c;
  EnergyBreakdown e;
  e.gradient_term = 0.5 * dc2 * gradient_inner(w, w);
  e.nonlocal_term = 0.5 * inner_l2exp(w, v);
  e.potential_term = weighted_integral(F_of(w, params.beta));
  e.total = e.gradient_term + e.nonlocal_term + e.potential_term;
  return e;
}

double dJc_dir(const Profile& w, const Profile& v, const Profile& phi, const ModelParams& params) {
  if (!(w.grid() == v.grid()) || !(w.grid() == phi.grid()))
    throw InvalidArgument("w, v and phi live on different grids");
  const double dc2 = params.d * params.c * params.c;
  return dc2 * gradient_inner(w, phi) + inner_l2exp(v, phi) - inner_l2exp(f_of(w, params.beta), phi);
}

double mu_multiplier(const Profile& w, const Profile& v, const ModelParams& params) {
  return -0.5 * dJc_dir(w, v, w, params);
}

}  // namespace fhn
