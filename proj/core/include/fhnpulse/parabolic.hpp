#pragma once

#include <functional>
#include <string>

#include "fhnpulse/grid.hpp"
#include "fhnpulse/model.hpp"

namespace fhn {

// (u, v) in the lab-frame variable x on the current window.
struct PhysicalState {
  Profile u;
  Profile v;
  double time = 0.0;

  double window_origin() const noexcept { return u.grid().origin(); }
};

enum class Verdict { stable, unstable, inconclusive };

std::string to_string(Verdict v);

struct StabilityReport {
  double sup_deviation = 0.0;
  double l2_deviation = 0.0;
  double distance_propagated = 0.0;
  double initial_max = 0.0;
  double final_max = 0.0;
  double threshold = 0.0;  // relative to initial_max
  bool collapsed = false;
  Verdict verdict = Verdict::inconclusive;
};

// u(x) = w(c x): the grid is relabelled (spacing h/c, origin/c, strip half-width
// back to L) and v = L_c w is relabelled the same way.
PhysicalState rescale_to_physical(const Profile& w, const ModelParams& params);

struct EvolveOptions {
  double newton_tol = 1e-10;   // on the update, relative to max(1, |u|)
  int newton_max_iters = 25;
  double linear_tol = 1e-12;   // Krylov tolerance inside Newton (strips)
  int linear_max_iters = 200;
  bool stop_on_collapse = true;
  double collapse_fraction = 0.1;
  bool linear_reaction = false;  // replace f(u) by f'(0) u (order tests)
  std::function<void(long step, const PhysicalState&)> observer;
  long observe_every = 0;
};

struct EvolveResult {
  PhysicalState state;
  long steps = 0;
  bool collapsed = false;
  double distance = 0.0;  // steps * h_x
};

// Crank-Nicolson in a window moving one cell per step (dt = h_x / c). u lives
// on integer time levels, v on half levels (bootstrapped by a backward-Euler
// half step). Inflow (right) edge: u = v = 0. Outflow (left) edge: the
// slow-mode Robin closure u_x = c nu2 u, v_x - c nu2 v = u / (nu1 c).
EvolveResult evolve_moving_window(const PhysicalState& state, const ModelParams& params, double c,
                                  double T, const EvolveOptions& opts = {});

// Deviation of `final` from `initial` sample by sample (the window has moved
// with the pulse, so equal indices are the comparison points).
StabilityReport stability_verdict(const PhysicalState& initial, const PhysicalState& final,
                                  double threshold, double distance = 0.0);

// Rescale, propagate one window length, and classify.
struct StabilityRun {
  StabilityReport report;
  PhysicalState initial;
  PhysicalState final;
  long steps = 0;
};

StabilityRun run_stability_test(const Profile& w, const ModelParams& params, double threshold,
                                double lengths = 1.0, const EvolveOptions& opts = {});

}  // namespace fhn
