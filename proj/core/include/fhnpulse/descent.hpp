#pragma once

#include <functional>
#include <optional>
#include <string>

#include "fhnpulse/energy.hpp"
#include "fhnpulse/grid.hpp"
#include "fhnpulse/model.hpp"
#include "fhnpulse/nonlocal.hpp"

namespace fhn {

struct DescentConfig {
  double theta = 0.5;         // backtracking factor
  double alpha1_init = 1e-3;  // largest normalized step
  double delta1 = 1e-8;       // relative energy tolerance
  double delta2 = 1e-14;      // absolute energy tolerance
  double delta3 = 1e-3;       // sup-norm step tolerance
  long max_iters = 200000;
  int max_backtracks = 60;

  void validate() const;

  static DescentConfig line_defaults() { return {}; }
  static DescentConfig strip_defaults() {
    DescentConfig c;
    c.alpha1_init = 1e-4;
    c.delta1 = 1e-6;
    c.delta2 = 1e-12;
    c.delta3 = 1e-2;
    return c;
  }
};

struct DescentState {
  Profile w;  // on the constraint manifold
  Profile v;  // L_c w
  EnergyBreakdown J;
  double mu = 0.0;
  double alpha1 = 0.0;
  long iter = 0;
};

enum class StopReason { converged, zero_direction, iteration_cap, backtrack_failure };

std::string to_string(StopReason r);

struct StepResult {
  DescentState state;  // unchanged unless accepted
  bool accepted = false;
  bool zero_direction = false;
  int backtracks = 0;
  double sup_step = 0.0;  // max |w_new - w_old| over samples
};

struct TraceRecord {
  long iter;
  EnergyBreakdown J;
  double mu;
  double alpha1;
  int backtracks;
  double sup_step;
};

using TraceCallback = std::function<void(const TraceRecord&)>;

struct MinimizeResult {
  Profile w;
  Profile v;
  EnergyBreakdown energy;
  long iters = 0;
  bool converged = false;
  StopReason reason = StopReason::iteration_cap;

  double J() const noexcept { return energy.total; }
};

// Keeps only the positive interval around the rightmost maximum; other
// positive samples are set to zero. Strips are returned unchanged.
Profile clip(const Profile& w);

// Translates the grid so that the weighted H^1 norm squared becomes 2.
Profile shift_normalize(const Profile& w);

// Projects onto the admissible set and evaluates v, J at the result.
DescentState make_state(const Profile& w0, NonlocalSolver& solver, const DescentConfig& cfg);

// One iteration: direction from the auxiliary solve, normalized step, clip and
// shift, backtracking on the energy.
StepResult descent_step(const DescentState& state, NonlocalSolver& solver, const DescentConfig& cfg);
StepResult descent_step(const DescentState& state, const ModelParams& params, const DescentConfig& cfg);

MinimizeResult minimize(const Profile& w0, NonlocalSolver& solver, const DescentConfig& cfg,
                        const TraceCallback& trace = {});
MinimizeResult minimize(const Profile& w0, const ModelParams& params, const DescentConfig& cfg,
                        const TraceCallback& trace = {});

// --- grids and starting profiles -------------------------------------------

// Line grid covering [right_end - length, right_end].
Grid make_line_grid(double h, double length, double right_end);

// Strip grid of half-width cL covering [right_end - length, right_end].
Grid make_strip_grid(double h, double length, double right_end, int n_y, const ModelParams& params);

// 1 on [-5, 5], 0 elsewhere.
Profile square_wave_guess(const Grid& g);

// Plateau on [-5, 5] with tanh fronts of the given width. A one-cell jump
// leaves the descent almost stationary, so this is the default cold start.
Profile smooth_plateau_guess(const Grid& g, double front_width = 1.0);

// Plateau in x times the first transverse Dirichlet mode.
Profile strip_mode_guess(const Grid& g, double front_width = 1.0);

enum class GuessKind { smooth, square };

Profile initial_guess(const Grid& g, GuessKind kind = GuessKind::smooth);

// --- shape diagnostics --------------------------------------------------------

// Number of maximal runs of positive samples (line grids).
int positive_intervals(const Profile& w);

// Sign changes along the line, ignoring exact zeros.
int sign_changes(const Profile& w);

// Connected components (4-neighbour) of {w > level}.
int level_components(const Profile& w, double level);

}  // namespace fhn
