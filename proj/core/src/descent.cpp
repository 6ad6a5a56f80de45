#include "fhnpulse/descent.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "fhnpulse/errors.hpp"

namespace fhn {

void DescentConfig::validate() const {
  if (!(theta > 0.0 && theta < 1.0)) throw ValidationError("theta", "theta must lie in (0, 1)");
  if (!(alpha1_init > 0.0 && alpha1_init < 1.0))
    throw ValidationError("alpha1_init", "alpha1_init must lie in (0, 1)");
  if (!(delta2 > 0.0)) throw ValidationError("delta2", "delta2 must be positive");
  if (!(delta1 > delta2 && delta1 < 1.0))
    throw ValidationError("delta1", "delta1 must satisfy delta2 < delta1 < 1");
  if (!(delta3 > 0.0 && delta3 < 1.0)) throw ValidationError("delta3", "delta3 must lie in (0, 1)");
  if (max_iters < 1) throw ValidationError("max_iters", "max_iters must be positive");
  if (max_backtracks < 0) throw ValidationError("max_backtracks", "max_backtracks must be >= 0");
}

std::string to_string(StopReason r) {
  switch (r) {
    case StopReason::converged: return "converged";
    case StopReason::zero_direction: return "zero_direction";
    case StopReason::iteration_cap: return "iteration_cap";
    case StopReason::backtrack_failure: return "backtrack_failure";
  }
  return "unknown";
}

Profile clip(const Profile& w) {
  if (w.grid().is_strip()) return w;
  auto s = w.samples();
  const std::size_t top = w.argmax_last();
  if (s[top] <= 0.0) return w;
  std::size_t lo = top, hi = top;
  while (lo > 0 && s[lo - 1] > 0.0) --lo;
  while (hi + 1 < s.size() && s[hi + 1] > 0.0) ++hi;
  std::vector<double> out(s.begin(), s.end());
  bool changed = false;
  for (std::size_t i = 0; i < out.size(); ++i)
    if ((i < lo || i > hi) && out[i] > 0.0) {
      out[i] = 0.0;
      changed = true;
    }
  return changed ? w.with_samples(std::move(out)) : w;
}

Profile shift_normalize(const Profile& w) {
  const double n2 = norm_h1exp_sq(w);
  if (!(n2 > 0.0) || !std::isfinite(n2))
    throw InvalidArgument("shift_normalize needs a finite nonzero norm");
  const double omega = 0.5 * n2;
  if (omega == 1.0) return w;
  return shift_grid(w, -std::log(omega));
}

DescentState make_state(const Profile& w0, NonlocalSolver& solver, const DescentConfig& cfg) {
  cfg.validate();
  Profile w = shift_normalize(clip(w0));
  Profile v = solver.apply_Lc(w);
  EnergyBreakdown J = energy_Jc(w, v, solver.params());
  return DescentState{w, v, J, 0.0, cfg.alpha1_init, 0};
}

StepResult descent_step(const DescentState& state, NonlocalSolver& solver, const DescentConfig& cfg) {
  const ModelParams& p = solver.params();
  const Profile& w = state.w;
  const double mu = mu_multiplier(w, state.v, p);
  const Profile q = solver.solve_wstar(w, state.v);
  const double shift = p.d * p.c * p.c + mu;

  auto ws = w.samples();
  auto qs = q.samples();
  std::vector<double> dir(ws.size());
  double dmax = 0.0;
  for (std::size_t i = 0; i < dir.size(); ++i) {
    dir[i] = qs[i] - shift * ws[i];
    dmax = std::max(dmax, std::abs(dir[i]));
  }

  StepResult res{state, false, false, 0, 0.0};
  res.state.mu = mu;
  if (dmax <= 1e-14 * std::max(1.0, w.sup_norm())) {
    res.zero_direction = true;
    return res;
  }

  double alpha1 = state.alpha1;
  std::vector<double> trial(ws.size());
  for (int bt = 0; bt <= cfg.max_backtracks; ++bt) {
    const double alpha = alpha1 / dmax;
    for (std::size_t i = 0; i < trial.size(); ++i) trial[i] = ws[i] + alpha * dir[i];
    Profile cand = shift_normalize(clip(w.with_samples(trial)));
    Profile cv = solver.apply_Lc(cand);
    EnergyBreakdown cj = energy_Jc(cand, cv, p);
    if (cj.total <= state.J.total) {
      double sup = 0.0;
      auto cs = cand.samples();
      for (std::size_t i = 0; i < cs.size(); ++i) sup = std::max(sup, std::abs(cs[i] - ws[i]));
      res.state = DescentState{std::move(cand), std::move(cv), cj, mu,
                               std::min(1.1 * alpha1, cfg.alpha1_init), state.iter + 1};
      res.accepted = true;
      res.backtracks = bt;
      res.sup_step = sup;
      return res;
    }
    alpha1 *= cfg.theta;
  }
  res.backtracks = cfg.max_backtracks;
  return res;
}

StepResult descent_step(const DescentState& state, const ModelParams& params, const DescentConfig& cfg) {
  NonlocalSolver solver(params);
  return descent_step(state, solver, cfg);
}

MinimizeResult minimize(const Profile& w0, NonlocalSolver& solver, const DescentConfig& cfg,
                        const TraceCallback& trace) {
  DescentState st = make_state(w0, solver, cfg);
  MinimizeResult out{st.w, st.v, st.J, 0, false, StopReason::iteration_cap};
  for (long n = 0; n < cfg.max_iters; ++n) {
    StepResult r = descent_step(st, solver, cfg);
    if (r.zero_direction) {
      out.reason = StopReason::zero_direction;
      out.converged = true;
      break;
    }
    if (!r.accepted) {
      out.reason = StopReason::backtrack_failure;
      break;
    }
    const double drop = st.J.total - r.state.J.total;
    st = std::move(r.state);
    if (trace) trace(TraceRecord{st.iter, st.J, st.mu, st.alpha1, r.backtracks, r.sup_step});
    if (drop <= std::max(cfg.delta1 * std::abs(st.J.total), cfg.delta2) && r.sup_step <= cfg.delta3) {
      out.reason = StopReason::converged;
      out.converged = true;
      break;
    }
  }
  out.w = st.w;
  out.v = st.v;
  out.energy = st.J;
  out.iters = st.iter;
  return out;
}

MinimizeResult minimize(const Profile& w0, const ModelParams& params, const DescentConfig& cfg,
                        const TraceCallback& trace) {
  NonlocalSolver solver(params);
  return minimize(w0, solver, cfg, trace);
}

// --- grids and starting profiles -------------------------------------------

namespace {

int cells_for(double length, double h) {
  if (!(length > 0.0) || !(h > 0.0)) throw InvalidArgument("grid length and spacing must be positive");
  return int(std::lround(length / h));
}

}  // namespace

Grid make_line_grid(double h, double length, double right_end) {
  const int n = cells_for(length, h);
  return Grid::line(right_end - n * h, h, n);
}

Grid make_strip_grid(double h, double length, double right_end, int n_y, const ModelParams& params) {
  const int n = cells_for(length, h);
  return Grid::strip(right_end - n * h, h, n, params.solver_half_width(), n_y);
}

namespace {

double plateau(double x, double width) {
  if (width <= 0.0) return (x >= -5.0 && x <= 5.0) ? 1.0 : 0.0;
  return 0.5 * (std::tanh((x + 5.0) / width) - std::tanh((x - 5.0) / width));
}

}  // namespace

Profile smooth_plateau_guess(const Grid& g, double front_width) {
  return Profile::sample(g, [front_width](double x) { return plateau(x, front_width); });
}

Profile strip_mode_guess(const Grid& g, double front_width) {
  const double l = g.half_width();
  return Profile::sample(g, [l, front_width](double x, double y) {
    return plateau(x, front_width) * std::sin(std::numbers::pi * (y + l) / (2.0 * l));
  });
}

Profile initial_guess(const Grid& g, GuessKind kind) {
  const double width = kind == GuessKind::smooth ? 1.0 : 0.0;
  return g.is_strip() ? strip_mode_guess(g, width) : smooth_plateau_guess(g, width);
}

Profile square_wave_guess(const Grid& g) { return smooth_plateau_guess(g, 0.0); }

// --- shape diagnostics --------------------------------------------------------

int positive_intervals(const Profile& w) {
  int count = 0;
  bool inside = false;
  for (double s : w.samples()) {
    if (s > 0.0 && !inside) ++count;
    inside = s > 0.0;
  }
  return count;
}

int sign_changes(const Profile& w) {
  int count = 0, last = 0;
  for (double s : w.samples()) {
    const int sg = (s > 0.0) - (s < 0.0);
    if (sg == 0) continue;
    if (last != 0 && sg != last) ++count;
    last = sg;
  }
  return count;
}

int level_components(const Profile& w, double level) {
  const Grid& g = w.grid();
  const int nx = g.n_x() + 1;
  const int ny = int(g.column_size());
  std::vector<char> seen(w.size(), 0);
  std::vector<std::size_t> stack;
  int count = 0;
  for (std::size_t start = 0; start < w.size(); ++start) {
    if (seen[start] || !(w[start] > level)) continue;
    ++count;
    stack.push_back(start);
    seen[start] = 1;
    while (!stack.empty()) {
      const std::size_t i = stack.back();
      stack.pop_back();
      const int j = int(i / ny), k = int(i % ny);
      const int nb[4][2] = {{j - 1, k}, {j + 1, k}, {j, k - 1}, {j, k + 1}};
      for (auto& q : nb) {
        if (q[0] < 0 || q[0] >= nx || q[1] < 0 || q[1] >= ny) continue;
        const std::size_t ni = std::size_t(q[0]) * ny + q[1];
        if (!seen[ni] && w[ni] > level) {
          seen[ni] = 1;
          stack.push_back(ni);
        }
      }
    }
  }
  return count;
}

}  // namespace fhn
