#include "fhnpulse/parabolic.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <vector>

#include "fhnpulse/errors.hpp"
#include "fhnpulse/nonlocal.hpp"
#include "sine_transform.hpp"

namespace fhn {

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::stable: return "stable";
    case Verdict::unstable: return "unstable";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "unknown";
}

PhysicalState rescale_to_physical(const Profile& w, const ModelParams& params) {
  params.validate();
  const Grid& g = w.grid();
  const double c = params.c;
  Grid x = g.is_strip() ? Grid::strip(0.0, g.h() / c, g.n_x(), params.L, g.n_y())
                        : Grid::line(0.0, g.h() / c, g.n_x());
  x = x.with_origin(g.origin_hi() / c, g.origin_lo() / c);
  Profile v = apply_Lc(w, params);
  return PhysicalState{Profile(x, w.copy_samples()), Profile(x, v.copy_samples()), 0.0};
}

namespace {

using Vec = std::vector<double>;

// Shape of the window and the homogeneous part of the discrete Laplacian:
// left edge  y_x = sigma y  (ghost-point closure), right edge and strip edges y = 0.
struct Window {
  int nx = 0;          // x-nodes 0..nx, node nx is the Dirichlet inflow edge
  int ny = 0;          // 0 for lines
  std::size_t col = 1;
  double h = 0.0, hy = 0.0;
  double sigma = 0.0;

  explicit Window(const Grid& g, double sigma_)
      : nx(g.n_x()), ny(g.is_strip() ? g.n_y() : 0), col(g.column_size()), h(g.h()),
        hy(g.h_y()), sigma(sigma_) {}

  std::size_t size() const { return (std::size_t(nx) + 1) * col; }
  std::size_t idx(int j, std::size_t k) const { return std::size_t(j) * col + k; }
  std::size_t k_lo() const { return ny > 0 ? 1 : 0; }
  std::size_t k_hi() const { return ny > 0 ? col - 1 : 1; }  // exclusive

  void laplacian(const Vec& y, Vec& out) const {
    std::fill(out.begin(), out.end(), 0.0);
    const double ih2 = 1.0 / (h * h);
    const double iy2 = ny > 0 ? 1.0 / (hy * hy) : 0.0;
    for (int j = 0; j < nx; ++j)
      for (std::size_t k = k_lo(); k < k_hi(); ++k) {
        const std::size_t i = idx(j, k);
        double lx;
        if (j == 0)
          lx = (2.0 * y[i + col] - (2.0 + 2.0 * h * sigma) * y[i]) * ih2;
        else
          lx = (y[i - col] - 2.0 * y[i] + y[i + col]) * ih2;
        double ly = 0.0;
        if (ny > 0) ly = (y[i - 1] - 2.0 * y[i] + y[i + 1]) * iy2;
        out[i] = lx + ly;
      }
  }
};

// (a I - b Delta) y = r for constant a, b: sine transform in y, Thomas in x.
class ConstSolver {
public:
  ConstSolver(const Window& w, double a, double b) : w_(w) {
    modes_ = w.ny > 0 ? w.ny - 1 : 1;
    const double ih2 = 1.0 / (w.h * w.h);
    std::vector<double> lam(modes_, 0.0);
    if (w.ny > 0)
      for (int m = 0; m < modes_; ++m) {
        const double s = std::sin(std::numbers::pi * (m + 1) / (2.0 * w.ny));
        lam[m] = 4.0 * s * s / (w.hy * w.hy);
      }
    west_ = -b * ih2;
    cp_.assign(std::size_t(w.nx) * modes_, 0.0);
    inv_.assign(std::size_t(w.nx) * modes_, 0.0);
    for (int m = 0; m < modes_; ++m) {
      double prev = 0.0;
      for (int j = 0; j < w.nx; ++j) {
        const double diag = j == 0 ? a + b * (2.0 + 2.0 * w.h * w.sigma) * ih2 + b * lam[m]
                                   : a + 2.0 * b * ih2 + b * lam[m];
        const double east = j == 0 ? -2.0 * b * ih2 : -b * ih2;
        const double den = diag - (j > 0 ? west_ * prev : 0.0);
        const std::size_t q = std::size_t(j) * modes_ + m;
        inv_[q] = 1.0 / den;
        cp_[q] = east * inv_[q];
        prev = cp_[q];
      }
    }
    if (w.ny > 0) dst_ = std::make_unique<detail::ColumnSineTransform>(w.nx + 1, w.ny);
  }

  void solve(Vec& y) const {
    if (dst_) dst_->apply(y.data());
    const std::size_t off = w_.ny > 0 ? 1 : 0;
    for (int m = 0; m < modes_; ++m) {
      double prev = 0.0;
      for (int j = 0; j < w_.nx; ++j) {
        const std::size_t q = std::size_t(j) * modes_ + m;
        double& yj = y[w_.idx(j, off + m)];
        yj = (yj - (j > 0 ? west_ * prev : 0.0)) * inv_[q];
        prev = yj;
      }
      for (int j = w_.nx - 2; j >= 0; --j)
        y[w_.idx(j, off + m)] -= cp_[std::size_t(j) * modes_ + m] * y[w_.idx(j + 1, off + m)];
    }
    if (dst_) {
      dst_->apply(y.data());
      const double scale = 1.0 / (2.0 * w_.ny);
      for (auto& e : y) e *= scale;
    }
    for (std::size_t k = 0; k < w_.col; ++k) y[w_.idx(w_.nx, k)] = 0.0;
  }

private:
  const Window& w_;
  int modes_ = 1;
  double west_ = 0.0;
  std::vector<double> cp_, inv_;
  std::unique_ptr<detail::ColumnSineTransform> dst_;
};

double dot(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double sup(const Vec& a) {
  double s = 0.0;
  for (double e : a) s = std::max(s, std::abs(e));
  return s;
}

class Stepper {
public:
  Stepper(const Grid& g, const ModelParams& p, double c, const EvolveOptions& o)
      : win_(g, 0.0), p_(p), opts_(o) {
    const EigenPair nu = eigen_nu(p.with_c(c));
    win_.sigma = c * nu.nu2;
    g_coef_ = 1.0 / (nu.nu1 * c);
    dt_ = g.h() / c;
    v_solver_ = std::make_unique<ConstSolver>(win_, 1.0 / dt_ + 0.5 * p.gamma, 0.5);
    const double shift = -0.5 * fprime(0.0) / p.d;
    u_prec_ = std::make_unique<ConstSolver>(win_, 1.0 / dt_ + shift, 0.5);
    lap_.resize(win_.size());
  }

  double dt() const { return dt_; }

  // Backward-Euler half step from v^0 to v^{1/2}.
  void bootstrap_v(const Vec& u, Vec& v) {
    ConstSolver half(win_, 2.0 / dt_ + p_.gamma, 1.0);
    Vec r(win_.size(), 0.0);
    for (int j = 0; j < win_.nx; ++j)
      for (std::size_t k = win_.k_lo(); k < win_.k_hi(); ++k) {
        const std::size_t i = win_.idx(j, k);
        r[i] = 2.0 / dt_ * v[i] + u[i];
      }
    add_left_source(u, r);
    half.solve(r);
    v.swap(r);
  }

  // v^{n-1/2} -> v^{n+1/2} with u^n.
  void advance_v(const Vec& u, Vec& v) {
    win_.laplacian(v, lap_);
    Vec r(win_.size(), 0.0);
    for (int j = 0; j < win_.nx; ++j)
      for (std::size_t k = win_.k_lo(); k < win_.k_hi(); ++k) {
        const std::size_t i = win_.idx(j, k);
        r[i] = (1.0 / dt_ - 0.5 * p_.gamma) * v[i] + 0.5 * lap_[i] + u[i];
      }
    add_left_source(u, r);
    v_solver_->solve(r);
    v.swap(r);
  }

  // u^n -> u^{n+1} given v^{n+1/2}; Newton on the Crank-Nicolson residual.
  void advance_u(Vec& u, const Vec& v, double time) {
    const std::size_t N = win_.size();
    Vec known(N, 0.0);
    win_.laplacian(u, lap_);
    for (int j = 0; j < win_.nx; ++j)
      for (std::size_t k = win_.k_lo(); k < win_.k_hi(); ++k) {
        const std::size_t i = win_.idx(j, k);
        known[i] = u[i] / dt_ + 0.5 * lap_[i] + 0.5 * f(u[i]) / p_.d - v[i] / p_.d;
      }
    Vec U = u, F(N), delta(N);
    double upd = 0.0;
    for (int it = 0; it < opts_.newton_max_iters; ++it) {
      residual(U, known, F);
      if (sup(F) == 0.0) {
        u.swap(U);
        return;
      }
      solve_jacobian(U, F, delta);
      for (std::size_t i = 0; i < N; ++i) U[i] -= delta[i];
      upd = sup(delta);
      if (!std::isfinite(upd)) throw BlowUp(time, "non-finite Newton update");
      if (upd <= opts_.newton_tol * std::max(1.0, sup(U))) {
        u.swap(U);
        return;
      }
    }
    throw NewtonFailure(time, opts_.newton_max_iters, upd, "Newton iteration did not converge");
  }

private:
  double f(double x) const { return opts_.linear_reaction ? -p_.beta * x : f_cubic(x, p_.beta); }
  double fprime(double x) const { return opts_.linear_reaction ? -p_.beta : f_cubic_prime(x, p_.beta); }

  // Inhomogeneous part of the v closure, v_x - sigma v = u / (nu1 c), at both half levels.
  void add_left_source(const Vec& u, Vec& r) const {
    for (std::size_t k = win_.k_lo(); k < win_.k_hi(); ++k)
      r[win_.idx(0, k)] -= 2.0 * g_coef_ * u[win_.idx(0, k)] / win_.h;
  }

  void residual(const Vec& U, const Vec& known, Vec& F) {
    win_.laplacian(U, lap_);
    std::fill(F.begin(), F.end(), 0.0);
    for (int j = 0; j < win_.nx; ++j)
      for (std::size_t k = win_.k_lo(); k < win_.k_hi(); ++k) {
        const std::size_t i = win_.idx(j, k);
        F[i] = U[i] / dt_ - 0.5 * lap_[i] - 0.5 * f(U[i]) / p_.d - known[i];
      }
  }

  void jacobian_apply(const Vec& U, const Vec& x, Vec& out) {
    win_.laplacian(x, out);
    for (int j = 0; j < win_.nx; ++j)
      for (std::size_t k = win_.k_lo(); k < win_.k_hi(); ++k) {
        const std::size_t i = win_.idx(j, k);
        out[i] = (1.0 / dt_ - 0.5 * fprime(U[i]) / p_.d) * x[i] - 0.5 * out[i];
      }
  }

  void solve_jacobian(const Vec& U, const Vec& F, Vec& x) {
    if (win_.ny == 0)
      solve_tridiagonal(U, F, x);
    else
      bicgstab(U, F, x);
  }

  void solve_tridiagonal(const Vec& U, const Vec& F, Vec& x) {
    const int n = win_.nx;
    const double ih2 = 1.0 / (win_.h * win_.h);
    std::vector<double> cp(n);
    x.assign(win_.size(), 0.0);
    double prev = 0.0;
    for (int j = 0; j < n; ++j) {
      const double react = 1.0 / dt_ - 0.5 * fprime(U[j]) / p_.d;
      const double diag = j == 0 ? react + 0.5 * (2.0 + 2.0 * win_.h * win_.sigma) * ih2 : react + ih2;
      const double east = j == 0 ? -ih2 : -0.5 * ih2;
      const double west = -0.5 * ih2;
      const double den = diag - (j > 0 ? west * cp[j - 1] : 0.0);
      cp[j] = east / den;
      x[j] = (F[j] - (j > 0 ? west * prev : 0.0)) / den;
      prev = x[j];
    }
    for (int j = n - 2; j >= 0; --j) x[j] -= cp[j] * x[j + 1];
  }

  // Right-preconditioned BiCGSTAB; the preconditioner freezes the reaction at u = 0.
  void bicgstab(const Vec& U, const Vec& b, Vec& x) {
    const std::size_t N = win_.size();
    x.assign(N, 0.0);
    Vec r = b, rhat = b, p(N, 0.0), v(N, 0.0), s(N), t(N), ph(N), sh(N);
    const double bnorm = std::sqrt(dot(b, b));
    if (bnorm == 0.0) return;
    double rho = 1.0, alpha = 1.0, omega = 1.0;
    for (int it = 0; it < opts_.linear_max_iters; ++it) {
      const double rho_new = dot(rhat, r);
      if (rho_new == 0.0) break;
      const double beta = (rho_new / rho) * (alpha / omega);
      for (std::size_t i = 0; i < N; ++i) p[i] = r[i] + beta * (p[i] - omega * v[i]);
      ph = p;
      u_prec_->solve(ph);
      jacobian_apply(U, ph, v);
      alpha = rho_new / dot(rhat, v);
      for (std::size_t i = 0; i < N; ++i) s[i] = r[i] - alpha * v[i];
      if (std::sqrt(dot(s, s)) <= opts_.linear_tol * bnorm) {
        for (std::size_t i = 0; i < N; ++i) x[i] += alpha * ph[i];
        return;
      }
      sh = s;
      u_prec_->solve(sh);
      jacobian_apply(U, sh, t);
      omega = dot(t, s) / dot(t, t);
      for (std::size_t i = 0; i < N; ++i) {
        x[i] += alpha * ph[i] + omega * sh[i];
        r[i] = s[i] - omega * t[i];
      }
      if (std::sqrt(dot(r, r)) <= opts_.linear_tol * bnorm) return;
      rho = rho_new;
    }
    throw SolverFailure(std::sqrt(dot(r, r)) / bnorm, "BiCGSTAB did not converge in the Newton step");
  }

  Window win_;
  ModelParams p_;
  EvolveOptions opts_;
  double dt_ = 0.0;
  double g_coef_ = 0.0;
  std::unique_ptr<ConstSolver> v_solver_, u_prec_;
  Vec lap_;
};

// Drops the outflow column and appends a zero inflow column.
void shift_window(Vec& a, std::size_t col) {
  std::move(a.begin() + col, a.end(), a.begin());
  std::fill(a.end() - col, a.end(), 0.0);
}

}  // namespace

EvolveResult evolve_moving_window(const PhysicalState& state, const ModelParams& params, double c,
                                  double T, const EvolveOptions& opts) {
  params.validate();
  if (!(c > 0.0) || !std::isfinite(c)) throw ValidationError("c", "speed must be positive");
  if (!(T >= 0.0) || !std::isfinite(T)) throw InvalidArgument("evolution time must be finite and >= 0");
  const Grid& g0 = state.u.grid();
  if (!g0.same_shape(state.v.grid())) throw InvalidArgument("u and v must share a grid");
  if (g0.n_x() < 4) throw InvalidArgument("window needs n_x >= 4");
  if (g0.is_strip() != (params.dim == Dimension::strip))
    throw InvalidArgument("profile dimension does not match the model");

  Stepper st(g0, params, c, opts);
  const double dt = st.dt();
  const long steps = std::lround(T / dt);
  const std::size_t col = g0.column_size();
  Vec u = state.u.copy_samples();
  Vec v = state.v.copy_samples();
  const double initial_max = state.u.max();

  EvolveResult res{state, 0, false, 0.0};
  auto snapshot = [&](long n) {
    const Grid g = g0.shifted(double(n) * g0.h());
    return PhysicalState{Profile(g, u), Profile(g, v), state.time + n * dt};
  };

  if (steps > 0) st.bootstrap_v(u, v);
  for (long n = 0; n < steps; ++n) {
    const double t = state.time + n * dt;
    if (n > 0) st.advance_v(u, v);
    st.advance_u(u, v, t + dt);
    shift_window(u, col);
    shift_window(v, col);
    double umax = -INFINITY;
    for (double e : u) {
      if (!std::isfinite(e) || std::abs(e) > 1e6) throw BlowUp(t + dt, "solution left the admissible range");
      umax = std::max(umax, e);
    }
    res.steps = n + 1;
    if (opts.observer && opts.observe_every > 0 && (n + 1) % opts.observe_every == 0)
      opts.observer(n + 1, snapshot(n + 1));
    if (initial_max > 0.0 && umax < opts.collapse_fraction * initial_max) {
      res.collapsed = true;
      if (opts.stop_on_collapse) break;
    }
  }
  res.state = snapshot(res.steps);
  res.distance = double(res.steps) * g0.h();
  return res;
}

StabilityReport stability_verdict(const PhysicalState& initial, const PhysicalState& final,
                                  double threshold, double distance) {
  if (!(threshold > 0.0)) throw InvalidArgument("stability threshold must be positive");
  const Grid& g = initial.u.grid();
  if (!g.same_shape(final.u.grid())) throw InvalidArgument("states must share a window shape");
  StabilityReport r;
  r.threshold = threshold;
  r.distance_propagated = distance;
  r.initial_max = initial.u.max();
  r.final_max = final.u.max();
  double s2 = 0.0;
  for (std::size_t i = 0; i < initial.u.size(); ++i) {
    const double e = std::abs(final.u[i] - initial.u[i]);
    r.sup_deviation = std::max(r.sup_deviation, e);
    s2 += e * e;
  }
  r.l2_deviation = std::sqrt(s2 * g.h() * (g.is_strip() ? g.h_y() : 1.0));
  r.collapsed = r.initial_max > 0.0 && r.final_max < 0.1 * r.initial_max;
  const double tol = threshold * r.initial_max;
  if (r.collapsed || r.sup_deviation >= 10.0 * tol)
    r.verdict = Verdict::unstable;
  else if (r.sup_deviation <= tol)
    r.verdict = Verdict::stable;
  else
    r.verdict = Verdict::inconclusive;
  return r;
}

StabilityRun run_stability_test(const Profile& w, const ModelParams& params, double threshold,
                                double lengths, const EvolveOptions& opts) {
  if (!(lengths > 0.0)) throw InvalidArgument("propagation length must be positive");
  PhysicalState init = rescale_to_physical(w, params);
  const Grid& g = init.u.grid();
  const double T = lengths * g.length() / params.c;
  EvolveResult ev = evolve_moving_window(init, params, params.c, T, opts);
  StabilityReport rep = stability_verdict(init, ev.state, threshold, ev.distance);
  return StabilityRun{rep, std::move(init), std::move(ev.state), ev.steps};
}

}  // namespace fhn
