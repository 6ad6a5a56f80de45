#include "fhnpulse/verification.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <cstdio>
#include <random>

#include "fhnpulse/energy.hpp"
#include "fhnpulse/errors.hpp"
#include "fhnpulse/parabolic.hpp"

namespace fhn {

OracleReport OracleReport::make(std::string name, double measured, double tolerance, std::string setup,
                                double value) {
  OracleReport r;
  r.name = std::move(name);
  r.measured = measured;
  r.tolerance = tolerance;
  r.pass = measured <= tolerance;
  r.value = value;
  r.setup = std::move(setup);
  return r;
}

std::string format_report(const OracleReport& r) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%s %-28s measured=%.3e tol=%.1e value=%.6g  [%s]", r.pass ? "PASS" : "FAIL",
                r.name.c_str(), r.measured, r.tolerance, r.value, r.setup.c_str());
  return buf;
}

// --- dense oracle -----------------------------------------------------------------

DenseSystem to_dense(const BandedSystem& sys) {
  const std::size_t n = sys.unknowns(), col = sys.column();
  if (n > kMaxDenseUnknowns) throw InvalidArgument("system too large for the dense oracle");
  DenseSystem d{n, std::vector<double>(n * n, 0.0), sys.rhs};
  for (std::size_t r = 0; r < n; ++r) {
    const std::size_t k = r % col;
    d.at(r, r) = sys.diag[r];
    if (r >= col) d.at(r, r - col) = sys.west[r];
    if (r + col < n) d.at(r, r + col) = sys.east[r];
    if (sys.n_y > 0 && k > 0) d.at(r, r - 1) = sys.south[r];
    if (sys.n_y > 0 && k + 1 < col) d.at(r, r + 1) = sys.north[r];
  }
  return d;
}

std::vector<double> dense_solve(DenseSystem s) {
  const std::size_t n = s.n;
  if (s.a.size() != n * n || s.b.size() != n) throw InvalidArgument("dense system has inconsistent sizes");
  double scale = 0.0;
  for (double v : s.a) scale = std::max(scale, std::abs(v));
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(s.at(i, k)) > std::abs(s.at(p, k))) p = i;
    if (!(std::abs(s.at(p, k)) > 1e-300 + 1e-15 * scale)) throw NumericalError("dense oracle: singular matrix");
    if (p != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(s.at(k, j), s.at(p, j));
      std::swap(s.b[k], s.b[p]);
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      const double m = s.at(i, k) / s.at(k, k);
      if (m == 0.0) continue;
      for (std::size_t j = k; j < n; ++j) s.at(i, j) -= m * s.at(k, j);
      s.b[i] -= m * s.b[k];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    double acc = s.b[i];
    for (std::size_t j = i + 1; j < n; ++j) acc -= s.at(i, j) * x[j];
    x[i] = acc / s.at(i, i);
  }
  return x;
}

Profile dense_oracle_solve(const BandedSystem& sys, const Grid& g) {
  return unknowns_to_profile(g, dense_solve(to_dense(sys)));
}

DenseSystem assemble_resolvent_dense(const Profile& s, double kappa, EigenPair nu) {
  const Grid& g = s.grid();
  const int n = g.n_x();
  const double h = g.h();
  const bool strip = g.is_strip();
  const std::size_t col = strip ? std::size_t(g.n_y()) - 1 : 1;
  const std::size_t N = (std::size_t(n) + 1) * col;
  if (N > kMaxDenseUnknowns) throw InvalidArgument("system too large for the dense oracle");
  const double hy = strip ? g.h_y() : 1.0;
  const double xr = g.right_end();

  // Cell weights e^{x_mid} h and nodal weights, relative to e^{x_n}.
  std::vector<double> W(n), omega(n + 1, 0.0);
  for (int c = 0; c < n; ++c) {
    W[c] = std::exp(g.x(c) + 0.5 * h - xr) * h;
    omega[c] += 0.5 * W[c];
    omega[c + 1] += 0.5 * W[c];
  }
  DenseSystem d{N, std::vector<double>(N * N, 0.0), std::vector<double>(N, 0.0)};
  auto id = [col](int j, std::size_t q) { return std::size_t(j) * col + q; };
  auto src = [&](int j, std::size_t q) { return s.at(j, strip ? int(q) + 1 : 0); };

  for (std::size_t q = 0; q < col; ++q) {
    // x-stiffness, element by element
    for (int c = 0; c < n; ++c) {
      const double k = W[c] * hy / (h * h);
      const std::size_t a = id(c, q), b = id(c + 1, q);
      d.at(a, a) += k;
      d.at(b, b) += k;
      d.at(a, b) -= k;
      d.at(b, a) -= k;
    }
    for (int j = 0; j <= n; ++j) {
      const std::size_t i = id(j, q);
      d.at(i, i) += kappa * omega[j] * hy;
      d.b[i] += omega[j] * hy * src(j, q);
    }
    // natural boundary terms from the Robin closures
    const double ea = std::exp(g.x(0) - xr), eb = 1.0;
    d.at(id(0, q), id(0, q)) += ea * nu.nu2 * hy;
    d.b[id(0, q)] -= ea * src(0, q) / nu.nu1 * hy;
    d.at(id(n, q), id(n, q)) -= eb * nu.nu1 * hy;
    d.b[id(n, q)] += eb * src(n, q) / nu.nu2 * hy;
  }
  if (strip) {
    // y-stiffness on edges between rows k and k+1; the edge rows are zero
    for (int j = 0; j <= n; ++j) {
      const double k = omega[j] * hy / (hy * hy);
      for (int e = 0; e < g.n_y(); ++e) {
        const int lo = e, hi = e + 1;  // grid rows
        const bool lo_in = lo >= 1 && lo <= g.n_y() - 1, hi_in = hi >= 1 && hi <= g.n_y() - 1;
        const std::size_t a = lo_in ? id(j, std::size_t(lo - 1)) : 0, b = hi_in ? id(j, std::size_t(hi - 1)) : 0;
        if (lo_in) d.at(a, a) += k;
        if (hi_in) d.at(b, b) += k;
        if (lo_in && hi_in) {
          d.at(a, b) -= k;
          d.at(b, a) -= k;
        }
      }
    }
  }
  // divide each row by its nodal weight / h^2, as the banded form does
  for (std::size_t r = 0; r < N; ++r) {
    const double f = h * h / (omega[r / col] * hy);
    for (std::size_t c = 0; c < N; ++c) d.at(r, c) *= f;
    d.b[r] *= f;
  }
  return d;
}

// --- gradient and symmetry checks -----------------------------------------------------

namespace {

double energy_at(const Profile& w, const ModelParams& p) { return energy_Jc(w, apply_Lc(w, p), p).total; }

Profile axpy(const Profile& w, double a, const Profile& phi) {
  std::vector<double> s = w.copy_samples();
  auto ph = phi.samples();
  for (std::size_t i = 0; i < s.size(); ++i) s[i] += a * ph[i];
  return w.with_samples(std::move(s));
}

std::string setup_of(const Grid& g, const ModelParams& p) {
  char buf[160];
  if (g.is_strip())
    std::snprintf(buf, sizeof buf, "strip n_x=%d n_y=%d h=%g d=%g c=%g", g.n_x(), g.n_y(), g.h(), p.d, p.c);
  else
    std::snprintf(buf, sizeof buf, "line n_x=%d h=%g d=%g c=%g", g.n_x(), g.h(), p.d, p.c);
  return buf;
}

}  // namespace

OracleReport fd_gradient_check(const Profile& w, const Profile& phi, const ModelParams& params, double eps,
                               double tolerance) {
  if (!(eps >= 1e-7 && eps <= 1e-3)) throw InvalidArgument("eps must lie in [1e-7, 1e-3]");
  const double analytic = dJc_dir(w, apply_Lc(w, params), phi, params);
  const double fd = (energy_at(axpy(w, eps, phi), params) - energy_at(axpy(w, -eps, phi), params)) / (2.0 * eps);
  const double scale = std::max(std::abs(analytic), std::abs(fd));
  const double rel = scale == 0.0 ? 0.0 : std::abs(analytic - fd) / scale;
  char name[64];
  std::snprintf(name, sizeof name, "fd_gradient eps=%g", eps);
  return OracleReport::make(name, rel, tolerance, setup_of(w.grid(), params), analytic);
}

OracleReport selfadjoint_residual(const Profile& u1, const Profile& u2, const ModelParams& params,
                                  double tolerance) {
  NonlocalSolver s(params);
  const double a = inner_l2exp(u1, s.apply_Lc(u2));
  const double b = inner_l2exp(s.apply_Lc(u1), u2);
  const double den = std::sqrt(inner_l2exp(u1, u1) * inner_l2exp(u2, u2));
  const double res = den == 0.0 ? 0.0 : std::abs(a - b) / den;
  return OracleReport::make("selfadjoint_residual", res, tolerance, setup_of(u1.grid(), params));
}

// --- convergence orders -------------------------------------------------------------

std::string to_string(ManufacturedCase c) {
  switch (c) {
    case ManufacturedCase::lc: return "order_Lc";
    case ManufacturedCase::wstar: return "order_wstar";
    case ManufacturedCase::parabolic_linear: return "order_parabolic_linear";
  }
  return "unknown";
}

namespace {

ModelParams elliptic_params() {
  ModelParams p;
  p.d = 5e-4;
  p.gamma = 1.0 / 16.0;
  p.beta = 0.25;
  p.c = 5.0;
  return p;
}

Grid centered_line(double half, double h) {
  const int n = int(std::lround(2.0 * half / h));
  return Grid::line(-half, 2.0 * half / n, n);
}

double gauss(double x) { return std::exp(-x * x); }
double gauss_d1(double x) { return -2.0 * x * std::exp(-x * x); }
double gauss_d2(double x) { return (4.0 * x * x - 2.0) * std::exp(-x * x); }

double max_error(const Profile& p, const std::function<double(double)>& exact) {
  const Grid& g = p.grid();
  double e = 0.0;
  for (int j = 0; j <= g.n_x(); ++j) e = std::max(e, std::abs(p.at(j) - exact(g.x(j))));
  return e;
}

// Linearized system u_t = u_xx - (beta u + v)/d, v_t = v_xx + u - gamma v with
// Gaussian u0 and v0 = 0. Both components diffuse alike, so
// u(x,t) = [exp(tB)]_11 G(x, s^2 + 2t), B = [[-beta/d, -1/d], [1, -gamma]].
struct LinearCase {
  double d = 0.5, beta = 0.25, gamma = 1.0 / 16.0, c = 1.0;
  double s = 0.5, T = 1.0, half = 10.0;

  double amplitude(double t) const {
    using C = std::complex<double>;
    const double b11 = -beta / d, b12 = -1.0 / d, b21 = 1.0, b22 = -gamma;
    const double tau = 0.5 * (b11 + b22);
    const C delta = std::sqrt(C(0.25 * (b11 - b22) * (b11 - b22) + b12 * b21));
    const C sh = delta == C(0.0) ? C(t) : std::sinh(delta * t) / delta;
    return (std::exp(tau * t) * (std::cosh(delta * t) + (b11 - tau) * sh)).real();
  }

  double exact(double x, double t) const {
    const double var = s * s + 2.0 * t;
    return amplitude(t) * s / std::sqrt(var) * std::exp(-x * x / (2.0 * var));
  }
};

double parabolic_error(double h) {
  const LinearCase lc;
  ModelParams p;
  p.d = lc.d;
  p.beta = lc.beta;
  p.gamma = lc.gamma;
  p.c = lc.c;
  const Grid g = centered_line(lc.half, h);
  Profile u = Profile::sample(g, [&](double x) { return std::exp(-x * x / (2.0 * lc.s * lc.s)); });
  PhysicalState st{u, Profile::zeros(g), 0.0};
  EvolveOptions o;
  o.linear_reaction = true;
  o.stop_on_collapse = false;
  const EvolveResult r = evolve_moving_window(st, p, lc.c, lc.T, o);
  const double t = r.steps * g.h() / lc.c;
  return max_error(r.state.u, [&](double x) { return lc.exact(x, t); });
}

}  // namespace

double manufactured_error(ManufacturedCase c, double h) {
  const ModelParams p = elliptic_params();
  switch (c) {
    case ManufacturedCase::lc: {
      const Grid g = centered_line(10.0, h);
      const double c2 = p.c * p.c;
      Profile w = Profile::sample(g, [&](double x) { return -c2 * (gauss_d2(x) + gauss_d1(x)) + p.gamma * gauss(x); });
      return max_error(apply_Lc(w, p), gauss);
    }
    case ManufacturedCase::wstar: {
      const Grid g = centered_line(10.0, h);
      Profile s = Profile::sample(g, [](double x) { return -(gauss_d2(x) + gauss_d1(x)) + gauss(x); });
      ResolventSolver solver(g, 1.0, eigen_nu_star(p));
      return max_error(solver.solve(s), gauss);
    }
    case ManufacturedCase::parabolic_linear: return parabolic_error(h);
  }
  return NAN;
}

double fitted_order(const std::vector<double>& hs, const std::vector<double>& errors) {
  if (hs.size() != errors.size() || hs.size() < 2) throw InvalidArgument("need matching h and error lists");
  const std::size_t n = hs.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(hs[i] > 0.0) || !(errors[i] > 0.0)) throw InvalidArgument("order fit needs positive h and errors");
    const double x = std::log(hs[i]), y = std::log(errors[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

OracleReport convergence_order(ManufacturedCase c, const std::vector<double>& hs, double band) {
  if (hs.size() < 3) throw InvalidArgument("convergence_order needs at least three grids");
  std::vector<double> err;
  for (double h : hs) err.push_back(manufactured_error(c, h));
  const double order = fitted_order(hs, err);
  char setup[128];
  std::snprintf(setup, sizeof setup, "h=%g..%g, %zu grids, finest error %.2e", hs.front(), hs.back(), hs.size(),
                err.back());
  return OracleReport::make(to_string(c), std::abs(order - 2.0), band, setup, order);
}

// --- suite ----------------------------------------------------------------------------

std::vector<OracleReport> run_verification_suite() {
  std::vector<OracleReport> out;
  const ModelParams p = elliptic_params();

  // dense agreement on n_x = 200
  {
    const Grid g = Grid::line(-5.0, 0.05, 200);
    Profile w = Profile::sample(g, [](double x) { return std::exp(-x * x) - 0.2 * std::exp(-(x + 2) * (x + 2)); });
    Profile v = apply_Lc(w, p);
    auto diff = [](const Profile& a, const Profile& b) {
      double m = 0.0;
      for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
      return m;
    };
    out.push_back(OracleReport::make("dense_oracle_Lc", diff(v, dense_oracle_solve(assemble_Lc(w, p), g)), 1e-10,
                                     setup_of(g, p)));
    Profile q = solve_wstar(w, v, p);
    out.push_back(OracleReport::make("dense_oracle_wstar", diff(q, dense_oracle_solve(assemble_wstar(w, v, p), g)),
                                     1e-10, setup_of(g, p)));
    // cell-by-cell assembly, solved densely
    Profile s = w.with_samples([&] {
      auto x = w.copy_samples();
      for (double& e : x) e /= p.c * p.c;
      return x;
    }());
    const DenseSystem ind = assemble_resolvent_dense(s, p.gamma / (p.c * p.c), eigen_nu(p));
    out.push_back(OracleReport::make("independent_assembly_Lc", diff(v, unknowns_to_profile(g, dense_solve(ind))),
                                     1e-10, setup_of(g, p)));

    ModelParams ps = p;
    ps.dim = Dimension::strip;
    ps.L = 1.0;
    const Grid gs = Grid::strip(-2.0, 0.1, 40, ps.solver_half_width(), 8);
    Profile ws = Profile::sample(gs, [&](double x, double y) {
      return std::exp(-x * x) * std::cos(std::numbers::pi * y / (2.0 * gs.half_width()));
    });
    out.push_back(OracleReport::make("dense_oracle_Lc_strip",
                                     diff(apply_Lc(ws, ps), dense_oracle_solve(assemble_Lc(ws, ps), gs)), 1e-10,
                                     setup_of(gs, ps)));
  }

  // gradient check
  {
    const Grid g = Grid::line(-10.0, 0.05, 400);
    std::mt19937 rng(12345);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    auto bumps = [&](double amp) {
      double a[3], m[3];
      for (int i = 0; i < 3; ++i) {
        a[i] = amp * U(rng);
        m[i] = 3.0 * U(rng);
      }
      return Profile::sample(g, [=](double x) {
        double s = 0.0;
        for (int i = 0; i < 3; ++i) s += a[i] * std::exp(-(x - m[i]) * (x - m[i]));
        return s;
      });
    };
    Profile w = bumps(1.0), phi = bumps(1.0);
    out.push_back(fd_gradient_check(w, phi, p, 1e-5));
    const OracleReport a = fd_gradient_check(w, phi, p, 1e-3, 1.0);
    const OracleReport b = fd_gradient_check(w, phi, p, 5e-4, 1.0);
    const double ratio = b.measured > 0.0 ? a.measured / b.measured : 0.0;
    out.push_back(OracleReport::make("fd_gradient_halving_ratio", std::abs(ratio - 4.0), 1.0, setup_of(g, p), ratio));

    Profile u1 = Profile::sample(g, [](double x) { return std::exp(-4.0 * (x + 1.5) * (x + 1.5)); });
    Profile u2 = Profile::sample(g, [](double x) { return std::exp(-4.0 * (x - 1.0) * (x - 1.0)); });
    out.push_back(selfadjoint_residual(u1, u2, p));
  }

  const std::vector<double> hs = {0.2, 0.1, 0.05, 0.025};
  out.push_back(convergence_order(ManufacturedCase::lc, hs));
  out.push_back(convergence_order(ManufacturedCase::wstar, hs));
  out.push_back(convergence_order(ManufacturedCase::parabolic_linear, {0.1, 0.05, 0.025, 0.0125}));

  // zero state stays zero
  {
    ModelParams pp = p;
    const Grid g = Grid::line(-5.0, 0.01, 1000);
    PhysicalState z{Profile::zeros(g), Profile::zeros(g), 0.0};
    EvolveOptions o;
    const EvolveResult r = evolve_moving_window(z, pp, pp.c, 100 * g.h() / pp.c, o);
    out.push_back(OracleReport::make("zero_state_equilibrium", std::max(r.state.u.sup_norm(), r.state.v.sup_norm()),
                                     0.0, "line n_x=1000 h=0.01, 100 steps"));
  }
  return out;
}

}  // namespace fhn
