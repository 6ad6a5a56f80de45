#include "fhnpulse/nonlocal.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "fhnpulse/errors.hpp"
#include "sine_transform.hpp"

namespace fhn {

namespace {

struct Stencil {
  double center, west, east, south, north;
};

}  // namespace

// --- BandedSystem -------------------------------------------------------------

std::vector<double> BandedSystem::apply(std::span<const double> y) const {
  const std::size_t n = unknowns(), col = column();
  if (y.size() != n) throw InvalidArgument("vector length does not match the system");
  std::vector<double> out(n);
  for (std::size_t r = 0; r < n; ++r) {
    const std::size_t k = r % col;
    double s = diag[r] * y[r];
    if (r >= col) s += west[r] * y[r - col];
    if (r + col < n) s += east[r] * y[r + col];
    if (n_y > 0 && k > 0) s += south[r] * y[r - 1];
    if (n_y > 0 && k + 1 < col) s += north[r] * y[r + 1];
    out[r] = s;
  }
  return out;
}

double BandedSystem::norm_inf() const {
  double m = 0.0;
  for (std::size_t r = 0; r < diag.size(); ++r)
    m = std::max(m, std::abs(diag[r]) + std::abs(west[r]) + std::abs(east[r]) + std::abs(south[r]) +
                        std::abs(north[r]));
  return m;
}

double BandedSystem::backward_error(std::span<const double> y) const {
  auto ay = apply(y);
  double rn = 0.0, yn = 0.0, bn = 0.0;
  for (std::size_t r = 0; r < ay.size(); ++r) {
    rn = std::max(rn, std::abs(ay[r] - rhs[r]));
    yn = std::max(yn, std::abs(y[r]));
    bn = std::max(bn, std::abs(rhs[r]));
  }
  const double denom = norm_inf() * yn + bn;
  return denom > 0.0 ? rn / denom : rn;
}

bool BandedSystem::diagonally_dominant() const {
  for (std::size_t r = 0; r < diag.size(); ++r)
    if (std::abs(diag[r]) <
        std::abs(west[r]) + std::abs(east[r]) + std::abs(south[r]) + std::abs(north[r]))
      return false;
  return true;
}

// --- ResolventSolver ---------------------------------------------------------

namespace {

// Row coefficients of the h^2-scaled stencil at x-node j (without the y part).
Stencil row_stencil(int j, int n, double h, double kappa, double t, EigenPair nu, double r) {
  Stencil s{2.0 + kappa * h * h + 2.0 * r, -(1.0 - t), -(1.0 + t), -r, -r};
  if (j == 0) {
    s.center += 2.0 * h * nu.nu2 * std::exp(-0.5 * h);
    s.west = 0.0;
    s.east = -2.0;
  } else if (j == n) {
    s.center -= 2.0 * h * nu.nu1 * std::exp(0.5 * h);
    s.west = -2.0;
    s.east = 0.0;
  }
  return s;
}

}  // namespace

ResolventSolver::ResolventSolver(const Grid& shape, double kappa, EigenPair nu)
    : shape_(shape), kappa_(kappa), nu_(nu), t_(std::tanh(0.5 * shape.h())) {
  if (shape.n_x() < 4) throw InvalidArgument("nonlocal solves need n_x >= 4");
  if (!(kappa > 0.0)) throw InvalidArgument("resolvent needs kappa > 0");
  const int n = shape.n_x();
  const double h = shape.h();
  modes_ = shape.is_strip() ? shape.n_y() - 1 : 1;

  // Modal diagonal shift lambda_m h^2 replaces the y-stencil 2r - 2r cos.
  std::vector<double> lam(modes_, 0.0);
  if (shape.is_strip()) {
    const double r = (h * h) / (shape.h_y() * shape.h_y());
    for (int m = 0; m < modes_; ++m) {
      const double sn = std::sin(std::numbers::pi * (m + 1) / (2.0 * shape.n_y()));
      lam[m] = 4.0 * r * sn * sn;
    }
  }

  cp_.assign(std::size_t(n + 1) * modes_, 0.0);
  inv_.assign(std::size_t(n + 1) * modes_, 0.0);
  for (int m = 0; m < modes_; ++m) {
    double prev_cp = 0.0;
    for (int j = 0; j <= n; ++j) {
      const Stencil s = row_stencil(j, n, h, kappa_, t_, nu_, 0.0);
      const double den = s.center + lam[m] - (j > 0 ? s.west * prev_cp : 0.0);
      if (!(std::abs(den) > 0.0) || !std::isfinite(den))
        throw SolverFailure(INFINITY, "zero pivot in tridiagonal factorization");
      const std::size_t idx = std::size_t(j) * modes_ + m;
      inv_[idx] = 1.0 / den;
      cp_[idx] = s.east * inv_[idx];
      prev_cp = cp_[idx];
    }
  }

  if (shape.is_strip()) plan_ = std::make_unique<detail::ColumnSineTransform>(n + 1, shape.n_y());
}

ResolventSolver::~ResolventSolver() = default;

std::vector<double> ResolventSolver::scaled_rhs(const Profile& s) const {
  const Grid& g = s.grid();
  const int n = g.n_x();
  const double h = g.h();
  const std::size_t m = g.column_size();
  const double left = h * h - 2.0 * h * std::exp(-0.5 * h) / nu_.nu1;
  const double right = h * h + 2.0 * h * std::exp(0.5 * h) / nu_.nu2;
  auto src = s.samples();
  std::vector<double> b(src.size());
  for (int j = 0; j <= n; ++j) {
    const double f = j == 0 ? left : (j == n ? right : h * h);
    for (std::size_t k = 0; k < m; ++k) b[j * m + k] = f * src[j * m + k];
  }
  return b;
}

Profile ResolventSolver::solve(const Profile& s) const {
  const Grid& g = s.grid();
  if (!matches(g)) throw InvalidArgument("source grid does not match the factored shape");
  const int n = g.n_x();
  const std::size_t col = g.column_size();
  const std::vector<double> b = scaled_rhs(s);
  std::vector<double> y = b;

  if (!g.is_strip()) {
    for (int j = 0; j <= n; ++j) {
      const double a = j > 0 ? row_stencil(j, n, g.h(), kappa_, t_, nu_, 0.0).west : 0.0;
      y[j] = (y[j] - (j > 0 ? a * y[j - 1] : 0.0)) * inv_[j];
    }
    for (int j = n - 1; j >= 0; --j) y[j] -= cp_[j] * y[j + 1];
  } else {
    plan_->apply(y.data());
    double* base = y.data() + 1;
    const int M = modes_;
    const double west_interior = -(1.0 - t_);
    for (int j = 0; j <= n; ++j) {
      double* cur = base + std::size_t(j) * col;
      const double* ip = &inv_[std::size_t(j) * M];
      if (j == 0) {
        for (int m = 0; m < M; ++m) cur[m] *= ip[m];
      } else {
        const double a = j == n ? -2.0 : west_interior;
        const double* prev = cur - col;
        for (int m = 0; m < M; ++m) cur[m] = (cur[m] - a * prev[m]) * ip[m];
      }
    }
    for (int j = n - 1; j >= 0; --j) {
      double* cur = base + std::size_t(j) * col;
      const double* next = cur + col;
      const double* cp = &cp_[std::size_t(j) * M];
      for (int m = 0; m < M; ++m) cur[m] -= cp[m] * next[m];
    }
    plan_->apply(y.data());
    const double scale = 1.0 / (2.0 * g.n_y());
    for (int j = 0; j <= n; ++j) {
      double* c = y.data() + std::size_t(j) * col;
      c[0] = 0.0;
      c[col - 1] = 0.0;
      for (std::size_t k = 1; k + 1 < col; ++k) c[k] *= scale;
    }
  }

  // Residual contract, evaluated on the physical-space stencil.
  const double h = g.h();
  const double r = g.is_strip() ? (h * h) / (g.h_y() * g.h_y()) : 0.0;
  const std::size_t k0 = g.is_strip() ? 1 : 0, k1 = g.is_strip() ? col - 1 : 1;
  double rn = 0.0, yn = 0.0, bn = 0.0, an = 0.0;
  for (int j = 0; j <= n; ++j) {
    const Stencil st = row_stencil(j, n, h, kappa_, t_, nu_, r);
    an = std::max(an, std::abs(st.center) + std::abs(st.west) + std::abs(st.east) +
                          (g.is_strip() ? 2.0 * r : 0.0));
    for (std::size_t k = k0; k < k1; ++k) {
      const std::size_t i = j * col + k;
      double ay = st.center * y[i];
      if (j > 0) ay += st.west * y[i - col];
      if (j < n) ay += st.east * y[i + col];
      if (g.is_strip()) ay += st.south * y[i - 1] + st.north * y[i + 1];
      rn = std::max(rn, std::abs(ay - b[i]));
      yn = std::max(yn, std::abs(y[i]));
      bn = std::max(bn, std::abs(b[i]));
    }
  }
  const double denom = an * yn + bn;
  const double berr = denom > 0.0 ? rn / denom : rn;
  if (!(berr <= kSolveTolerance))
    throw SolverFailure(berr, "linear solve backward error " + std::to_string(berr) +
                                  " above tolerance");
  return Profile(g, std::move(y));
}

BandedSystem ResolventSolver::assemble(const Profile& s) const {
  const Grid& g = s.grid();
  if (!matches(g)) throw InvalidArgument("source grid does not match the factored shape");
  const int n = g.n_x();
  const double h = g.h();
  const double r = g.is_strip() ? (h * h) / (g.h_y() * g.h_y()) : 0.0;
  BandedSystem sys;
  sys.n_x = n;
  sys.n_y = g.is_strip() ? g.n_y() : 0;
  const std::size_t N = sys.unknowns(), col = sys.column();
  for (auto* v : {&sys.diag, &sys.west, &sys.east, &sys.south, &sys.north, &sys.rhs}) v->assign(N, 0.0);
  const std::vector<double> b = scaled_rhs(s);
  for (int j = 0; j <= n; ++j) {
    const Stencil st = row_stencil(j, n, h, kappa_, t_, nu_, r);
    for (std::size_t q = 0; q < col; ++q) {
      const std::size_t row = j * col + q;
      const std::size_t k = g.is_strip() ? q + 1 : 0;
      sys.diag[row] = st.center;
      sys.west[row] = st.west;
      sys.east[row] = st.east;
      if (g.is_strip()) {
        sys.south[row] = q > 0 ? st.south : 0.0;
        sys.north[row] = q + 1 < col ? st.north : 0.0;
      }
      sys.rhs[row] = b[g.index(j, int(k))];
    }
  }
  return sys;
}

// --- NonlocalSolver -----------------------------------------------------------

NonlocalSolver::NonlocalSolver(ModelParams params) : params_(params) { params_.validate(); }

ResolventSolver& NonlocalSolver::lc_solver(const Grid& g) {
  if (!lc_ || !lc_->matches(g)) {
    const double c2 = params_.c * params_.c;
    lc_ = std::make_unique<ResolventSolver>(g, params_.gamma / c2, eigen_nu(params_));
  }
  return *lc_;
}

ResolventSolver& NonlocalSolver::wstar_solver(const Grid& g) {
  if (!ws_ || !ws_->matches(g)) ws_ = std::make_unique<ResolventSolver>(g, 1.0, eigen_nu_star(params_));
  return *ws_;
}

namespace {

void check_dimension(const Grid& g, const ModelParams& p) {
  if (g.dimension() != p.dim) throw InvalidArgument("profile dimension does not match the model");
  if (g.is_strip() && std::abs(g.half_width() - p.solver_half_width()) >
                          1e-12 * std::max(1.0, p.solver_half_width()))
    throw InvalidArgument("strip half width must equal cL");
}

}  // namespace

Profile NonlocalSolver::apply_Lc(const Profile& w) {
  check_dimension(w.grid(), params_);
  const double inv_c2 = 1.0 / (params_.c * params_.c);
  std::vector<double> s = w.copy_samples();
  for (double& x : s) x *= inv_c2;
  return lc_solver(w.grid()).solve(w.with_samples(std::move(s)));
}

Profile NonlocalSolver::wstar_source(const Profile& w, const Profile& v) const {
  if (!(w.grid() == v.grid())) throw InvalidArgument("w and v live on different grids");
  const double dc2 = params_.d * params_.c * params_.c;
  auto ws = w.samples();
  auto vs = v.samples();
  std::vector<double> s(ws.size());
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = dc2 * ws[i] - vs[i] + f_cubic(ws[i], params_.beta);
  return w.with_samples(std::move(s));
}

Profile NonlocalSolver::solve_wstar(const Profile& w, const Profile& v) {
  check_dimension(w.grid(), params_);
  return wstar_solver(w.grid()).solve(wstar_source(w, v));
}

Profile apply_Lc(const Profile& w, const ModelParams& params) {
  NonlocalSolver s(params);
  return s.apply_Lc(w);
}

Profile solve_wstar(const Profile& w, const Profile& v, const ModelParams& params) {
  NonlocalSolver s(params);
  return s.solve_wstar(w, v);
}

BandedSystem assemble_Lc(const Profile& w, const ModelParams& params) {
  NonlocalSolver s(params);
  check_dimension(w.grid(), params);
  const double inv_c2 = 1.0 / (params.c * params.c);
  std::vector<double> src = w.copy_samples();
  for (double& x : src) x *= inv_c2;
  return s.lc_solver(w.grid()).assemble(w.with_samples(std::move(src)));
}

BandedSystem assemble_wstar(const Profile& w, const Profile& v, const ModelParams& params) {
  NonlocalSolver s(params);
  check_dimension(w.grid(), params);
  return s.wstar_solver(w.grid()).assemble(s.wstar_source(w, v));
}

Profile unknowns_to_profile(const Grid& g, std::span<const double> y) {
  std::vector<double> out(g.size(), 0.0);
  if (!g.is_strip()) {
    if (y.size() != out.size()) throw InvalidArgument("unknown vector length mismatch");
    std::copy(y.begin(), y.end(), out.begin());
  } else {
    const std::size_t col = std::size_t(g.n_y()) - 1;
    if (y.size() != (std::size_t(g.n_x()) + 1) * col) throw InvalidArgument("unknown vector length mismatch");
    for (int j = 0; j <= g.n_x(); ++j)
      for (std::size_t q = 0; q < col; ++q) out[g.index(j, int(q) + 1)] = y[j * col + q];
  }
  return Profile(g, std::move(out));
}

}  // namespace fhn
