#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "fhnpulse/grid.hpp"
#include "fhnpulse/model.hpp"

namespace fhn {

namespace detail {
class ColumnSineTransform;
}

// Normwise backward error accepted for every linear solve.
inline constexpr double kSolveTolerance = 1e-10;

// Assembled five-point system (three-point for a line). Unknowns are all grid
// points except the Dirichlet rows of a strip, ordered x-major.
// Row r reads: diag[r] y_r + west[r] y_{r-x} + east[r] y_{r+x}
//                          + south[r] y_{r-y} + north[r] y_{r+y} = rhs[r].
struct BandedSystem {
  int n_x = 0;
  int n_y = 0;  // 0 for a line
  std::vector<double> diag, west, east, south, north, rhs;

  std::size_t column() const noexcept { return n_y > 0 ? std::size_t(n_y) - 1 : 1; }
  std::size_t unknowns() const noexcept { return (std::size_t(n_x) + 1) * column(); }

  std::vector<double> apply(std::span<const double> y) const;
  double norm_inf() const;
  // Normwise backward error |Ay - b| / (|A| |y| + |b|), infinity norms.
  double backward_error(std::span<const double> y) const;
  bool diagonally_dominant() const;
};

// Solver for  -(y'' + y' + Delta_y y) + kappa y = s  with the asymptotic Robin
// closures  y' - nu2 y = s/nu1 at the left end, y' - nu1 y = s/nu2 at the right
// end, and y = 0 on the strip edges.
//
// The stencil is the weak form of the operator in the exponentially weighted
// product, divided by the nodal quadrature weight. This makes the discrete
// operator self-adjoint in the same quadrature used by the energy.
// Lines use a tridiagonal LU; strips diagonalize the y-direction with a sine
// transform and solve one tridiagonal system per transverse mode.
class ResolventSolver {
public:
  ResolventSolver(const Grid& shape, double kappa, EigenPair nu);
  ~ResolventSolver();
  ResolventSolver(const ResolventSolver&) = delete;
  ResolventSolver& operator=(const ResolventSolver&) = delete;

  // Solution on s.grid(); s must match the factored shape.
  Profile solve(const Profile& s) const;

  BandedSystem assemble(const Profile& s) const;

  bool matches(const Grid& g) const noexcept { return shape_.same_shape(g); }
  double kappa() const noexcept { return kappa_; }
  EigenPair nu() const noexcept { return nu_; }

private:
  std::vector<double> scaled_rhs(const Profile& s) const;

  Grid shape_;
  double kappa_;
  EigenPair nu_;
  double t_;  // tanh(h/2)
  int modes_;
  std::vector<double> cp_, inv_;  // LU factors, per (x-node, mode)
  std::unique_ptr<detail::ColumnSineTransform> plan_;
};

// Per-c solver pair. Factorizations are cached and reused while the grid
// shape stays the same (shifting the origin does not invalidate them).
// Not safe for concurrent use; give each thread its own instance.
class NonlocalSolver {
public:
  explicit NonlocalSolver(ModelParams params);

  const ModelParams& params() const noexcept { return params_; }

  // v = L_c w:  c^2 (Delta v + v_x) - gamma v = -w.
  Profile apply_Lc(const Profile& w);

  // -Delta w* - w*_x + w* = d c^2 w - v + f(w).
  Profile solve_wstar(const Profile& w, const Profile& v);

  // The right-hand side of the auxiliary equation.
  Profile wstar_source(const Profile& w, const Profile& v) const;

  ResolventSolver& lc_solver(const Grid& g);
  ResolventSolver& wstar_solver(const Grid& g);

private:
  ModelParams params_;
  std::unique_ptr<ResolventSolver> lc_, ws_;
};

Profile apply_Lc(const Profile& w, const ModelParams& params);
Profile solve_wstar(const Profile& w, const Profile& v, const ModelParams& params);

// Assembled systems for the two solves (the oracle in verification solves these densely).
BandedSystem assemble_Lc(const Profile& w, const ModelParams& params);
BandedSystem assemble_wstar(const Profile& w, const Profile& v, const ModelParams& params);

// Profile from an unknown vector in BandedSystem ordering.
Profile unknowns_to_profile(const Grid& g, std::span<const double> y);

}  // namespace fhn
