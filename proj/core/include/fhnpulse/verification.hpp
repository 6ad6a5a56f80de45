#pragma once

#include <string>
#include <vector>

#include "fhnpulse/grid.hpp"
#include "fhnpulse/model.hpp"
#include "fhnpulse/nonlocal.hpp"

namespace fhn {

struct OracleReport {
  std::string name;
  double measured = 0.0;   // residual or error compared against the tolerance
  double tolerance = 0.0;
  bool pass = false;       // measured <= tolerance
  double value = 0.0;      // the raw quantity (an order, a ratio, ...) when it differs from `measured`
  std::string setup;       // grid and parameters used

  static OracleReport make(std::string name, double measured, double tolerance, std::string setup,
                           double value = 0.0);
};

std::string format_report(const OracleReport& r);

// Row-major dense system.
struct DenseSystem {
  std::size_t n = 0;
  std::vector<double> a, b;

  double& at(std::size_t i, std::size_t j) { return a[i * n + j]; }
  double at(std::size_t i, std::size_t j) const { return a[i * n + j]; }
};

inline constexpr std::size_t kMaxDenseUnknowns = 4000;

DenseSystem to_dense(const BandedSystem& sys);

// Gaussian elimination with partial pivoting. Throws NumericalError when singular.
std::vector<double> dense_solve(DenseSystem sys);

// Dense solution of the banded system, as a profile on g.
Profile dense_oracle_solve(const BandedSystem& sys, const Grid& g);

// The resolvent system -(y'' + y' + Delta_y y) + kappa y = s with Robin ends,
// assembled cell by cell from the weighted bilinear form (no shared code with
// the stencil in nonlocal.cpp) and scaled to the same rows.
DenseSystem assemble_resolvent_dense(const Profile& s, double kappa, EigenPair nu);

// Central difference of energy_Jc along phi against dJc_dir. The reported
// measure is the relative error (0 when both sides vanish).
OracleReport fd_gradient_check(const Profile& w, const Profile& phi, const ModelParams& params, double eps,
                               double tolerance = 1e-6);

// |<u1, L_c u2> - <L_c u1, u2>| / (|u1| |u2|) in the weighted L2 product.
OracleReport selfadjoint_residual(const Profile& u1, const Profile& u2, const ModelParams& params,
                                  double tolerance = 1e-6);

enum class ManufacturedCase {
  lc,               // L_c solve against a Gaussian inhibitor profile
  wstar,            // auxiliary solve against a Gaussian
  parabolic_linear  // moving-window scheme on the linearized system, dt = h / c
};

std::string to_string(ManufacturedCase c);

// Max-norm error of one case on spacing h.
double manufactured_error(ManufacturedCase c, double h);

// Least-squares slope of log(error) against log(h).
double fitted_order(const std::vector<double>& hs, const std::vector<double>& errors);

// Passes when the fitted order lies in [2 - band, 2 + band].
OracleReport convergence_order(ManufacturedCase c, const std::vector<double>& hs, double band = 0.1);

// The checks behind the `verify` subcommand (small grids, well under a minute).
std::vector<OracleReport> run_verification_suite();

}  // namespace fhn
