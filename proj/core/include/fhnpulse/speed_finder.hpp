#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "fhnpulse/descent.hpp"

namespace fhn {

// Where the computational window sits for cold starts. The starting plateau is
// centred at 0, so right_end is the margin ahead of the pulse.
struct GridSpec {
  double h = 0.01;
  double length = 160.0;
  double right_end = 40.0;
  int n_y = 0;  // strips only

  Grid make(const ModelParams& params) const;
};

struct ScanConfig {
  double c_start = 4.0;
  double c_end = 5.0;
  double dc = 0.05;
  bool adaptive = true;     // refine locally when J jumps
  double refine_dc = 0.01;  // spacing used by the refinement
  double jump_factor = 5.0;
  int max_failures = 3;     // consecutive unconverged samples that abort a scan
  double tol_c = 1e-3;
  double tol_J_rel = 1e-6;  // root tolerance relative to the gradient term
  int max_root_iters = 60;
  int stagnation_limit = 10;
  GuessKind guess = GuessKind::smooth;

  void validate() const;
};

struct ScanSample {
  double c = 0.0;
  double J = 0.0;
  double gradient_term = 0.0;
  bool converged = false;
  long iters = 0;
  bool jump = false;         // |dJ| exceeded jump_factor x running median
  bool refinement = false;   // inserted by adaptive refinement
  std::string checkpoint;    // path, when the caller saved one
  std::optional<Profile> profile;  // kept only at bracket endpoints
};

struct Bracket {
  std::size_t lo, hi;  // indices into SpeedScan::samples, ordered by c
};

struct SpeedScan {
  std::vector<ScanSample> samples;  // ordered by c
  std::vector<Bracket> brackets;
  int direction = 1;
  bool aborted = false;
  double lipschitz = 0.0;  // max |J(c+dc) - J(c)| / |dc| observed

  std::vector<std::pair<double, double>> bracket_speeds() const;
};

struct RootResult {
  double c_root = 0.0;
  double J_at_root = 0.0;
  double gradient_term = 0.0;
  double tol_J = 0.0;
  bool within_tolerance = false;
  Profile profile;
  int iterations = 0;        // J evaluations
  long descent_iters = 0;    // summed over evaluations
  std::optional<double> cold_J;  // J from a cold start at c_root
  bool cold_verified = false;
};

// Called after every minimize with the profile, so callers can checkpoint.
using SampleCallback = std::function<void(ScanSample&, const Profile&)>;

// One J(c) evaluation: minimize at c, warm-started from `warm` when given
// (rescaled to the new strip width), cold otherwise.
MinimizeResult evaluate_J(const ModelParams& params, double c, const std::optional<Profile>& warm,
                          const GridSpec& grid, const DescentConfig& cfg, GuessKind guess = GuessKind::smooth);

// Transfers a strip profile to the width of speed c by mapping y indices one-to-one.
Profile transfer_to_speed(const Profile& w, const ModelParams& params, double c);

SpeedScan scan_Jcurve(const ModelParams& params, const ScanConfig& scan, const GridSpec& grid,
                      const DescentConfig& cfg, const std::optional<Profile>& warm = std::nullopt,
                      const SampleCallback& on_sample = {});

// Result of a scalar regula falsi run.
struct FalsiResult {
  double x = 0.0;
  double fx = 0.0;
  int evaluations = 0;
  bool converged = false;
  int bisections = 0;
};

// Regula falsi on f over [a, b] with f(a) f(b) < 0. Stops when |f| <= tol_f
// (or `accept(x, f(x))` when given) or the bracket is narrower than tol_x.
// After `stagnation_limit` consecutive updates of the same endpoint that fail
// to halve the bracket, one bisection step is taken.
FalsiResult regula_falsi(const std::function<double(double)>& f, double a, double fa, double b,
                         double fb, double tol_f, double tol_x, int max_iter, int stagnation_limit = 10,
                         const std::function<bool(double, double)>& accept = {});

// Root of J between the endpoints of a scan bracket.
RootResult refine_root(const SpeedScan& scan, const Bracket& bracket, const ModelParams& params,
                       const ScanConfig& cfg, const GridSpec& grid, const DescentConfig& dcfg,
                       bool verify_cold_start = true);

// Same, from explicit endpoints and (optional) warm profiles.
RootResult refine_root(double c_lo, double c_hi, const ModelParams& params, const ScanConfig& cfg,
                       const GridSpec& grid, const DescentConfig& dcfg,
                       const std::optional<Profile>& warm_lo = std::nullopt,
                       const std::optional<Profile>& warm_hi = std::nullopt,
                       bool verify_cold_start = true);

// eta = 2 d c0^2 / (1 - 2 beta)^2.
double eta_ratio(double c0, const ModelParams& params);

}  // namespace fhn
