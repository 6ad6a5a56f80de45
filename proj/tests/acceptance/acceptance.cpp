// End-to-end checks against the published wave speeds. Prints one PASS/FAIL
// line per check, then one line per criterion; exits nonzero on any FAIL.

#include <chrono>
#include <cstdarg>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fhnpulse/descent.hpp"
#include "fhnpulse/parabolic.hpp"
#include "fhnpulse/speed_finder.hpp"
#include "fhnpulse/verification.hpp"

using namespace fhn;

namespace {

struct Tally {
  int passed = 0, failed = 0;
};
std::map<int, Tally> g_tally;

void check(int criterion, bool pass, const char* fmt, ...) __attribute__((format(printf, 3, 4)));

void check(int criterion, bool pass, const char* fmt, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, fmt);
  std::vsnprintf(buf, sizeof buf, fmt, ap);
  va_end(ap);
  std::printf("%s  [%d] %s\n", pass ? "PASS" : "FAIL", criterion, buf);
  std::fflush(stdout);
  (pass ? g_tally[criterion].passed : g_tally[criterion].failed)++;
}

void note(const char* fmt, ...) __attribute__((format(printf, 1, 2)));

void note(const char* fmt, ...) {
  va_list ap;
  va_start(ap, fmt);
  std::printf("      ");
  std::vprintf(fmt, ap);
  std::printf("\n");
  va_end(ap);
  std::fflush(stdout);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

ModelParams table1(double d, Dimension dim = Dimension::line) {
  ModelParams p;
  p.d = d;
  p.gamma = 1.0 / 16.0;
  p.beta = 0.25;
  p.dim = dim;
  p.L = 1.0;
  return p;
}

bool within(double value, double target, double rel) { return std::abs(value - target) <= rel * target; }

// --- 1D roots -------------------------------------------------------------------

struct RootCase {
  std::string label;
  double d;
  double target;
  double length;
  double right_end;
};

// The bracket straddles the target by 3%, wider than the 2% acceptance band.
const std::vector<RootCase> kLineRoots = {
    {"d=5e-4 c1", 5e-4, 4.58, 160.0, 40.0},  {"d=5e-4 c0", 5e-4, 14.04, 160.0, 40.0},
    {"d=3e-4 c1", 3e-4, 3.14, 160.0, 40.0},  {"d=3e-4 c0", 3e-4, 19.18, 240.0, 60.0},
    {"d=1e-4 c0", 1e-4, 34.70, 480.0, 120.0},
};

struct LineRoot {
  RootCase rc;
  std::optional<RootResult> root;
};

std::map<std::string, LineRoot> g_roots;

const LineRoot& line_root(const RootCase& rc) {
  if (auto it = g_roots.find(rc.label); it != g_roots.end()) return it->second;
  LineRoot out{rc, std::nullopt};
  const auto t0 = std::chrono::steady_clock::now();
  try {
    GridSpec grid;
    grid.h = 0.01;
    grid.length = rc.length;
    grid.right_end = rc.right_end;
    ScanConfig sc;
    DescentConfig dc;
    out.root = refine_root(0.97 * rc.target, 1.03 * rc.target, table1(rc.d), sc, grid, dc, std::nullopt,
                           std::nullopt, false);
    note("%s: c=%.6f J=%.3e gradient term %.3e, %d J evaluations, %.1f s", rc.label.c_str(), out.root->c_root,
         out.root->J_at_root, out.root->gradient_term, out.root->iterations, seconds_since(t0));
  } catch (const std::exception& e) {
    note("%s: %s", rc.label.c_str(), e.what());
  }
  return g_roots.emplace(rc.label, std::move(out)).first->second;
}

enum class SlowScan { on, off, only };

void criterion1(SlowScan slow) {
  if (slow != SlowScan::only)
    for (const auto& rc : kLineRoots) {
      const LineRoot& r = line_root(rc);
      const bool ok = r.root && r.root->within_tolerance && within(r.root->c_root, rc.target, 0.02);
      check(1, ok, "%s = %.4f, target %.2f +/- 2%%, domain length %.0f", rc.label.c_str(),
            r.root ? r.root->c_root : NAN, rc.target, rc.length);
    }
  if (slow == SlowScan::off) return;

  // No root for d=1e-4 on (0, 5]: J keeps one sign on a continuation scan from c=5.
  const auto t0 = std::chrono::steady_clock::now();
  ScanConfig sc;
  sc.c_start = 5.0;
  sc.c_end = 0.5;
  sc.dc = -0.25;
  sc.adaptive = false;
  GridSpec grid;
  try {
    const SpeedScan s = scan_Jcurve(table1(1e-4), sc, grid, DescentConfig{});
    int converged = 0;
    double minJ = INFINITY;
    for (const auto& x : s.samples)
      if (x.converged) {
        ++converged;
        minJ = std::min(minJ, x.J);
      }
    note("d=1e-4 scan on [0.5, 5]: %zu samples, %d converged, min J %.4e, %.1f s", s.samples.size(), converged,
         minJ, seconds_since(t0));
    for (const auto& [a, b] : s.bracket_speeds()) note("sign change in [%.2f, %.2f]", std::min(a, b), std::max(a, b));
    check(1, s.brackets.empty() && !s.aborted && converged > 0,
          "d=1e-4 has no sign change of J on [0.5, 5] (dc=0.25): %zu brackets", s.brackets.size());
  } catch (const std::exception& e) {
    check(1, false, "d=1e-4 scan on [0.5, 5] failed: %s", e.what());
  }
}

void criterion2() {
  const double targets[3] = {0.79, 0.88, 0.96};
  const RootCase* cases[3] = {&kLineRoots[1], &kLineRoots[3], &kLineRoots[4]};
  double eta[3];
  bool all = true;
  for (int i = 0; i < 3; ++i) {
    const LineRoot& r = line_root(*cases[i]);
    eta[i] = r.root ? eta_ratio(r.root->c_root, table1(cases[i]->d)) : NAN;
    const bool ok = std::abs(eta[i] - targets[i]) <= 0.02;
    all = all && ok;
    check(2, ok, "eta(d=%g) = %.4f, target %.2f +/- 0.02", cases[i]->d, eta[i], targets[i]);
  }
  check(2, eta[0] < eta[1] && eta[1] < eta[2], "eta increases as d decreases: %.4f < %.4f < %.4f", eta[0],
        eta[1], eta[2]);
}

void criterion3() {
  const auto t0 = std::chrono::steady_clock::now();
  ScanConfig sc;
  sc.c_start = 0.5;
  sc.c_end = 20.0;
  sc.dc = 0.1;
  sc.adaptive = false;
  sc.max_failures = 1000;
  GridSpec grid;
  grid.length = 200.0;
  grid.right_end = 50.0;
  try {
    const SpeedScan s = scan_Jcurve(table1(2e-3), sc, grid, DescentConfig{});
    int converged = 0, positive = 0;
    double minJ = INFINITY, argmin = 0.0;
    for (const auto& x : s.samples)
      if (x.converged) {
        ++converged;
        if (x.J > 0.0) ++positive;
        if (x.J < minJ) {
          minJ = x.J;
          argmin = x.c;
        }
      }
    note("d=2e-3 scan: %zu samples, %d converged, min J %.4e at c=%.2f, %.1f s", s.samples.size(), converged,
         minJ, argmin, seconds_since(t0));
    check(3, converged > 0 && positive == converged,
          "d=2e-3: J > 0 at all %d converged samples on [0.5, 20] (dc=0.1)", converged);
  } catch (const std::exception& e) {
    check(3, false, "d=2e-3 scan failed: %s", e.what());
  }
}

void criterion4() {
  for (int which : {1, 0}) {
    const LineRoot& r = line_root(kLineRoots[which]);
    if (!r.root) {
      check(4, false, "%s: no root to test", r.rc.label.c_str());
      continue;
    }
    const auto t0 = std::chrono::steady_clock::now();
    const ModelParams p = table1(r.rc.d).with_c(r.root->c_root);
    const StabilityRun run = run_stability_test(r.root->profile, p, 0.05, 1.0);
    const StabilityReport& R = run.report;
    note("%s: %ld steps, distance %.4f, sup deviation %.4e (%.3f%% of max u), final max %.4f, %.1f s",
         r.rc.label.c_str(), run.steps, R.distance_propagated, R.sup_deviation,
         100.0 * R.sup_deviation / R.initial_max, R.final_max, seconds_since(t0));
    if (which == 1)
      check(4, R.verdict == Verdict::stable && R.sup_deviation <= 0.05 * R.initial_max,
            "c0 pulse propagates one domain length: verdict %s, sup deviation %.3f%% of max u (<= 5%%)",
            to_string(R.verdict).c_str(), 100.0 * R.sup_deviation / R.initial_max);
    else
      check(4, R.verdict == Verdict::unstable && R.collapsed, "c1 pulse collapses: verdict %s",
            to_string(R.verdict).c_str());
  }
}

// --- 2D --------------------------------------------------------------------------

struct StripGrid {
  double h;
  double length;
  double right_end;
  int n_y;
};

RootResult strip_root(double d, double lo, double hi, const StripGrid& sg) {
  GridSpec grid;
  grid.h = sg.h;
  grid.length = sg.length;
  grid.right_end = sg.right_end;
  grid.n_y = sg.n_y;
  ScanConfig sc;
  return refine_root(lo, hi, table1(d, Dimension::strip), sc, grid, DescentConfig::strip_defaults(), std::nullopt,
                     std::nullopt, false);
}

void criterion5(bool full) {
  const StripGrid sg = full ? StripGrid{0.05, 280.0, 40.0, 80} : StripGrid{0.1, 280.0, 40.0, 40};
  const double band = full ? 0.03 : 0.05;
  note("strip grid %dx%d on length %.0f", int(std::lround(sg.length / sg.h)), sg.n_y, sg.length);
  struct Case {
    double d, target;
  };
  for (const Case& c : {Case{5e-4, 13.74}, Case{7e-4, 10.54}}) {
    const auto t0 = std::chrono::steady_clock::now();
    try {
      const RootResult r = strip_root(c.d, (1.0 - band) * c.target, (1.0 + band) * c.target, sg);
      note("2D d=%g: c=%.5f J=%.3e, %d J evaluations, %.1f s", c.d, r.c_root, r.J_at_root, r.iterations,
           seconds_since(t0));
      check(5, within(r.c_root, c.target, band), "2D d=%g c0 = %.4f, target %.2f +/- %.0f%%", c.d, r.c_root,
            c.target, 100 * band);
    } catch (const std::exception& e) {
      check(5, false, "2D d=%g: no root bracketed in [%.2f, %.2f]: %s", c.d, (1.0 - band) * c.target,
            (1.0 + band) * c.target, e.what());
    }
  }

  const auto t0 = std::chrono::steady_clock::now();
  ScanConfig sc;
  sc.c_start = 12.0;
  sc.c_end = 4.0;
  sc.dc = -0.5;
  sc.adaptive = false;
  GridSpec grid;
  grid.h = sg.h;
  grid.length = sg.length;
  grid.right_end = sg.right_end;
  grid.n_y = sg.n_y;
  try {
    const SpeedScan s = scan_Jcurve(table1(9e-4, Dimension::strip), sc, grid, DescentConfig::strip_defaults());
    int converged = 0, positive = 0;
    double minJ = INFINITY;
    for (const auto& x : s.samples)
      if (x.converged) {
        ++converged;
        positive += x.J > 0.0;
        minJ = std::min(minJ, x.J);
      }
    note("2D d=9e-4 scan on [4, 12]: %d converged of %zu, min J %.4e, %.1f s", converged, s.samples.size(), minJ,
         seconds_since(t0));
    check(5, converged > 0 && positive == converged && s.brackets.empty(),
          "2D d=9e-4: J > 0 at all %d converged samples on [4, 12]", converged);
  } catch (const std::exception& e) {
    check(5, false, "2D d=9e-4 scan failed: %s", e.what());
  }
}

// Minimum-energy J curve for d = 8.8e-4 on a 2000 x 80 strip grid: downward
// continuation from c = 8, then upward continuation from the first two-component
// minimizer; at each speed the lower J wins. Roots below the branch switch are
// then re-bracketed on the 4000 x 160 grid, warm-started from the resampled
// coarse minimizers.
struct CurvePoint {
  double J = 0.0;
  int components = 0;
  Profile w;
};

void criterion6() {
  const double targets[4] = {7.41, 6.69, 5.18, 2.42};
  const ModelParams p = table1(8.8e-4, Dimension::strip);
  const auto t0 = std::chrono::steady_clock::now();
  GridSpec coarse;
  coarse.h = 0.025;
  coarse.length = 50.0;
  coarse.right_end = 15.0;
  coarse.n_y = 80;
  const double fine_h = 0.0125;
  const int fine_ny = 160;

  std::map<long, CurvePoint> curve;  // keyed by round(10 c)
  auto key = [](double c) { return std::lround(10.0 * c); };
  auto keep_lower = [&](ScanSample& x, const Profile& w) {
    if (!x.converged) return;
    auto it = curve.find(key(x.c));
    if (it == curve.end() || x.J < it->second.J)
      curve.insert_or_assign(key(x.c), CurvePoint{x.J, level_components(w, 0.1 * w.max()), w});
  };

  ScanConfig sc;
  sc.c_start = 8.0;
  sc.c_end = 2.0;
  sc.dc = -0.1;
  sc.adaptive = false;
  sc.max_failures = 1000;
  std::optional<double> first_split;
  std::optional<Profile> split_profile;
  try {
    scan_Jcurve(p, sc, coarse, DescentConfig::strip_defaults(), std::nullopt, [&](ScanSample& x, const Profile& w) {
      if (x.converged && !first_split && level_components(w, 0.1 * w.max()) == 2) {
        first_split = x.c;
        split_profile = w;
      }
      keep_lower(x, w);
    });
    note("downward sweep: %zu speeds, first two-component minimizer at c = %.2f, %.1f s", curve.size(),
         first_split.value_or(NAN), seconds_since(t0));
    if (first_split) {
      ScanConfig up = sc;
      up.c_start = *first_split;
      up.c_end = 8.0;
      up.dc = 0.1;
      scan_Jcurve(p, up, coarse, DescentConfig::strip_defaults(), split_profile, keep_lower);
      note("upward sweep done, %.1f s", seconds_since(t0));
    }
  } catch (const std::exception& e) {
    check(6, false, "d=8.8e-4 strip sweep failed: %s", e.what());
    return;
  }

  std::vector<std::pair<double, double>> brackets;  // (lo, hi) on the 2000 x 80 curve
  double switch_c = NAN;
  for (auto it = curve.begin(); std::next(it) != curve.end(); ++it) {
    const auto nx = std::next(it);
    if ((it->second.J < 0.0) != (nx->second.J < 0.0)) brackets.emplace_back(it->first / 10.0, nx->first / 10.0);
    if (it->second.components == 2 && nx->second.components == 1) switch_c = 0.5 * (it->first + nx->first) / 10.0;
  }
  for (const auto& [lo, hi] : brackets) note("2000x80 bracket [%.2f, %.2f]", lo, hi);
  note("minimum-energy branch switch near c = %.2f", switch_c);
  check(6, brackets.size() == 4, "four sign changes of the minimum-energy J on [2, 8]: found %zu", brackets.size());

  int above_bad = 0, below_bad = 0, above = 0, below = 0;
  for (const auto& [k, pt] : curve) {
    const double c = k / 10.0;
    if (c > 6.3) {
      ++above;
      above_bad += pt.components != 1;
    } else if (c < 5.9) {
      ++below;
      below_bad += pt.components != 2;
    }
  }
  check(6, above > 0 && above_bad == 0, "single component above c = 6.1 (%d of %d samples differ)", above_bad,
        above);
  check(6, below > 0 && below_bad == 0, "two components below c = 6.1 (%d of %d samples differ)", below_bad,
        below);

  // Re-bracket the two-component roots on the finer grid.
  std::vector<std::pair<double, double>> accepted;
  for (const auto& [lo, hi] : brackets) {
    if (!(hi < 6.1)) {
      accepted.emplace_back(lo, hi);
      continue;
    }
    const auto t1 = std::chrono::steady_clock::now();
    const double top = std::min(hi + 0.4, 6.0), bottom = lo - 0.4;
    const auto seed = curve.find(key(top));
    if (seed == curve.end()) {
      check(6, false, "no coarse minimizer at c = %.1f to seed the fine window", top);
      continue;
    }
    const Grid& g = seed->second.w.grid();
    const Grid fine = Grid::strip(g.origin(), fine_h, int(std::lround(g.length() / fine_h)), g.half_width(), fine_ny);
    ScanConfig fw = sc;
    fw.c_start = top;
    fw.c_end = bottom;
    try {
      const SpeedScan s = scan_Jcurve(p, fw, GridSpec{}, DescentConfig::strip_defaults(),
                                      resample(seed->second.w, fine));
      for (const auto& [a, b] : s.bracket_speeds()) {
        accepted.emplace_back(std::min(a, b), std::max(a, b));
        note("4000x160 bracket [%.2f, %.2f] (2000x80: [%.2f, %.2f]), %.1f s", std::min(a, b), std::max(a, b), lo, hi,
             seconds_since(t1));
      }
      if (s.brackets.empty()) note("4000x160 window [%.1f, %.1f]: no sign change", bottom, top);
    } catch (const std::exception& e) {
      check(6, false, "fine window [%.1f, %.1f] failed: %s", bottom, top, e.what());
    }
  }
  for (double t : targets) {
    bool hit = false;
    for (const auto& [lo, hi] : accepted) hit = hit || (hi >= 0.95 * t && lo <= 1.05 * t);
    check(6, hit, "bracket within 5%% of c = %.2f", t);
  }
  note("d=8.8e-4 total %.1f s", seconds_since(t0));
}

// --- property suite --------------------------------------------------------------------

void criterion7() {
  const auto t0 = std::chrono::steady_clock::now();

  {  // shift scaling
    std::mt19937 rng(7);
    std::normal_distribution<double> N;
    std::uniform_real_distribution<double> off(-30.0, 30.0);
    Grid g = Grid::line(-80.0, 0.01, 16000);
    std::vector<double> s(g.size());
    for (double& x : s) x = N(rng);
    const Profile p(g, s);
    const double n0 = norm_h1exp_sq(p);
    double worst = 0.0;
    for (int t = 0; t < 50; ++t) {
      const double a = off(rng);
      const double n1 = norm_h1exp_sq(shift_grid(p, a)), ref = std::exp(a) * n0;
      worst = std::max(worst, std::abs(n1 - ref) / (std::numeric_limits<double>::epsilon() * ref));
    }
    check(7, worst <= 8.0, "shift scaling |norm(s_a w) - e^a norm(w)|: %.2f ulp (<= 8)", worst);
  }

  {  // manifold + monotone over 100 steps
    const ModelParams p = table1(5e-4).with_c(5.0);
    NonlocalSolver solver(p);
    const DescentConfig cfg;
    DescentState s = make_state(initial_guess(make_line_grid(0.01, 160.0, 40.0)), solver, cfg);
    double worst = std::abs(norm_h1exp_sq(s.w) - 2.0);
    bool monotone = true;
    int accepted = 0;
    for (int it = 0; it < 100; ++it) {
      StepResult r = descent_step(s, solver, cfg);
      if (!r.accepted) break;
      ++accepted;
      monotone = monotone && r.state.J.total <= s.J.total;
      worst = std::max(worst, std::abs(norm_h1exp_sq(r.state.w) - 2.0));
      s = std::move(r.state);
    }
    check(7, accepted == 100 && worst <= 1e-10, "manifold over %d accepted steps: max |norm^2 - 2| = %.2e (<= 1e-10)",
          accepted, worst);
    check(7, monotone, "J non-increasing over accepted steps");
  }

  {  // ordering in d
    const double c = 5.0, d1 = 3e-4, d2 = 5e-4;
    const Grid g = make_line_grid(0.02, 80.0, 20.0);
    const MinimizeResult r1 = minimize(initial_guess(g), table1(d1).with_c(c), DescentConfig{});
    const MinimizeResult r2 = minimize(initial_guess(g), table1(d2).with_c(c), DescentConfig{});
    const double eps = 1e-6 * c * c;
    check(7, r1.converged && r2.converged && r1.J() <= r2.J() + eps && r2.J() <= r1.J() + (d2 - d1) * c * c + eps,
          "ordering in d at c=5: J(3e-4)=%.6e <= J(5e-4)=%.6e <= J(3e-4) + %.1e", r1.J(), r2.J(),
          (d2 - d1) * c * c);
  }

  for (const OracleReport& r : run_verification_suite()) check(7, r.pass, "%s", format_report(r).substr(5).c_str());

  {  // regula falsi on affine functions
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> U(-5.0, 5.0);
    double worst = 0.0;
    bool single = true;
    for (int t = 0; t < 100; ++t) {
      const double slope = U(rng) + (U(rng) > 0 ? 6.0 : -6.0), root = U(rng);
      auto f = [&](double x) { return slope * (x - root); };
      const double a = root - 1.0 - std::abs(U(rng)), b = root + 1.0 + std::abs(U(rng));
      const FalsiResult r = regula_falsi(f, a, f(a), b, f(b), 1e-12, 1e-14, 50);
      worst = std::max(worst, std::abs(r.x - root));
      single = single && r.evaluations == 1;
    }
    check(7, worst <= 1e-13 && single, "regula falsi on 100 affine functions: one step, max error %.1e", worst);
  }

  const double elapsed = seconds_since(t0);
  check(7, elapsed < 60.0, "property suite runtime %.1f s (< 60 s)", elapsed);
}

void criterion8() {
  for (const auto& rc : kLineRoots) {
    const LineRoot& r = line_root(rc);
    if (!r.root) {
      check(8, false, "%s: no root minimizer", rc.label.c_str());
      continue;
    }
    const Profile& w = r.root->profile;
    const double m = w.max();
    const int changes = sign_changes(w);
    check(8, m > 0.8 && m < 1.05 && changes == 2, "%s minimizer: max w = %.4f in (0.8, 1.05), %d sign changes",
          rc.label.c_str(), m, changes);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance checks for the FitzHugh-Nagumo pulse solver"};
  std::vector<int> criteria;
  bool full_2d = false;
  SlowScan slow = SlowScan::on;
  app.add_option("-c,--criterion", criteria, "Criteria to run (default: all)")->check(CLI::Range(1, 8));
  app.add_flag("--full-2d", full_2d, "Use the published 5600x80 strip grid instead of the reduced one");
  app.add_option("--slow-scan", slow, "d=1e-4 scan on [0.5, 5] in criterion 1: on, off or only")
      ->transform(CLI::CheckedTransformer(
          std::map<std::string, SlowScan>{{"on", SlowScan::on}, {"off", SlowScan::off}, {"only", SlowScan::only}}));
  CLI11_PARSE(app, argc, argv);
  if (criteria.empty()) criteria = {1, 2, 3, 4, 5, 6, 7, 8};
  const std::set<int> run(criteria.begin(), criteria.end());

  const std::map<int, std::function<void()>> table = {
      {1, [&] { criterion1(slow); }}, {2, criterion2},       {3, criterion3}, {4, criterion4},
      {5, [&] { criterion5(full_2d); }}, {6, criterion6}, {7, criterion7}, {8, criterion8},
  };
  for (int c : run) {
    const auto t0 = std::chrono::steady_clock::now();
    try {
      table.at(c)();
    } catch (const std::exception& e) {
      check(c, false, "criterion aborted: %s", e.what());
    }
    note("criterion %d: %.1f s", c, seconds_since(t0));
  }

  std::printf("\n");
  bool ok = true;
  for (int c : run) {
    const Tally& t = g_tally[c];
    const bool pass = t.failed == 0 && t.passed > 0;
    ok = ok && pass;
    std::printf("%s  criterion %d (%d checks passed, %d failed)\n", pass ? "PASS" : "FAIL", c, t.passed, t.failed);
  }
  return ok ? 0 : 1;
}
