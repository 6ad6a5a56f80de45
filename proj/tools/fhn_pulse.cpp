// fhn_pulse: command-line front end for the traveling-pulse solver.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>

#include "fhnpulse/descent.hpp"
#include "fhnpulse/errors.hpp"
#include "fhnpulse/io.hpp"
#include "fhnpulse/parabolic.hpp"
#include "fhnpulse/speed_finder.hpp"
#include "fhnpulse/verification.hpp"

namespace fs = std::filesystem;
using namespace fhn;

namespace {

enum Exit { kOk = 0, kFailure = 1, kValidation = 2, kNumerical = 3 };

struct Overrides {
  std::string config;
  std::optional<double> d, gamma, beta, L, h, length, right_end;
  std::optional<int> dim, n_y;
  std::optional<std::string> out_dir;
  bool quiet = false;

  void attach(CLI::App* app) {
    app->add_option("--config", config, "INI configuration file");
    app->add_option("--d", d, "diffusion ratio d");
    app->add_option("--gamma", gamma, "inhibitor decay gamma");
    app->add_option("--beta", beta, "threshold beta");
    app->add_option("--L", L, "strip half-width (dim 2)");
    app->add_option("--dim", dim, "1 = line, 2 = strip");
    app->add_option("--h", h, "grid spacing in the co-moving variable");
    app->add_option("--length", length, "domain length");
    app->add_option("--right-end", right_end, "right endpoint of a cold-start grid");
    app->add_option("--n-y", n_y, "transverse intervals (dim 2)");
    app->add_option("--out", out_dir, "output directory");
    app->add_flag("--quiet", quiet, "no progress output on stderr");
  }

  // Config file (or built-in defaults beta = 1/4, gamma = 1/16), then flags.
  RunConfig resolve() const {
    RunConfig cfg;
    if (!config.empty()) {
      cfg = load_config(config);
    } else {
      cfg.model.beta = 0.25;
      cfg.model.gamma = 1.0 / 16.0;
    }
    if (dim && *dim != int(cfg.model.dim)) {
      if (*dim != 1 && *dim != 2) throw ValidationError("dim", "dim must be 1 or 2");
      cfg.model.dim = *dim == 2 ? Dimension::strip : Dimension::line;
      if (config.empty() && *dim == 2) {
        cfg.descent = DescentConfig::strip_defaults();
        cfg.stability.threshold = 0.10;
        cfg.grid.h = 0.05;
        cfg.grid.length = 280.0;
        cfg.grid.n_y = 80;
      }
    }
    if (d) cfg.model.d = *d;
    if (gamma) cfg.model.gamma = *gamma;
    if (beta) cfg.model.beta = *beta;
    if (L) cfg.model.L = *L;
    if (h) cfg.grid.h = *h;
    if (length) cfg.grid.length = *length;
    if (right_end) cfg.grid.right_end = *right_end;
    if (n_y) cfg.grid.n_y = *n_y;
    if (out_dir) cfg.paths.output_dir = *out_dir;
    cfg.validate();
    return cfg;
  }
};

fs::path output_dir(const RunConfig& cfg) {
  fs::path p = cfg.paths.output_dir.empty() ? fs::path(".") : fs::path(cfg.paths.output_dir);
  fs::create_directories(p);
  return p;
}

std::string speed_tag(double c) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(6) << c;
  return os.str();
}

void write_profile(const fs::path& path, const Profile& p) {
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot write " + path.string());
  write_profile_csv(out, p);
}

CheckpointMeta meta_for(const ModelParams& p, double c, double J) {
  return CheckpointMeta{c, p.d, p.gamma, p.beta, J};
}

int run_minimize(const Overrides& o, double c, const std::string& warm_path, const std::string& guess) {
  RunConfig cfg = o.resolve();
  ModelParams p = cfg.model.with_c(c);
  p.validate();
  std::optional<Profile> warm;
  if (!warm_path.empty()) warm = load_checkpoint(warm_path).profile;
  const GuessKind kind = guess == "square" ? GuessKind::square : GuessKind::smooth;
  TraceCallback trace;
  if (!o.quiet)
    trace = [](const TraceRecord& t) {
      if (t.iter % 1000 == 0)
        std::cerr << "iter " << t.iter << "  J = " << std::setprecision(10) << t.J.total << "  alpha1 = "
                  << t.alpha1 << '\n';
    };
  Profile w0 = warm ? transfer_to_speed(*warm, cfg.model, c) : initial_guess(cfg.grid.make(p), kind);
  MinimizeResult r = minimize(w0, p, cfg.descent, trace);

  const fs::path dir = output_dir(cfg);
  const std::string tag = "minimizer_c" + speed_tag(c);
  write_profile(dir / (tag + ".csv"), r.w);
  save_checkpoint((dir / (tag + ".ckpt")).string(), r.w, meta_for(p, c, r.J()));
  std::cout << std::setprecision(17) << "c = " << c << "\nJ = " << r.J() << "\ngradient_term = "
            << r.energy.gradient_term << "\niterations = " << r.iters << "\nstop = " << to_string(r.reason)
            << "\nmax_w = " << r.w.max() << "\nsign_changes = " << sign_changes(r.w) << '\n';
  return r.converged ? kOk : kNumerical;
}

SampleCallback progress(bool quiet) {
  if (quiet) return {};
  return [](ScanSample& s, const Profile&) {
    std::cerr << "c = " << std::setprecision(8) << s.c << "  J = " << std::setprecision(6) << s.J
              << (s.converged ? "" : "  (not converged)") << '\n';
  };
}

int run_scan(const Overrides& o, std::optional<double> c0, std::optional<double> c1, std::optional<double> dc) {
  RunConfig cfg = o.resolve();
  if (c0) cfg.scan.c_start = *c0;
  if (c1) cfg.scan.c_end = *c1;
  if (dc) cfg.scan.dc = *dc;
  cfg.scan.validate();
  SpeedScan scan = scan_Jcurve(cfg.model, cfg.scan, cfg.grid, cfg.descent, std::nullopt, progress(o.quiet));
  const fs::path dir = output_dir(cfg);
  {
    std::ofstream out(dir / "scan.csv");
    write_scan_csv(out, scan);
  }
  write_text_file((dir / "scan.json").string(), to_json(scan));
  for (const auto& [lo, hi] : scan.bracket_speeds()) std::cout << "bracket " << lo << " " << hi << '\n';
  std::cout << "samples " << scan.samples.size() << (scan.aborted ? " (aborted)" : "") << '\n';
  return scan.aborted ? kNumerical : kOk;
}

int run_find_speed(const Overrides& o, std::optional<double> c0, std::optional<double> c1,
                   std::optional<double> dc, std::optional<double> lo, std::optional<double> hi, bool cold) {
  RunConfig cfg = o.resolve();
  if (c0) cfg.scan.c_start = *c0;
  if (c1) cfg.scan.c_end = *c1;
  if (dc) cfg.scan.dc = *dc;
  cfg.scan.validate();
  const fs::path dir = output_dir(cfg);
  std::vector<RootResult> roots;
  if (lo && hi) {
    roots.push_back(refine_root(*lo, *hi, cfg.model, cfg.scan, cfg.grid, cfg.descent, std::nullopt, std::nullopt,
                                cold));
  } else {
    SpeedScan scan = scan_Jcurve(cfg.model, cfg.scan, cfg.grid, cfg.descent, std::nullopt, progress(o.quiet));
    {
      std::ofstream out(dir / "scan.csv");
      write_scan_csv(out, scan);
    }
    for (const Bracket& b : scan.brackets)
      roots.push_back(refine_root(scan, b, cfg.model, cfg.scan, cfg.grid, cfg.descent, cold));
    if (roots.empty()) std::cout << "no sign change of J on the scanned range\n";
  }
  int rc = kOk;
  for (const RootResult& r : roots) {
    const ModelParams p = cfg.model.with_c(r.c_root);
    const std::string tag = "root_c" + speed_tag(r.c_root);
    write_text_file((dir / (tag + ".json")).string(), to_json(r, p));
    write_profile(dir / (tag + ".csv"), r.profile);
    save_checkpoint((dir / (tag + ".ckpt")).string(), r.profile, meta_for(p, r.c_root, r.J_at_root));
    std::cout << std::setprecision(10) << "root c = " << r.c_root << "  J = " << std::setprecision(3)
              << r.J_at_root << "  eta = " << std::setprecision(4) << eta_ratio(r.c_root, cfg.model)
              << (r.within_tolerance ? "" : "  (tolerance not reached)") << '\n';
    if (!r.within_tolerance) rc = kNumerical;
  }
  return rc;
}

int run_stability(const Overrides& o, const std::string& ckpt, std::optional<double> threshold,
                  std::optional<double> lengths) {
  Checkpoint cp = load_checkpoint(ckpt);
  Overrides oo = o;
  if (!oo.beta) oo.beta = cp.meta.beta;
  if (!oo.gamma) oo.gamma = cp.meta.gamma;
  oo.d = reconcile_d(cp.meta, o.d, &std::cerr);
  if (!oo.dim) oo.dim = int(cp.profile.grid().dimension());
  if (cp.profile.grid().is_strip() && !oo.L) oo.L = cp.profile.grid().half_width() / cp.meta.c;
  RunConfig cfg = oo.resolve();
  if (threshold) cfg.stability.threshold = *threshold;
  if (lengths) cfg.stability.lengths = *lengths;
  cfg.validate();
  const ModelParams p = cfg.model.with_c(cp.meta.c);
  StabilityRun run = run_stability_test(cp.profile, p, cfg.stability.threshold, cfg.stability.lengths);
  const fs::path dir = output_dir(cfg);
  write_profile(dir / "stability_initial.csv", run.initial.u);
  write_profile(dir / "stability_final.csv", run.final.u);
  write_text_file((dir / "stability.json").string(), to_json(run.report));
  std::cout << to_json(run.report) << '\n';
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Traveling pulses of the FitzHugh-Nagumo system by constrained energy minimization"};
  app.require_subcommand(1);
  app.set_help_flag("--help", "print this help and exit");  // -h is taken by the grid spacing

  Overrides ov;
  double c = 0.0;
  std::string warm, guess = "smooth", ckpt;
  std::optional<double> c0, c1, dc, lo, hi, threshold, lengths, c_fast;
  bool no_cold = false;

  auto* mn = app.add_subcommand("minimize", "minimize J_c at one speed");
  ov.attach(mn);
  mn->add_option("--c", c, "wave speed")->required();
  mn->add_option("--warm", warm, "checkpoint to start from");
  mn->add_option("--guess", guess, "cold start: smooth or square")->check(CLI::IsMember({"smooth", "square"}));

  auto* sc = app.add_subcommand("scan", "sample J(c) on a range of speeds");
  ov.attach(sc);
  sc->add_option("--c-start", c0);
  sc->add_option("--c-end", c1);
  sc->add_option("--dc", dc);

  auto* fsp = app.add_subcommand("find-speed", "scan and refine every sign change of J(c)");
  ov.attach(fsp);
  fsp->add_option("--c-start", c0);
  fsp->add_option("--c-end", c1);
  fsp->add_option("--dc", dc);
  fsp->add_option("--lo", lo, "skip the scan and refine on [lo, hi]");
  fsp->add_option("--hi", hi);
  fsp->add_flag("--no-cold-check", no_cold, "skip the cold-start verification at the root");

  auto* st = app.add_subcommand("stability", "propagate a checkpointed pulse in the time-dependent system");
  ov.attach(st);
  st->add_option("--checkpoint", ckpt)->required();
  st->add_option("--threshold", threshold, "relative sup deviation for a stable verdict");
  st->add_option("--lengths", lengths, "domain lengths to propagate");

  auto* et = app.add_subcommand("eta", "print 2 d c0^2 / (1 - 2 beta)^2");
  ov.attach(et);
  et->add_option("--c0", c_fast, "fastest speed")->required();

  auto* vf = app.add_subcommand("verify", "run the oracle checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kValidation;
  }

  try {
    if (*mn) return run_minimize(ov, c, warm, guess);
    if (*sc) return run_scan(ov, c0, c1, dc);
    if (*fsp) {
      if (lo.has_value() != hi.has_value()) throw ValidationError("lo", "--lo and --hi go together");
      return run_find_speed(ov, c0, c1, dc, lo, hi, !no_cold);
    }
    if (*st) return run_stability(ov, ckpt, threshold, lengths);
    if (*et) {
      RunConfig cfg = ov.resolve();
      std::cout << std::setprecision(6) << eta_ratio(*c_fast, cfg.model) << '\n';
      return kOk;
    }
    if (*vf) {
      bool ok = true;
      for (const OracleReport& r : run_verification_suite()) {
        std::cout << format_report(r) << '\n';
        ok = ok && r.pass;
      }
      return ok ? kOk : kFailure;
    }
  } catch (const ValidationError& e) {
    std::cerr << "validation error (" << e.key() << "): " << e.what() << '\n';
    return kValidation;
  } catch (const ParseError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kValidation;
  } catch (const CheckpointError& e) {
    std::cerr << "checkpoint error: " << e.what() << '\n';
    return kValidation;
  } catch (const InvalidArgument& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kValidation;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kOk;
}
