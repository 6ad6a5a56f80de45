#include "fhnpulse/speed_finder.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fhnpulse/errors.hpp"

namespace fhn {

Grid GridSpec::make(const ModelParams& params) const {
  if (params.dim == Dimension::strip) return make_strip_grid(h, length, right_end, n_y, params);
  return make_line_grid(h, length, right_end);
}

void ScanConfig::validate() const {
  if (!(c_start > 0.0) || !std::isfinite(c_start)) throw ValidationError("c_start", "c_start must be positive");
  if (!(c_end > 0.0) || !std::isfinite(c_end)) throw ValidationError("c_end", "c_end must be positive");
  if (!(dc != 0.0) || !std::isfinite(dc)) throw ValidationError("dc", "dc must be nonzero");
  if ((c_end - c_start) * dc < 0.0) throw ValidationError("dc", "dc points away from c_end");
  if (!(refine_dc > 0.0)) throw ValidationError("refine_dc", "refine_dc must be positive");
  if (!(tol_c > 0.0)) throw ValidationError("tol_c", "tol_c must be positive");
  if (!(tol_J_rel > 0.0)) throw ValidationError("tol_J_rel", "tol_J_rel must be positive");
  if (max_failures < 1) throw ValidationError("max_failures", "max_failures must be positive");
}

std::vector<std::pair<double, double>> SpeedScan::bracket_speeds() const {
  std::vector<std::pair<double, double>> out;
  for (const auto& b : brackets) out.emplace_back(samples[b.lo].c, samples[b.hi].c);
  return out;
}

Profile transfer_to_speed(const Profile& w, const ModelParams& params, double c) {
  if (!w.grid().is_strip()) return w;
  return Profile(w.grid().with_half_width(c * params.L), w.copy_samples());
}

MinimizeResult evaluate_J(const ModelParams& params, double c, const std::optional<Profile>& warm,
                          const GridSpec& grid, const DescentConfig& cfg, GuessKind guess) {
  const ModelParams p = params.with_c(c);
  p.validate();
  if (warm) return minimize(transfer_to_speed(*warm, params, c), p, cfg);
  return minimize(initial_guess(grid.make(p), guess), p, cfg);
}

namespace {

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

int sign(double x) { return (x > 0.0) - (x < 0.0); }

}  // namespace

SpeedScan scan_Jcurve(const ModelParams& params, const ScanConfig& scan, const GridSpec& grid,
                      const DescentConfig& cfg, const std::optional<Profile>& warm,
                      const SampleCallback& on_sample) {
  scan.validate();
  cfg.validate();
  SpeedScan out;
  out.direction = scan.dc > 0.0 ? 1 : -1;

  const long steps = long(std::floor((scan.c_end - scan.c_start) / scan.dc + 1e-9));
  std::optional<Profile> prev = warm;
  int failures = 0;
  std::optional<std::size_t> last_ok;  // index of the last converged sample
  std::vector<double> rates;

  auto run = [&](double c, bool refinement) -> std::size_t {
    MinimizeResult r = evaluate_J(params, c, prev, grid, cfg, scan.guess);
    ScanSample s;
    s.c = c;
    s.J = r.J();
    s.gradient_term = r.energy.gradient_term;
    s.converged = r.converged;
    s.iters = r.iters;
    s.refinement = refinement;
    if (on_sample) on_sample(s, r.w);
    s.profile = r.w;
    prev = r.w;
    out.samples.push_back(std::move(s));
    return out.samples.size() - 1;
  };

  // Keeps profiles only where a sign change makes them bracket endpoints.
  auto settle = [&](std::size_t i) {
    ScanSample& s = out.samples[i];
    if (!s.converged) {
      s.profile.reset();
      return;
    }
    if (last_ok) {
      ScanSample& p = out.samples[*last_ok];
      if (sign(p.J) * sign(s.J) >= 0) {
        const bool p_is_endpoint =
            std::any_of(out.brackets.begin(), out.brackets.end(),
                                        [&](const Bracket& b) { return b.hi == *last_ok || b.lo == *last_ok; });
        if (!p_is_endpoint) p.profile.reset();
      } else {
        out.brackets.push_back(out.direction > 0 ? Bracket{*last_ok, i} : Bracket{i, *last_ok});
      }
    }
    last_ok = i;
  };

  for (long k = 0; k <= steps; ++k) {
    const double c = scan.c_start + k * scan.dc;
    std::optional<Profile> before = prev;
    std::size_t i = run(c, false);
    ScanSample& s = out.samples[i];

    if (s.converged && last_ok) {
      const ScanSample& p = out.samples[*last_ok];
      const double rate = std::abs(s.J - p.J) / std::abs(s.c - p.c);
      const bool jump = rates.size() >= 3 && rate > scan.jump_factor * median(rates);
      if (jump && scan.adaptive && std::abs(s.c - p.c) > 1.5 * scan.refine_dc) {
        // Redo this step with the fine spacing from the last good sample.
        const double c0 = p.c;
        out.samples.pop_back();
        prev = before;
        const int m = int(std::lround(std::abs(c - c0) / scan.refine_dc));
        std::size_t j = 0;
        for (int q = 1; q <= m; ++q) {
          const double cq = q == m ? c : c0 + out.direction * q * scan.refine_dc;
          j = run(cq, q < m);
          out.samples[j].jump = q == m;
          const ScanSample& pq = out.samples[*last_ok];
          if (out.samples[j].converged)
            out.lipschitz = std::max(out.lipschitz, std::abs(out.samples[j].J - pq.J) / std::abs(cq - pq.c));
          settle(j);
        }
        failures = out.samples[j].converged ? 0 : failures + 1;
        continue;
      }
      s.jump = jump;
      rates.push_back(rate);
      out.lipschitz = std::max(out.lipschitz, rate);
    }
    failures = s.converged ? 0 : failures + 1;
    settle(i);
    if (failures >= scan.max_failures) {
      out.aborted = true;
      break;
    }
  }

  if (out.direction < 0) {
    const std::size_t n = out.samples.size();
    std::reverse(out.samples.begin(), out.samples.end());
    for (auto& b : out.brackets) b = Bracket{n - 1 - b.lo, n - 1 - b.hi};
    std::reverse(out.brackets.begin(), out.brackets.end());
  }
  for (auto& b : out.brackets)
    if (out.samples[b.lo].c > out.samples[b.hi].c) std::swap(b.lo, b.hi);
  return out;
}

FalsiResult regula_falsi(const std::function<double(double)>& f, double a, double fa, double b,
                         double fb, double tol_f, double tol_x, int max_iter, int stagnation_limit,
                         const std::function<bool(double, double)>& accept) {
  if (sign(fa) * sign(fb) > 0) throw InvalidArgument("regula falsi needs a sign change");
  auto good = [&](double x, double fx) { return accept ? accept(x, fx) : std::abs(fx) <= tol_f; };
  FalsiResult res;
  if (fa == 0.0 || fb == 0.0) {
    res.x = fa == 0.0 ? a : b;
    res.fx = 0.0;
    res.converged = true;
    return res;
  }
  int same_side = 0, last_side = 0;
  for (int it = 0; it < max_iter; ++it) {
    if (std::abs(b - a) <= tol_x) {
      res.converged = true;
      break;
    }
    double x;
    if (same_side >= stagnation_limit) {
      x = 0.5 * (a + b);
      same_side = 0;
      ++res.bisections;
    } else {
      x = (a * fb - b * fa) / (fb - fa);
      if (!(x > std::min(a, b) && x < std::max(a, b))) x = 0.5 * (a + b);
    }
    const double fx = f(x);
    ++res.evaluations;
    if (good(x, fx)) {
      res.x = x;
      res.fx = fx;
      res.converged = true;
      return res;
    }
    const double width = std::abs(b - a);
    int side;
    if (sign(fx) == sign(fa)) {
      a = x;
      fa = fx;
      side = -1;
    } else {
      b = x;
      fb = fx;
      side = 1;
    }
    const bool slow = std::abs(b - a) > 0.5 * width;
    same_side = (side == last_side && slow) ? same_side + 1 : (slow ? 1 : 0);
    last_side = side;
  }
  if (std::abs(fa) <= std::abs(fb)) {
    res.x = a;
    res.fx = fa;
  } else {
    res.x = b;
    res.fx = fb;
  }
  return res;
}

namespace {

struct Endpoint {
  double c;
  double J;
  double grad;
  long iters;
  Profile w;
};

RootResult refine_between(Endpoint lo, Endpoint hi, const ModelParams& params, const ScanConfig& cfg,
                          const GridSpec& grid, const DescentConfig& dcfg, bool verify_cold_start) {
  if (sign(lo.J) * sign(hi.J) >= 0 && lo.J != 0.0 && hi.J != 0.0)
    throw BracketLost(lo.c, lo.J, hi.c, hi.J,
                      "J has the same sign at c=" + std::to_string(lo.c) + " and c=" + std::to_string(hi.c));

  long descent_iters = 0;
  std::optional<Endpoint> last;
  auto f = [&](double c) {
    const Profile& warm = std::abs(c - lo.c) <= std::abs(c - hi.c) ? lo.w : hi.w;
    MinimizeResult r = evaluate_J(params, c, warm, grid, dcfg, cfg.guess);
    descent_iters += r.iters;
    Endpoint e{c, r.J(), r.energy.gradient_term, r.iters, r.w};
    if (sign(e.J) == sign(lo.J))
      lo = e;
    else
      hi = e;
    last = std::move(e);
    return last->J;
  };
  auto accept = [&](double, double J) { return last && std::abs(J) <= cfg.tol_J_rel * last->grad; };

  FalsiResult fr = regula_falsi(f, lo.c, lo.J, hi.c, hi.J, 0.0, cfg.tol_c, cfg.max_root_iters,
                                cfg.stagnation_limit, accept);
  const Endpoint& best =
      (last && last->c == fr.x) ? *last : (std::abs(lo.J) <= std::abs(hi.J) ? lo : hi);
  const double tol_J = cfg.tol_J_rel * best.grad;
  RootResult out{.c_root = best.c,
                 .J_at_root = best.J,
                 .gradient_term = best.grad,
                 .tol_J = tol_J,
                 .within_tolerance = std::abs(best.J) <= tol_J,
                 .profile = best.w,
                 .iterations = fr.evaluations,
                 .descent_iters = descent_iters,
                 .cold_J = std::nullopt};
  if (verify_cold_start) {
    MinimizeResult cold = evaluate_J(params, out.c_root, std::nullopt, grid, dcfg, cfg.guess);
    out.cold_J = cold.J();
    out.cold_verified = std::abs(cold.J()) <= 5.0 * out.tol_J;
  }
  return out;
}

Endpoint endpoint_at(double c, const std::optional<Profile>& warm, const ModelParams& params,
                     const GridSpec& grid, const DescentConfig& dcfg, GuessKind guess) {
  MinimizeResult r = evaluate_J(params, c, warm, grid, dcfg, guess);
  return Endpoint{c, r.J(), r.energy.gradient_term, r.iters, r.w};
}

}  // namespace

RootResult refine_root(const SpeedScan& scan, const Bracket& bracket, const ModelParams& params,
                       const ScanConfig& cfg, const GridSpec& grid, const DescentConfig& dcfg,
                       bool verify_cold_start) {
  auto from_sample = [&](const ScanSample& s) {
    if (s.profile) return Endpoint{s.c, s.J, s.gradient_term, s.iters, *s.profile};
    return endpoint_at(s.c, std::nullopt, params, grid, dcfg, cfg.guess);
  };
  return refine_between(from_sample(scan.samples.at(bracket.lo)), from_sample(scan.samples.at(bracket.hi)),
                        params, cfg, grid, dcfg, verify_cold_start);
}

RootResult refine_root(double c_lo, double c_hi, const ModelParams& params, const ScanConfig& cfg,
                       const GridSpec& grid, const DescentConfig& dcfg, const std::optional<Profile>& warm_lo,
                       const std::optional<Profile>& warm_hi, bool verify_cold_start) {
  if (!(c_lo < c_hi)) throw InvalidArgument("bracket must satisfy c_lo < c_hi");
  Endpoint lo = endpoint_at(c_lo, warm_lo, params, grid, dcfg, cfg.guess);
  Endpoint hi = endpoint_at(c_hi, warm_hi ? warm_hi : std::optional<Profile>(lo.w), params, grid, dcfg, cfg.guess);
  return refine_between(std::move(lo), std::move(hi), params, cfg, grid, dcfg, verify_cold_start);
}

double eta_ratio(double c0, const ModelParams& params) {
  if (!(c0 > 0.0)) throw InvalidArgument("eta needs c0 > 0");
  const double s = 1.0 - 2.0 * params.beta;
  return 2.0 * params.d * c0 * c0 / (s * s);
}

}  // namespace fhn
