#include "fhnpulse/io.hpp"

#include <bit>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <vector>

#include "fhnpulse/errors.hpp"
#include "json.hpp"

namespace fhn {

namespace {

namespace pt = boost::property_tree;

using Keys = std::map<std::string, std::size_t>;  // "section.key" -> line

// Line numbers are not kept by property_tree, so record them separately.
Keys key_lines(const std::string& text) {
  Keys out;
  std::istringstream is(text);
  std::string line, section;
  std::size_t n = 0;
  while (std::getline(is, line)) {
    ++n;
    const auto b = line.find_first_not_of(" \t");
    if (b == std::string::npos || line[b] == ';' || line[b] == '#') continue;
    if (line[b] == '[') {
      const auto e = line.find(']', b);
      if (e != std::string::npos) section = line.substr(b + 1, e - b - 1);
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    std::string key = line.substr(b, eq - b);
    key.erase(key.find_last_not_of(" \t") + 1);
    out[section + "." + key] = n;
  }
  return out;
}

std::string trim(std::string s) {
  s.erase(0, s.find_first_not_of(" \t\r"));
  s.erase(s.find_last_not_of(" \t\r") + 1);
  return s;
}

bool parse_plain(const std::string& s, double& out) {
  const char* b = s.data();
  const char* e = b + s.size();
  auto [p, ec] = std::from_chars(b, e, out);
  return ec == std::errc() && p == e;
}

class Reader {
public:
  Reader(const pt::ptree& tree, Keys lines) : tree_(tree), lines_(std::move(lines)) {}

  std::optional<std::string> raw(const std::string& path) const {
    auto v = tree_.get_optional<std::string>(path);
    if (!v) return std::nullopt;
    return trim(*v);
  }

  std::size_t line(const std::string& path) const {
    auto it = lines_.find(path);
    return it == lines_.end() ? 0 : it->second;
  }

  // Accepts plain decimals and fractions p/q.
  std::optional<double> number(const std::string& path) const {
    auto s = raw(path);
    if (!s) return std::nullopt;
    double v = 0.0;
    const auto slash = s->find('/');
    if (slash == std::string::npos) {
      if (parse_plain(*s, v)) return v;
    } else {
      double p = 0.0, q = 0.0;
      if (parse_plain(trim(s->substr(0, slash)), p) && parse_plain(trim(s->substr(slash + 1)), q) &&
          q != 0.0)
        return p / q;
    }
    throw ParseError(line(path), "line " + std::to_string(line(path)) + ": '" + path +
                                     "' is not a number: " + *s);
  }

  template <class T>
  void set(const std::string& path, T& field) const {
    auto v = number(path);
    if (!v) return;
    if constexpr (std::is_integral_v<T>) {
      if (*v != std::floor(*v))
        throw ParseError(line(path), "line " + std::to_string(line(path)) + ": '" + path +
                                         "' must be an integer");
      field = T(*v);
    } else {
      field = *v;
    }
  }

  void set_bool(const std::string& path, bool& field) const {
    auto s = raw(path);
    if (!s) return;
    if (*s == "true" || *s == "1" || *s == "yes") field = true;
    else if (*s == "false" || *s == "0" || *s == "no") field = false;
    else
      throw ParseError(line(path), "line " + std::to_string(line(path)) + ": '" + path +
                                       "' must be true or false");
  }

private:
  const pt::ptree& tree_;
  Keys lines_;
};

const std::map<std::string, std::vector<std::string>>& known_keys() {
  static const std::map<std::string, std::vector<std::string>> k = {
      {"model", {"d", "gamma", "beta", "L", "dim"}},
      {"grid", {"h", "domain_length", "right_end", "n_y"}},
      {"descent", {"theta", "alpha0", "delta1", "delta2", "delta3", "max_iters", "max_backtracks"}},
      {"scan",
       {"c_start", "c_end", "dc", "adaptive", "refine_dc", "jump_factor", "max_failures", "tol_c",
        "tol_J_rel", "max_root_iters", "stagnation_limit", "guess"}},
      {"stability", {"threshold", "lengths"}},
      {"paths", {"output_dir", "checkpoint_dir"}},
  };
  return k;
}

}  // namespace

void RunConfig::validate() const {
  model.validate();
  if (!(grid.h > 0.0) || !std::isfinite(grid.h)) throw ValidationError("h", "grid spacing h must be positive");
  if (!(grid.length > 0.0) || !std::isfinite(grid.length))
    throw ValidationError("domain_length", "domain_length must be positive");
  if (std::lround(grid.length / grid.h) < 4)
    throw ValidationError("domain_length", "domain_length must span at least 4 cells");
  if (!std::isfinite(grid.right_end) || grid.right_end > kMaxRightEndpoint)
    throw ValidationError("right_end", "right_end must be finite and at most 600");
  if (model.dim == Dimension::strip && grid.n_y < 2)
    throw ValidationError("n_y", "strips need n_y >= 2");
  descent.validate();
  scan.validate();
  if (!(stability.threshold > 0.0 && stability.threshold < 1.0))
    throw ValidationError("threshold", "stability threshold must lie in (0, 1)");
  if (!(stability.lengths > 0.0)) throw ValidationError("lengths", "lengths must be positive");
}

RunConfig parse_config(const std::string& text) {
  pt::ptree tree;
  std::istringstream is(text);
  try {
    pt::read_ini(is, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ParseError(e.line(), "line " + std::to_string(e.line()) + ": " + e.message());
  }
  for (const auto& [section, body] : tree) {
    auto it = known_keys().find(section);
    if (it == known_keys().end()) throw ValidationError(section, "unknown section [" + section + "]");
    for (const auto& kv : body) {
      const auto& allowed = it->second;
      if (std::find(allowed.begin(), allowed.end(), kv.first) == allowed.end())
        throw ValidationError(kv.first, "unknown key '" + kv.first + "' in [" + section + "]");
    }
  }
  Reader r(tree, key_lines(text));

  RunConfig cfg;
  for (const char* k : {"d", "gamma", "beta"})
    if (!r.raw(std::string("model.") + k)) throw ValidationError(k, std::string("missing required key model.") + k);
  r.set("model.d", cfg.model.d);
  r.set("model.gamma", cfg.model.gamma);
  r.set("model.beta", cfg.model.beta);
  r.set("model.L", cfg.model.L);
  int dim = 1;
  r.set("model.dim", dim);
  if (dim != 1 && dim != 2) throw ValidationError("dim", "dim must be 1 or 2");
  cfg.model.dim = dim == 2 ? Dimension::strip : Dimension::line;
  if (dim == 2) {
    cfg.descent = DescentConfig::strip_defaults();
    cfg.stability.threshold = 0.10;
    cfg.grid.h = 0.05;
    cfg.grid.length = 280.0;
    cfg.grid.n_y = 80;
  }

  r.set("grid.h", cfg.grid.h);
  r.set("grid.domain_length", cfg.grid.length);
  r.set("grid.right_end", cfg.grid.right_end);
  r.set("grid.n_y", cfg.grid.n_y);

  r.set("descent.theta", cfg.descent.theta);
  r.set("descent.alpha0", cfg.descent.alpha1_init);
  r.set("descent.delta1", cfg.descent.delta1);
  r.set("descent.delta2", cfg.descent.delta2);
  r.set("descent.delta3", cfg.descent.delta3);
  r.set("descent.max_iters", cfg.descent.max_iters);
  r.set("descent.max_backtracks", cfg.descent.max_backtracks);

  r.set("scan.c_start", cfg.scan.c_start);
  r.set("scan.c_end", cfg.scan.c_end);
  r.set("scan.dc", cfg.scan.dc);
  r.set_bool("scan.adaptive", cfg.scan.adaptive);
  r.set("scan.refine_dc", cfg.scan.refine_dc);
  r.set("scan.jump_factor", cfg.scan.jump_factor);
  r.set("scan.max_failures", cfg.scan.max_failures);
  r.set("scan.tol_c", cfg.scan.tol_c);
  r.set("scan.tol_J_rel", cfg.scan.tol_J_rel);
  r.set("scan.max_root_iters", cfg.scan.max_root_iters);
  r.set("scan.stagnation_limit", cfg.scan.stagnation_limit);
  if (auto g = r.raw("scan.guess")) {
    if (*g == "smooth") cfg.scan.guess = GuessKind::smooth;
    else if (*g == "square") cfg.scan.guess = GuessKind::square;
    else throw ValidationError("guess", "guess must be 'smooth' or 'square'");
  }

  r.set("stability.threshold", cfg.stability.threshold);
  r.set("stability.lengths", cfg.stability.lengths);
  if (auto s = r.raw("paths.output_dir")) cfg.paths.output_dir = *s;
  if (auto s = r.raw("paths.checkpoint_dir")) cfg.paths.checkpoint_dir = *s;

  cfg.validate();
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("config", "cannot open config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string format_config(const RunConfig& c) {
  std::ostringstream os;
  os << std::setprecision(17);
  os << "[model]\nd = " << c.model.d << "\ngamma = " << c.model.gamma << "\nbeta = " << c.model.beta
     << "\nL = " << c.model.L << "\ndim = " << int(c.model.dim) << "\n\n";
  os << "[grid]\nh = " << c.grid.h << "\ndomain_length = " << c.grid.length
     << "\nright_end = " << c.grid.right_end << "\nn_y = " << c.grid.n_y << "\n\n";
  os << "[descent]\ntheta = " << c.descent.theta << "\nalpha0 = " << c.descent.alpha1_init
     << "\ndelta1 = " << c.descent.delta1 << "\ndelta2 = " << c.descent.delta2
     << "\ndelta3 = " << c.descent.delta3 << "\nmax_iters = " << c.descent.max_iters
     << "\nmax_backtracks = " << c.descent.max_backtracks << "\n\n";
  os << "[scan]\nc_start = " << c.scan.c_start << "\nc_end = " << c.scan.c_end << "\ndc = " << c.scan.dc
     << "\nadaptive = " << (c.scan.adaptive ? "true" : "false") << "\nrefine_dc = " << c.scan.refine_dc
     << "\njump_factor = " << c.scan.jump_factor << "\nmax_failures = " << c.scan.max_failures
     << "\ntol_c = " << c.scan.tol_c << "\ntol_J_rel = " << c.scan.tol_J_rel
     << "\nmax_root_iters = " << c.scan.max_root_iters
     << "\nstagnation_limit = " << c.scan.stagnation_limit
     << "\nguess = " << (c.scan.guess == GuessKind::smooth ? "smooth" : "square") << "\n\n";
  os << "[stability]\nthreshold = " << c.stability.threshold << "\nlengths = " << c.stability.lengths
     << "\n\n";
  os << "[paths]\noutput_dir = " << c.paths.output_dir << "\n";
  if (!c.paths.checkpoint_dir.empty()) os << "checkpoint_dir = " << c.paths.checkpoint_dir << "\n";
  return os.str();
}

// --- checkpoints -----------------------------------------------------------------

namespace {

constexpr const char* kMagic = "fhnpulse-checkpoint";

std::uint64_t fnv1a(const void* data, std::size_t n) {
  auto p = static_cast<const unsigned char*>(data);
  std::uint64_t h = 1469598103934665603ull;
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 1099511628211ull;
  }
  return h;
}

static_assert(std::endian::native == std::endian::little, "checkpoint payload assumes little endian");

}  // namespace

void save_checkpoint(const std::string& path, const Profile& p, const CheckpointMeta& meta) {
  const Grid& g = p.grid();
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw CheckpointError("cannot write checkpoint " + path);
  auto s = p.samples();
  std::ostringstream h;
  h << std::setprecision(17);
  h << kMagic << ' ' << kCheckpointVersion << '\n'
    << "dim " << int(g.dimension()) << '\n'
    << "origin_hi " << g.origin_hi() << '\n'
    << "origin_lo " << g.origin_lo() << '\n'
    << "h " << g.h() << '\n'
    << "n_x " << g.n_x() << '\n'
    << "half_width " << g.half_width() << '\n'
    << "n_y " << g.n_y() << '\n'
    << "c " << meta.c << '\n'
    << "d " << meta.d << '\n'
    << "gamma " << meta.gamma << '\n'
    << "beta " << meta.beta << '\n'
    << "J " << meta.J << '\n'
    << "samples " << s.size() << '\n'
    << "checksum " << fnv1a(s.data(), s.size_bytes()) << '\n'
    << "payload\n";
  const std::string head = h.str();
  out.write(head.data(), std::streamsize(head.size()));
  out.write(reinterpret_cast<const char*>(s.data()), std::streamsize(s.size_bytes()));
  if (!out) throw CheckpointError("write failed for " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("cannot open checkpoint " + path);
  std::string magic;
  int version = 0;
  in >> magic >> version;
  if (magic != kMagic) throw CheckpointError(path + " is not a checkpoint file");
  if (version != kCheckpointVersion)
    throw CheckpointError("checkpoint version " + std::to_string(version) + " is not supported");

  std::map<std::string, std::string> kv;
  std::string key;
  while (in >> key && key != "payload") {
    std::string value;
    if (!(in >> value)) throw CheckpointError("truncated checkpoint header");
    kv[key] = value;
  }
  if (key != "payload") throw CheckpointError("checkpoint header has no payload marker");
  in.get();  // the newline after "payload"

  auto num = [&](const char* k) {
    auto it = kv.find(k);
    if (it == kv.end()) throw CheckpointError(std::string("checkpoint header lacks '") + k + "'");
    try {
      std::size_t pos = 0;
      const double v = std::stod(it->second, &pos);
      if (pos != it->second.size()) throw std::invalid_argument(k);
      return v;
    } catch (const std::exception&) {
      throw CheckpointError(std::string("bad checkpoint header value for '") + k + "'");
    }
  };
  const int dim = int(num("dim"));
  const int n_x = int(num("n_x"));
  const int n_y = int(num("n_y"));
  const std::size_t count = std::size_t(num("samples"));
  std::uint64_t checksum = 0;
  try {
    checksum = std::stoull(kv.at("checksum"));
  } catch (const std::exception&) {
    throw CheckpointError("bad checkpoint checksum field");
  }

  Grid g = dim == 2 ? Grid::strip(0.0, num("h"), n_x, num("half_width"), n_y) : Grid::line(0.0, num("h"), n_x);
  g = g.with_origin(num("origin_hi"), num("origin_lo"));
  if (count != g.size())
    throw CheckpointError("checkpoint header sample count does not match the grid");

  std::vector<double> samples(count);
  in.read(reinterpret_cast<char*>(samples.data()), std::streamsize(count * sizeof(double)));
  if (std::size_t(in.gcount()) != count * sizeof(double))
    throw CheckpointError("checkpoint payload length mismatch: expected " + std::to_string(count) +
                          " samples");
  if (in.peek() != std::char_traits<char>::eof())
    throw CheckpointError("checkpoint payload length mismatch: trailing bytes");
  if (fnv1a(samples.data(), count * sizeof(double)) != checksum)
    throw CheckpointError("checkpoint payload is corrupted (checksum mismatch)");

  CheckpointMeta meta{num("c"), num("d"), num("gamma"), num("beta"), num("J")};
  try {
    return Checkpoint{Profile(g, std::move(samples)), meta};
  } catch (const InvalidArgument& e) {
    throw CheckpointError(std::string("checkpoint payload rejected: ") + e.what());
  }
}

double reconcile_d(const CheckpointMeta& meta, std::optional<double> cli_d, std::ostream* warn) {
  if (!cli_d) return meta.d;
  if (*cli_d != meta.d && warn)
    *warn << std::setprecision(17) << "warning: checkpoint was computed with d = " << meta.d
          << ", continuing with d = " << *cli_d << '\n';
  return *cli_d;
}

// --- export ------------------------------------------------------------------------

void write_scan_csv(std::ostream& os, const SpeedScan& scan) {
  os << "c,J,converged,checkpoint_path\n" << std::setprecision(17);
  for (const auto& s : scan.samples)
    os << s.c << ',' << s.J << ',' << (s.converged ? 1 : 0) << ',' << s.checkpoint << '\n';
}

void write_profile_csv(std::ostream& os, const Profile& p) {
  const Grid& g = p.grid();
  os << std::setprecision(17);
  if (g.is_strip()) {
    os << "x,y,w\n";
    for (int j = 0; j <= g.n_x(); ++j)
      for (int k = 0; k <= g.n_y(); ++k) os << g.x(j) << ',' << g.y(k) << ',' << p.at(j, k) << '\n';
  } else {
    os << "x,w\n";
    for (int j = 0; j <= g.n_x(); ++j) os << g.x(j) << ',' << p.at(j) << '\n';
  }
}

Profile read_profile_csv(std::istream& is) {
  std::string header;
  if (!std::getline(is, header)) throw InvalidArgument("empty profile CSV");
  const bool strip = header == "x,y,w";
  if (!strip && header != "x,w") throw InvalidArgument("unrecognised profile CSV header: " + header);
  std::vector<double> xs, ys, ws;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string a, b, c;
    std::getline(ls, a, ',');
    std::getline(ls, b, ',');
    xs.push_back(std::stod(a));
    if (strip) {
      std::getline(ls, c, ',');
      ys.push_back(std::stod(b));
      ws.push_back(std::stod(c));
    } else {
      ws.push_back(std::stod(b));
    }
  }
  if (!strip) {
    if (xs.size() < 2) throw InvalidArgument("profile CSV needs at least two rows");
    const int n = int(xs.size()) - 1;
    return Profile(Grid::line(xs.front(), (xs.back() - xs.front()) / n, n), std::move(ws));
  }
  std::size_t col = 1;
  while (col < xs.size() && xs[col] == xs[0]) ++col;
  if (col < 3 || xs.size() % col != 0) throw InvalidArgument("malformed strip profile CSV");
  const int n_y = int(col) - 1;
  const int n = int(xs.size() / col) - 1;
  if (n < 1) throw InvalidArgument("profile CSV needs at least two columns");
  const double half = -ys.front();
  return Profile(Grid::strip(xs.front(), (xs.back() - xs.front()) / n, n, half, n_y), std::move(ws));
}

namespace {

using nlohmann::json;

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

std::string to_json(const SpeedScan& scan) {
  json j;
  j["direction"] = scan.direction;
  j["aborted"] = scan.aborted;
  j["lipschitz"] = finite_or_null(scan.lipschitz);
  j["samples"] = json::array();
  for (const auto& s : scan.samples)
    j["samples"].push_back({{"c", s.c},
                            {"J", finite_or_null(s.J)},
                            {"gradient_term", finite_or_null(s.gradient_term)},
                            {"converged", s.converged},
                            {"iters", s.iters},
                            {"jump", s.jump},
                            {"refinement", s.refinement},
                            {"checkpoint", s.checkpoint}});
  j["brackets"] = json::array();
  for (const auto& [lo, hi] : scan.bracket_speeds()) j["brackets"].push_back({lo, hi});
  return j.dump(2);
}

std::string to_json(const RootResult& r, const ModelParams& p) {
  json j{{"c_root", r.c_root},
         {"J_at_root", r.J_at_root},
         {"gradient_term", r.gradient_term},
         {"tol_J", r.tol_J},
         {"within_tolerance", r.within_tolerance},
         {"iterations", r.iterations},
         {"descent_iters", r.descent_iters},
         {"max_w", r.profile.max()},
         {"min_w", r.profile.min()},
         {"d", p.d},
         {"gamma", p.gamma},
         {"beta", p.beta},
         {"dim", int(p.dim)}};
  if (p.dim == Dimension::strip) j["L"] = p.L;
  j["cold_J"] = r.cold_J ? finite_or_null(*r.cold_J) : json(nullptr);
  j["cold_verified"] = r.cold_verified;
  return j.dump(2);
}

std::string to_json(const StabilityReport& r) {
  json j{{"sup_deviation", r.sup_deviation},
         {"l2_deviation", r.l2_deviation},
         {"distance_propagated", r.distance_propagated},
         {"initial_max", r.initial_max},
         {"final_max", r.final_max},
         {"threshold", r.threshold},
         {"collapsed", r.collapsed},
         {"verdict", to_string(r.verdict)}};
  return j.dump(2);
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw InvalidArgument("cannot write " + path);
  out << text;
  if (!out) throw InvalidArgument("write failed for " + path);
}

}  // namespace fhn
