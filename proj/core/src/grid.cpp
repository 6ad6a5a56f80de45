#include "fhnpulse/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fhnpulse/errors.hpp"

namespace fhn {

namespace {

// Error-free transformation: a + b = s + e exactly.
void two_sum(double a, double b, double& s, double& e) {
  s = a + b;
  double bb = s - a;
  e = (a - (s - bb)) + (b - bb);
}

void require_same_grid(const Profile& u, const Profile& v) {
  if (!(u.grid() == v.grid())) throw InvalidArgument("profiles live on different grids");
}

}  // namespace

Grid Grid::line(double origin, double h, int n_x) {
  if (!std::isfinite(origin)) throw InvalidArgument("grid origin must be finite");
  if (!(h > 0.0) || !std::isfinite(h)) throw InvalidArgument("grid spacing h must be positive");
  if (n_x < 2) throw InvalidArgument("grid needs n_x >= 2");
  Grid g;
  g.dim_ = Dimension::line;
  g.origin_hi_ = origin;
  g.h_ = h;
  g.n_x_ = n_x;
  g.build_weights();
  return g;
}

Grid Grid::strip(double origin, double h, int n_x, double half_width, int n_y) {
  if (!(half_width > 0.0) || !std::isfinite(half_width))
    throw InvalidArgument("strip half width must be positive");
  if (n_y < 2) throw InvalidArgument("strip needs n_y >= 2");
  Grid g = line(origin, h, n_x);
  g.dim_ = Dimension::strip;
  g.half_width_ = half_width;
  g.n_y_ = n_y;
  return g;
}

void Grid::build_weights() {
  auto base = std::make_shared<std::vector<double>>(n_x_);
  for (int j = 0; j < n_x_; ++j) (*base)[j] = std::exp(((j + 0.5) - n_x_) * h_);
  base_ = std::move(base);
}

Grid Grid::shifted(double offset) const {
  if (!std::isfinite(offset)) throw InvalidArgument("shift offset must be finite");
  Grid g = *this;
  double s, e;
  two_sum(origin_hi_, offset, s, e);
  double lo = origin_lo_ + e;
  g.origin_hi_ = s + lo;
  g.origin_lo_ = lo - (g.origin_hi_ - s);
  return g;
}

Grid Grid::with_origin(double hi, double lo) const {
  if (!std::isfinite(hi) || !std::isfinite(lo)) throw InvalidArgument("grid origin must be finite");
  Grid g = *this;
  g.origin_hi_ = hi + lo;
  g.origin_lo_ = lo - (g.origin_hi_ - hi);
  return g;
}

Grid Grid::with_half_width(double half_width) const {
  if (!is_strip()) throw InvalidArgument("with_half_width needs a strip grid");
  if (!(half_width > 0.0) || !std::isfinite(half_width))
    throw InvalidArgument("strip half width must be positive");
  Grid g = *this;
  g.half_width_ = half_width;
  return g;
}

double Grid::weight_scale() const {
  // b = origin + n_x h as a double-double; e^b = e^{b_hi} (1 + b_lo) to full precision.
  double p = n_x_ * h_;
  double pe = std::fma(double(n_x_), h_, -p);
  double s, e;
  two_sum(origin_hi_, p, s, e);
  double lo = e + origin_lo_ + pe;
  double hi = s + lo;
  lo -= hi - s;
  if (hi > kMaxRightEndpoint)
    throw DomainTruncationError("right endpoint " + std::to_string(hi) +
                                " exceeds the exponential weight cap");
  return std::exp(hi) * (1.0 + lo);
}

bool Grid::same_shape(const Grid& o) const noexcept {
  return dim_ == o.dim_ && h_ == o.h_ && n_x_ == o.n_x_ && n_y_ == o.n_y_ &&
         half_width_ == o.half_width_;
}

bool Grid::operator==(const Grid& o) const noexcept {
  return same_shape(o) && origin_hi_ == o.origin_hi_ && origin_lo_ == o.origin_lo_;
}

// --- Profile ----------------------------------------------------------------

Profile::Profile(Grid grid, std::vector<double> samples)
    : grid_(std::move(grid)), samples_(std::move(samples)) {
  if (samples_.size() != grid_.size())
    throw InvalidArgument("sample count " + std::to_string(samples_.size()) +
                          " does not match grid size " + std::to_string(grid_.size()));
  for (double s : samples_)
    if (!std::isfinite(s)) throw InvalidArgument("profile samples must be finite");
  if (grid_.is_strip()) {
    for (int j = 0; j <= grid_.n_x(); ++j)
      if (samples_[grid_.index(j, 0)] != 0.0 || samples_[grid_.index(j, grid_.n_y())] != 0.0)
        throw InvalidArgument("strip profile must vanish on y = +-half_width");
  }
}

Profile Profile::zeros(const Grid& grid) { return Profile(grid, std::vector<double>(grid.size(), 0.0)); }

Profile Profile::sample(const Grid& grid, const std::function<double(double)>& f) {
  if (grid.is_strip()) throw InvalidArgument("1D sampler used on a strip grid");
  std::vector<double> s(grid.size());
  for (int j = 0; j <= grid.n_x(); ++j) s[j] = f(grid.x(j));
  return Profile(grid, std::move(s));
}

Profile Profile::sample(const Grid& grid, const std::function<double(double, double)>& f) {
  std::vector<double> s(grid.size(), 0.0);
  if (!grid.is_strip()) {
    for (int j = 0; j <= grid.n_x(); ++j) s[j] = f(grid.x(j), 0.0);
  } else {
    for (int j = 0; j <= grid.n_x(); ++j)
      for (int k = 1; k < grid.n_y(); ++k) s[grid.index(j, k)] = f(grid.x(j), grid.y(k));
  }
  return Profile(grid, std::move(s));
}

double Profile::max() const { return *std::max_element(samples_.begin(), samples_.end()); }
double Profile::min() const { return *std::min_element(samples_.begin(), samples_.end()); }

double Profile::sup_norm() const {
  double m = 0.0;
  for (double s : samples_) m = std::max(m, std::abs(s));
  return m;
}

std::size_t Profile::argmax_last() const {
  std::size_t best = 0;
  for (std::size_t i = 1; i < samples_.size(); ++i)
    if (samples_[i] >= samples_[best]) best = i;
  return best;
}

// --- operations ---------------------------------------------------------------

Profile shift_grid(const Profile& p, double offset) {
  return Profile(p.grid().shifted(offset), p.copy_samples());
}

Profile resample(const Profile& p, const Grid& target) {
  const Grid& g = p.grid();
  if (g.dimension() != target.dimension())
    throw InvalidArgument("resample: source and target dimensions differ");
  if (g.is_strip() && std::abs(g.half_width() - target.half_width()) > 1e-12 * g.half_width())
    throw InvalidArgument("resample: strip half widths differ");
  const int n = g.n_x();
  // Cell index and weight of the right neighbour along x.
  auto locate = [&](double x) {
    const double t = std::clamp((x - g.origin()) / g.h(), 0.0, double(n));
    const int j = std::min(int(t), n - 1);
    return std::pair{j, t - j};
  };
  if (!g.is_strip())
    return Profile::sample(target, [&](double x) {
      const auto [j, a] = locate(x);
      return (1.0 - a) * p.at(j) + a * p.at(j + 1);
    });
  const int m = g.n_y();
  return Profile::sample(target, [&](double x, double y) {
    const auto [j, a] = locate(x);
    const double t = std::clamp((y + g.half_width()) / g.h_y(), 0.0, double(m));
    const int k = std::min(int(t), m - 1);
    const double b = t - k;
    return (1.0 - a) * ((1.0 - b) * p.at(j, k) + b * p.at(j, k + 1)) +
           a * ((1.0 - b) * p.at(j + 1, k) + b * p.at(j + 1, k + 1));
  });
}

Profile diff_x(const Profile& p) {
  const Grid& g = p.grid();
  const int n = g.n_x();
  const std::size_t m = g.column_size();
  const double inv2h = 1.0 / (2.0 * g.h());
  auto s = p.samples();
  std::vector<double> d(s.size());
  for (std::size_t k = 0; k < m; ++k) {
    auto at = [&](int j) { return s[j * m + k]; };
    d[k] = (-3.0 * at(0) + 4.0 * at(1) - at(2)) * inv2h;
    for (int j = 1; j < n; ++j) d[j * m + k] = (at(j + 1) - at(j - 1)) * inv2h;
    d[n * m + k] = (3.0 * at(n) - 4.0 * at(n - 1) + at(n - 2)) * inv2h;
  }
  if (g.is_strip())
    for (int j = 0; j <= n; ++j) d[g.index(j, 0)] = d[g.index(j, g.n_y())] = 0.0;
  return Profile(g, std::move(d));
}

namespace {

// Sum over cells of base_j * (corner average of the pointwise product), before
// the e^{b} h (h_y) scale.
double cell_sum_product(const Profile& u, const Profile& v) {
  const Grid& g = u.grid();
  auto bw = g.base_weights();
  auto a = u.samples();
  auto b = v.samples();
  double total = 0.0;
  if (!g.is_strip()) {
    for (int j = 0; j < g.n_x(); ++j) total += bw[j] * 0.5 * (a[j] * b[j] + a[j + 1] * b[j + 1]);
    return total;
  }
  const std::size_t m = g.column_size();
  for (int j = 0; j < g.n_x(); ++j) {
    const std::size_t c0 = j * m, c1 = c0 + m;
    double col = 0.0;
    for (int k = 0; k < g.n_y(); ++k)
      col += a[c0 + k] * b[c0 + k] + a[c0 + k + 1] * b[c0 + k + 1] + a[c1 + k] * b[c1 + k] +
             a[c1 + k + 1] * b[c1 + k + 1];
    total += bw[j] * 0.25 * col;
  }
  return total;
}

double measure(const Grid& g) { return g.is_strip() ? g.h() * g.h_y() : g.h(); }

}  // namespace

double weighted_integral(const Profile& integrand) {
  const Grid& g = integrand.grid();
  auto bw = g.base_weights();
  auto a = integrand.samples();
  double total = 0.0;
  if (!g.is_strip()) {
    for (int j = 0; j < g.n_x(); ++j) total += bw[j] * 0.5 * (a[j] + a[j + 1]);
  } else {
    const std::size_t m = g.column_size();
    for (int j = 0; j < g.n_x(); ++j) {
      const std::size_t c0 = j * m, c1 = c0 + m;
      double col = 0.0;
      for (int k = 0; k < g.n_y(); ++k) col += a[c0 + k] + a[c0 + k + 1] + a[c1 + k] + a[c1 + k + 1];
      total += bw[j] * 0.25 * col;
    }
  }
  return g.weight_scale() * measure(g) * total;
}

double inner_l2exp(const Profile& u, const Profile& v) {
  require_same_grid(u, v);
  return u.grid().weight_scale() * measure(u.grid()) * cell_sum_product(u, v);
}

double gradient_inner(const Profile& u, const Profile& v) {
  require_same_grid(u, v);
  const Grid& g = u.grid();
  auto bw = g.base_weights();
  auto a = u.samples();
  auto b = v.samples();
  const int n = g.n_x();
  if (!g.is_strip()) {
    double total = 0.0;
    for (int j = 0; j < n; ++j) total += bw[j] * (a[j + 1] - a[j]) * (b[j + 1] - b[j]);
    return g.weight_scale() * total / g.h();
  }
  // x-differences on the two horizontal edges of every cell, averaged; y-differences
  // on the two vertical edges, averaged. Interior rows collect a full weight.
  const std::size_t m = g.column_size();
  const double hx = g.h(), hy = g.h_y();
  double tx = 0.0, ty = 0.0;
  for (int j = 0; j < n; ++j) {
    const std::size_t c0 = j * m, c1 = c0 + m;
    double col = 0.0;
    for (int k = 1; k < g.n_y(); ++k) col += (a[c1 + k] - a[c0 + k]) * (b[c1 + k] - b[c0 + k]);
    tx += bw[j] * col;
  }
  for (int j = 0; j <= n; ++j) {
    const double node = 0.5 * ((j > 0 ? bw[j - 1] : 0.0) + (j < n ? bw[j] : 0.0));
    const std::size_t c = j * m;
    double col = 0.0;
    for (int k = 0; k < g.n_y(); ++k) col += (a[c + k + 1] - a[c + k]) * (b[c + k + 1] - b[c + k]);
    ty += node * col;
  }
  return g.weight_scale() * (tx * hy / hx + ty * hx / hy);
}

double inner_h1exp(const Profile& u, const Profile& v) {
  return gradient_inner(u, v) + inner_l2exp(u, v);
}

double norm_h1exp_sq(const Profile& u) { return inner_h1exp(u, u); }

}  // namespace fhn
