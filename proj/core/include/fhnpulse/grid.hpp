#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <vector>

namespace fhn {

enum class Dimension : int { line = 1, strip = 2 };

// Largest admissible right endpoint of a grid. The quadrature weight e^x is
// evaluated directly, so the domain must stay well inside the double range.
inline constexpr double kMaxRightEndpoint = 600.0;

// Uniform grid in co-moving coordinates.
//
// 1D: x_j = origin + j h, j = 0..n_x.
// 2D: additionally y_k = -half_width + k h_y, k = 0..n_y, h_y = 2 half_width / n_y.
//
// The origin is carried as an unevaluated sum (hi + lo) so that repeated
// shifts neither drift nor perturb the factorization e^{x+a} = e^a e^x that the
// weighted quadrature relies on.
class Grid {
public:
  static Grid line(double origin, double h, int n_x);
  static Grid strip(double origin, double h, int n_x, double half_width, int n_y);

  Dimension dimension() const noexcept { return dim_; }
  bool is_strip() const noexcept { return dim_ == Dimension::strip; }

  double origin() const noexcept { return origin_hi_ + origin_lo_; }
  double origin_hi() const noexcept { return origin_hi_; }
  double origin_lo() const noexcept { return origin_lo_; }
  double h() const noexcept { return h_; }
  int n_x() const noexcept { return n_x_; }
  double half_width() const noexcept { return half_width_; }
  int n_y() const noexcept { return n_y_; }
  double h_y() const noexcept { return is_strip() ? 2.0 * half_width_ / n_y_ : 0.0; }

  double x(int j) const noexcept { return origin_hi_ + (origin_lo_ + j * h_); }
  double y(int k) const noexcept { return -half_width_ + k * h_y(); }
  double right_end() const noexcept { return x(n_x_); }
  double length() const noexcept { return n_x_ * h_; }

  // Samples per x-column: 1 for a line, n_y + 1 for a strip.
  std::size_t column_size() const noexcept { return is_strip() ? std::size_t(n_y_) + 1 : 1; }
  std::size_t size() const noexcept { return (std::size_t(n_x_) + 1) * column_size(); }
  std::size_t index(int j, int k = 0) const noexcept { return std::size_t(j) * column_size() + k; }

  // Same translation by `offset`; sample layout untouched.
  Grid shifted(double offset) const;

  // Grid with identical shape whose origin is given explicitly (hi + lo).
  Grid with_origin(double hi, double lo = 0.0) const;

  // Strip grid with the same x-discretization and n_y but a new half width.
  Grid with_half_width(double half_width) const;

  // e^{x_{j+1/2}} for cell j = 0..n_x-1 equals weight_scale() * base_weights()[j].
  // weight_scale() = e^{right_end()}; throws DomainTruncationError past kMaxRightEndpoint.
  double weight_scale() const;
  std::span<const double> base_weights() const noexcept { return *base_; }

  bool same_shape(const Grid& other) const noexcept;
  bool operator==(const Grid& other) const noexcept;

private:
  Grid() = default;
  void build_weights();

  Dimension dim_ = Dimension::line;
  double origin_hi_ = 0.0;
  double origin_lo_ = 0.0;
  double h_ = 0.0;
  int n_x_ = 0;
  double half_width_ = 0.0;
  int n_y_ = 0;
  std::shared_ptr<const std::vector<double>> base_;
};

// Samples of a function on a grid. Immutable value.
// 2D layout is x-major: samples[j * (n_y + 1) + k]; rows k = 0 and k = n_y are 0.
class Profile {
public:
  Profile(Grid grid, std::vector<double> samples);

  static Profile zeros(const Grid& grid);
  static Profile sample(const Grid& grid, const std::function<double(double)>& f);
  static Profile sample(const Grid& grid, const std::function<double(double, double)>& f);

  const Grid& grid() const noexcept { return grid_; }
  std::span<const double> samples() const noexcept { return samples_; }
  std::size_t size() const noexcept { return samples_.size(); }
  double operator[](std::size_t i) const noexcept { return samples_[i]; }
  double at(int j, int k = 0) const noexcept { return samples_[grid_.index(j, k)]; }

  // Copy of the sample vector, for building a modified profile.
  std::vector<double> copy_samples() const { return samples_; }
  Profile with_samples(std::vector<double> samples) const { return Profile(grid_, std::move(samples)); }

  double max() const;
  double min() const;
  double sup_norm() const;
  std::size_t argmax_last() const;  // largest index attaining the maximum

private:
  Grid grid_;
  std::vector<double> samples_;
};

// --- operations -----------------------------------------------------------

Profile shift_grid(const Profile& p, double offset);

// Linear (bilinear on a strip) interpolation onto `target`, which must have the
// same dimension and, for strips, the same half width. Outside the source x-range
// the edge column is continued as a constant.
Profile resample(const Profile& p, const Grid& target);

// Centered differences in x, second-order one-sided at j = 0 and j = n_x.
Profile diff_x(const Profile& p);

// Composite midpoint rule with weight e^x at cell midpoints; the integrand's
// midpoint value is the average of its corner samples.
double weighted_integral(const Profile& integrand);

double inner_l2exp(const Profile& u, const Profile& v);

// Gradient part of the weighted H^1 product: per cell, the product of the
// cross-cell differences (averaged over the two edges of a 2D cell).
double gradient_inner(const Profile& u, const Profile& v);

double inner_h1exp(const Profile& u, const Profile& v);
double norm_h1exp_sq(const Profile& u);

}  // namespace fhn
