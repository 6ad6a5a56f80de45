#include "sine_transform.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <vector>

#include "fhnpulse/errors.hpp"

namespace fhn::detail {

namespace {

// FFTW's planner is not reentrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

struct ColumnSineTransform::Impl {
  fftw_plan p = nullptr;
};

ColumnSineTransform::ColumnSineTransform(int columns, int n_y) : impl_(std::make_unique<Impl>()) {
  if (columns < 1 || n_y < 2) throw InvalidArgument("sine transform needs n_y >= 2");
  const int len = n_y - 1;
  const int dist = n_y + 1;
  std::vector<double> scratch(std::size_t(columns) * dist + 1, 0.0);
  std::lock_guard lock(planner_mutex());
  fftw_r2r_kind kind = FFTW_RODFT00;
  impl_->p = fftw_plan_many_r2r(1, &len, columns, scratch.data() + 1, nullptr, 1, dist,
                                scratch.data() + 1, nullptr, 1, dist, &kind,
                                FFTW_ESTIMATE | FFTW_UNALIGNED);
  if (!impl_->p) throw SolverFailure(INFINITY, "could not create sine transform plan");
}

ColumnSineTransform::~ColumnSineTransform() {
  if (impl_ && impl_->p) {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(impl_->p);
  }
}

void ColumnSineTransform::apply(double* data) const { fftw_execute_r2r(impl_->p, data + 1, data + 1); }

}  // namespace fhn::detail
