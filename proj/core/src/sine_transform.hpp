#pragma once

#include <memory>

namespace fhn::detail {

// In-place DST-I along the y index of every column of an x-major strip array.
// `data` points at the first sample (row k = 0); rows 0 and n_y are skipped.
// Applying it twice multiplies by 2 n_y.
class ColumnSineTransform {
public:
  ColumnSineTransform(int columns, int n_y);
  ~ColumnSineTransform();
  ColumnSineTransform(const ColumnSineTransform&) = delete;
  ColumnSineTransform& operator=(const ColumnSineTransform&) = delete;

  void apply(double* data) const;

private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace fhn::detail
