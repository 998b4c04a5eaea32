#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace mscan {

using Index = std::size_t;
using IndexSet = std::vector<Index>;

/// Dense row-major observation matrix with finite entries.
class DataMatrix {
 public:
  DataMatrix() = default;

  DataMatrix(Index rows, Index cols, double fill = 0.0)
      : rows_(rows), cols_(cols), values_(checked_size(rows, cols), fill) {}

  DataMatrix(Index rows, Index cols, std::vector<double> values)
      : rows_(rows), cols_(cols), values_(std::move(values)) {
    if (values_.size() != checked_size(rows, cols)) {
      throw std::invalid_argument("DataMatrix: value count does not match " +
                                  std::to_string(rows) + "x" +
                                  std::to_string(cols));
    }
    for (double v : values_) {
      if (!std::isfinite(v)) {
        throw std::invalid_argument("DataMatrix: non-finite entry");
      }
    }
  }

  static DataMatrix from_rows(const std::vector<std::vector<double>>& rows) {
    if (rows.empty()) throw std::invalid_argument("DataMatrix: no rows");
    const Index n = rows.front().size();
    std::vector<double> values;
    values.reserve(rows.size() * n);
    for (const auto& r : rows) {
      if (r.size() != n) throw std::invalid_argument("DataMatrix: ragged rows");
      values.insert(values.end(), r.begin(), r.end());
    }
    return DataMatrix(rows.size(), n, std::move(values));
  }

  Index rows() const noexcept { return rows_; }
  Index cols() const noexcept { return cols_; }

  double operator()(Index i, Index j) const noexcept { return values_[i * cols_ + j]; }
  double& operator()(Index i, Index j) noexcept { return values_[i * cols_ + j]; }

  std::span<const double> row(Index i) const noexcept {
    return {values_.data() + i * cols_, cols_};
  }
  std::span<double> row(Index i) noexcept { return {values_.data() + i * cols_, cols_}; }

  std::span<const double> values() const noexcept { return values_; }

  DataMatrix transposed() const {
    DataMatrix t(cols_, rows_);
    for (Index i = 0; i < rows_; ++i)
      for (Index j = 0; j < cols_; ++j) t.values_[j * rows_ + i] = values_[i * cols_ + j];
    return t;
  }

  DataMatrix scaled(double c) const {
    DataMatrix out = *this;
    for (double& v : out.values_) v *= c;
    return out;
  }

  DataMatrix shifted(double c) const {
    DataMatrix out = *this;
    for (double& v : out.values_) v += c;
    return out;
  }

  friend bool operator==(const DataMatrix&, const DataMatrix&) = default;

 private:
  static Index checked_size(Index rows, Index cols) {
    if (rows == 0 || cols == 0) {
      throw std::invalid_argument("DataMatrix: dimensions must be positive");
    }
    return rows * cols;
  }

  Index rows_ = 0;
  Index cols_ = 0;
  std::vector<double> values_;
};

/// Row and column index sets of a candidate submatrix. Both sorted, unique, nonempty.
struct Selection {
  IndexSet rows;
  IndexSet cols;

  Index height() const noexcept { return rows.size(); }
  Index width() const noexcept { return cols.size(); }

  friend bool operator==(const Selection&, const Selection&) = default;
  friend auto operator<=>(const Selection&, const Selection&) = default;
};

inline bool is_strictly_increasing(const IndexSet& s) {
  return std::adjacent_find(s.begin(), s.end(), std::greater_equal<>{}) == s.end();
}

inline bool is_valid(const Selection& s, Index M, Index N) {
  return !s.rows.empty() && !s.cols.empty() && is_strictly_increasing(s.rows) &&
         is_strictly_increasing(s.cols) && s.rows.back() < M && s.cols.back() < N;
}

inline void validate(const Selection& s, Index M, Index N) {
  if (!is_valid(s, M, N)) {
    throw std::domain_error("selection is empty, unsorted, or out of bounds for a " +
                            std::to_string(M) + "x" + std::to_string(N) + " matrix");
  }
}

/// [0, k)
inline IndexSet first_indices(Index k) {
  IndexSet s(k);
  for (Index i = 0; i < k; ++i) s[i] = i;
  return s;
}

struct ScanResult {
  Selection selection;
  double objective = 0.0;
  Index iterations = 0;
  Index restarts_used = 0;
};

}  // namespace mscan
