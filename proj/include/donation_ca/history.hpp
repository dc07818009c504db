#pragma once

#include <cassert>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace donation_ca {

/// Dense row-major matrix.
template <typename T>
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, T fill = T{})
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  T& operator()(std::size_t r, std::size_t c) {
    assert(r < rows_ && c < cols_);
    return data_[r * cols_ + c];
  }
  const T& operator()(std::size_t r, std::size_t c) const {
    assert(r < rows_ && c < cols_);
    return data_[r * cols_ + c];
  }

  std::span<T> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const T> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  /// Appends a row; cols must match (or the matrix must be empty).
  void push_row(std::span<const T> values) {
    if (rows_ == 0 && cols_ == 0) cols_ = values.size();
    assert(values.size() == cols_);
    data_.insert(data_.end(), values.begin(), values.end());
    ++rows_;
  }

  void reserve_rows(std::size_t rows) { data_.reserve(rows * cols_); }

  const std::vector<T>& data() const { return data_; }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

/// Record of one run.
///
/// site_matrix and agent_states have steps+1 rows (row 0 is the initial
/// configuration); received and donated have one row per step. Columns of
/// site_matrix are grid positions, columns of the other three are agent ids.
struct History {
  Matrix<std::uint8_t> site_matrix;
  Matrix<std::uint8_t> agent_states;
  Matrix<double> received;
  Matrix<std::uint8_t> donated;

  std::size_t agents() const { return site_matrix.cols(); }
  std::size_t steps() const { return received.rows(); }

  friend bool operator==(const History&, const History&) = default;
};

}  // namespace donation_ca
