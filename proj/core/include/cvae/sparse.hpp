#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

namespace cvae {

/// Row-compressed 0/1 matrix storing only the positions of its ones.
/// Column indices are strictly increasing within each row.
class SparseBinaryMatrix {
 public:
  using Index = std::uint32_t;

  SparseBinaryMatrix() : row_ptr_(1, 0) {}
  SparseBinaryMatrix(std::size_t rows, std::size_t cols);

  /// Builds from (row, col) pairs in any order; duplicates collapse to a
  /// single one. Throws ShapeError for out-of-range coordinates.
  static SparseBinaryMatrix from_pairs(std::size_t rows, std::size_t cols,
                                       std::vector<std::pair<Index, Index>> pairs);

  /// Entries != 0 become ones.
  static SparseBinaryMatrix from_dense(std::size_t rows, std::size_t cols,
                                       std::span<const double> row_major);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t nnz() const { return col_idx_.size(); }

  std::span<const Index> row(std::size_t r) const;
  std::size_t row_degree(std::size_t r) const { return row_ptr_[r + 1] - row_ptr_[r]; }
  bool contains(std::size_t r, std::size_t c) const;

  /// Row as a dense 0/1 vector of length cols().
  std::vector<double> dense_row(std::size_t r) const;
  void dense_row_into(std::size_t r, std::vector<double>& out) const;

  SparseBinaryMatrix transpose() const;

  const std::vector<std::size_t>& row_ptr() const { return row_ptr_; }
  const std::vector<Index>& col_idx() const { return col_idx_; }

  bool operator==(const SparseBinaryMatrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::size_t> row_ptr_;
  std::vector<Index> col_idx_;
};

/// Portable text cache: header `SBM1 rows cols nnz`, then one `row col`
/// line per one-entry in row-major order.
void write_sbm(std::ostream& out, const SparseBinaryMatrix& m);
SparseBinaryMatrix read_sbm(std::istream& in);
void save_sbm(const std::filesystem::path& path, const SparseBinaryMatrix& m);
SparseBinaryMatrix load_sbm(const std::filesystem::path& path);

}  // namespace cvae
