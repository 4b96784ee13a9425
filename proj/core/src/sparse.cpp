#include "cvae/sparse.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>

#include "cvae/errors.hpp"

namespace cvae {

SparseBinaryMatrix::SparseBinaryMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), row_ptr_(rows + 1, 0) {
  if (cols > std::numeric_limits<Index>::max())
    throw ShapeError("column count exceeds index range");
}

SparseBinaryMatrix SparseBinaryMatrix::from_pairs(std::size_t rows, std::size_t cols,
                                                  std::vector<std::pair<Index, Index>> pairs) {
  SparseBinaryMatrix m(rows, cols);
  for (const auto& [r, c] : pairs)
    if (r >= rows || c >= cols)
      throw ShapeError("entry (" + std::to_string(r) + ", " + std::to_string(c) +
                       ") outside " + std::to_string(rows) + "x" + std::to_string(cols));
  std::sort(pairs.begin(), pairs.end());
  pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
  m.col_idx_.reserve(pairs.size());
  for (const auto& [r, c] : pairs) {
    ++m.row_ptr_[r + 1];
    m.col_idx_.push_back(c);
  }
  for (std::size_t r = 0; r < rows; ++r) m.row_ptr_[r + 1] += m.row_ptr_[r];
  return m;
}

SparseBinaryMatrix SparseBinaryMatrix::from_dense(std::size_t rows, std::size_t cols,
                                                  std::span<const double> row_major) {
  if (row_major.size() != rows * cols) throw ShapeError("dense buffer size mismatch");
  SparseBinaryMatrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c)
      if (row_major[r * cols + c] != 0.0) m.col_idx_.push_back(static_cast<Index>(c));
    m.row_ptr_[r + 1] = m.col_idx_.size();
  }
  return m;
}

std::span<const SparseBinaryMatrix::Index> SparseBinaryMatrix::row(std::size_t r) const {
  return std::span(col_idx_).subspan(row_ptr_[r], row_ptr_[r + 1] - row_ptr_[r]);
}

bool SparseBinaryMatrix::contains(std::size_t r, std::size_t c) const {
  auto rr = row(r);
  return std::binary_search(rr.begin(), rr.end(), static_cast<Index>(c));
}

std::vector<double> SparseBinaryMatrix::dense_row(std::size_t r) const {
  std::vector<double> out;
  dense_row_into(r, out);
  return out;
}

void SparseBinaryMatrix::dense_row_into(std::size_t r, std::vector<double>& out) const {
  out.assign(cols_, 0.0);
  for (Index c : row(r)) out[c] = 1.0;
}

SparseBinaryMatrix SparseBinaryMatrix::transpose() const {
  SparseBinaryMatrix t(cols_, rows_);
  for (Index c : col_idx_) ++t.row_ptr_[c + 1];
  for (std::size_t r = 0; r < cols_; ++r) t.row_ptr_[r + 1] += t.row_ptr_[r];
  t.col_idx_.resize(col_idx_.size());
  std::vector<std::size_t> cursor(t.row_ptr_.begin(), t.row_ptr_.end() - 1);
  for (std::size_t r = 0; r < rows_; ++r)
    for (Index c : row(r)) t.col_idx_[cursor[c]++] = static_cast<Index>(r);
  return t;
}

void write_sbm(std::ostream& out, const SparseBinaryMatrix& m) {
  out << "SBM1 " << m.rows() << ' ' << m.cols() << ' ' << m.nnz() << '\n';
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (auto c : m.row(r)) out << r << ' ' << c << '\n';
}

SparseBinaryMatrix read_sbm(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("missing SBM1 header", 1);
  std::istringstream header(line);
  std::string magic;
  std::size_t rows = 0, cols = 0, nnz = 0;
  if (!(header >> magic >> rows >> cols >> nnz) || magic != "SBM1")
    throw ParseError("bad SBM1 header", 1);

  std::vector<std::pair<SparseBinaryMatrix::Index, SparseBinaryMatrix::Index>> pairs;
  pairs.reserve(nnz);
  std::size_t lineno = 1;
  std::pair<std::size_t, std::size_t> prev{0, 0};
  while (pairs.size() < nnz && std::getline(in, line)) {
    ++lineno;
    std::istringstream ss(line);
    std::size_t r = 0, c = 0;
    std::string rest;
    if (!(ss >> r >> c) || (ss >> rest)) throw ParseError("expected 'row col'", lineno);
    if (r >= rows || c >= cols) throw ParseError("entry out of range", lineno);
    if (!pairs.empty() && std::pair{r, c} <= prev)
      throw ParseError("entries not strictly sorted", lineno);
    prev = {r, c};
    pairs.emplace_back(static_cast<SparseBinaryMatrix::Index>(r),
                       static_cast<SparseBinaryMatrix::Index>(c));
  }
  if (pairs.size() != nnz) throw ParseError("fewer entries than header nnz", lineno);
  return SparseBinaryMatrix::from_pairs(rows, cols, std::move(pairs));
}

void save_sbm(const std::filesystem::path& path, const SparseBinaryMatrix& m) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  write_sbm(out, m);
  if (!out) throw Error("write failed for " + path.string());
}

SparseBinaryMatrix load_sbm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  return read_sbm(in);
}

}  // namespace cvae
