#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "cvae/sparse.hpp"

namespace cvae {

/// Interactions read from a ratings file, with users and items reindexed
/// densely in first-appearance order.
struct RatingsData {
  std::vector<std::string> user_ids;
  std::vector<std::string> item_ids;
  std::unordered_map<std::string, std::uint32_t> user_index;
  std::unordered_map<std::string, std::uint32_t> item_index;
  /// (user, item) per accepted line, duplicates included.
  std::vector<std::pair<std::uint32_t, std::uint32_t>> interactions;

  std::size_t users() const { return user_ids.size(); }
  std::size_t items() const { return item_ids.size(); }

  /// Binary users x items matrix; repeated interactions collapse to one.
  SparseBinaryMatrix binarize() const;
};

/// Parses `user<TAB>item[<TAB>...]` lines. `#` comment lines and blank
/// lines are skipped. Throws ParseError with the line number on a malformed
/// line, DataError when no interactions were read.
RatingsData parse_ratings(std::istream& in);
RatingsData parse_ratings(const std::filesystem::path& path);

/// Parses `item<TAB>text` lines into one document per known item (indexed by
/// `item_index`); repeated items are joined with a space. Items not in the
/// index are ignored, items without reviews get an empty document.
std::vector<std::string> parse_reviews(
    std::istream& in, const std::unordered_map<std::string, std::uint32_t>& item_index);
std::vector<std::string> parse_reviews(
    const std::filesystem::path& path,
    const std::unordered_map<std::string, std::uint32_t>& item_index);

/// One lowercased token per non-empty, non-comment line.
std::set<std::string> parse_stopwords(std::istream& in);
std::set<std::string> parse_stopwords(const std::filesystem::path& path);

/// Lowercased maximal runs of ASCII letters; every other byte separates.
std::vector<std::string> tokenize(std::string_view text);

struct Vocabulary {
  std::vector<std::string> terms;
  std::unordered_map<std::string, std::uint32_t> index;
  std::set<std::string> stopwords;

  std::size_t size() const { return terms.size(); }
};

/// Terms sorted lexicographically after stopword removal and a document
/// frequency cut (`df >= min_df`). Throws DataError if the corpus or the
/// resulting vocabulary is empty.
Vocabulary build_vocabulary(const std::vector<std::string>& corpus,
                            const std::set<std::string>& stopwords, std::size_t min_df);

/// Items x terms presence matrix.
SparseBinaryMatrix vectorize_items(const std::vector<std::string>& corpus,
                                   const Vocabulary& vocab);

struct SplitDataset {
  SparseBinaryMatrix train;
  SparseBinaryMatrix valid;
  SparseBinaryMatrix test;
  std::uint64_t seed = 0;

  bool operator==(const SplitDataset&) const = default;
};

/// Users with at least `min_degree_for_holdout` positives send
/// floor(deg / 10) positives to validation and as many to test, drawn
/// uniformly without replacement; everything else stays in train.
inline constexpr std::size_t min_degree_for_holdout = 3;
SplitDataset split_per_user(const SparseBinaryMatrix& ratings, std::uint64_t seed);

/// Keeps at most `keep` uniformly chosen ones per row.
SparseBinaryMatrix sparsify_rows(const SparseBinaryMatrix& m, std::size_t keep,
                                 std::uint64_t seed);

/// The columns of an n x d matrix X as dense length-n 0/1 vectors, in
/// column order. These are the side-information samples fed to the shared
/// network.
class ColumnSamples {
 public:
  explicit ColumnSamples(const SparseBinaryMatrix& x) : transposed_(x.transpose()) {}

  std::size_t size() const { return transposed_.rows(); }
  std::size_t sample_width() const { return transposed_.cols(); }
  std::vector<double> operator[](std::size_t j) const { return transposed_.dense_row(j); }
  /// Rows of X^T, i.e. the samples in sparse form.
  const SparseBinaryMatrix& as_rows() const { return transposed_; }

  class iterator {
   public:
    using value_type = std::vector<double>;
    using difference_type = std::ptrdiff_t;

    iterator() = default;
    iterator(const ColumnSamples* owner, std::size_t pos) : owner_(owner), pos_(pos) {}
    value_type operator*() const { return (*owner_)[pos_]; }
    iterator& operator++() {
      ++pos_;
      return *this;
    }
    iterator operator++(int) {
      auto copy = *this;
      ++pos_;
      return copy;
    }
    bool operator==(const iterator&) const = default;

   private:
    const ColumnSamples* owner_ = nullptr;
    std::size_t pos_ = 0;
  };

  iterator begin() const { return {this, 0}; }
  iterator end() const { return {this, size()}; }

 private:
  SparseBinaryMatrix transposed_;
};

inline ColumnSamples column_samples(const SparseBinaryMatrix& x) { return ColumnSamples(x); }

}  // namespace cvae
