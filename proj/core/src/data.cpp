#include "cvae/data.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <istream>
#include <numeric>

#include "cvae/errors.hpp"
#include "cvae/rng.hpp"

namespace cvae {

namespace {

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  return in;
}

void strip_cr(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

std::uint32_t intern(const std::string& token, std::vector<std::string>& ids,
                     std::unordered_map<std::string, std::uint32_t>& index) {
  auto [it, inserted] = index.try_emplace(token, static_cast<std::uint32_t>(ids.size()));
  if (inserted) ids.push_back(token);
  return it->second;
}

}  // namespace

SparseBinaryMatrix RatingsData::binarize() const {
  std::vector<std::pair<SparseBinaryMatrix::Index, SparseBinaryMatrix::Index>> pairs(
      interactions.begin(), interactions.end());
  return SparseBinaryMatrix::from_pairs(users(), items(), std::move(pairs));
}

RatingsData parse_ratings(std::istream& in) {
  RatingsData data;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    strip_cr(line);
    if (line.empty() || line.front() == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) throw ParseError("expected user<TAB>item", lineno);
    const auto tab2 = line.find('\t', tab + 1);
    std::string user = line.substr(0, tab);
    std::string item = line.substr(tab + 1, tab2 == std::string::npos ? std::string::npos
                                                                      : tab2 - tab - 1);
    if (user.empty() || item.empty()) throw ParseError("empty user or item token", lineno);
    const auto u = intern(user, data.user_ids, data.user_index);
    const auto i = intern(item, data.item_ids, data.item_index);
    data.interactions.emplace_back(u, i);
  }
  if (data.interactions.empty()) throw DataError("ratings input contains no interactions");
  return data;
}

RatingsData parse_ratings(const std::filesystem::path& path) {
  auto in = open_input(path);
  return parse_ratings(in);
}

std::vector<std::string> parse_reviews(
    std::istream& in, const std::unordered_map<std::string, std::uint32_t>& item_index) {
  std::vector<std::string> corpus(item_index.size());
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    strip_cr(line);
    if (line.empty() || line.front() == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0) throw ParseError("expected item<TAB>text", lineno);
    auto it = item_index.find(line.substr(0, tab));
    if (it == item_index.end()) continue;
    std::string& doc = corpus[it->second];
    if (!doc.empty()) doc += ' ';
    doc.append(line, tab + 1, std::string::npos);
  }
  return corpus;
}

std::vector<std::string> parse_reviews(
    const std::filesystem::path& path,
    const std::unordered_map<std::string, std::uint32_t>& item_index) {
  auto in = open_input(path);
  return parse_reviews(in, item_index);
}

std::set<std::string> parse_stopwords(std::istream& in) {
  std::set<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    strip_cr(line);
    auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    auto last = line.find_last_not_of(" \t");
    std::string w = line.substr(first, last - first + 1);
    for (char& c : w) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    words.insert(std::move(w));
  }
  return words;
}

std::set<std::string> parse_stopwords(const std::filesystem::path& path) {
  auto in = open_input(path);
  return parse_stopwords(in);
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  auto is_alpha = [](unsigned char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); };
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (is_alpha(c)) {
      current.push_back(static_cast<char>(std::tolower(c)));
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

Vocabulary build_vocabulary(const std::vector<std::string>& corpus,
                            const std::set<std::string>& stopwords, std::size_t min_df) {
  if (corpus.empty()) throw DataError("empty corpus");
  std::unordered_map<std::string, std::size_t> df;
  for (const auto& doc : corpus) {
    auto tokens = tokenize(doc);
    std::sort(tokens.begin(), tokens.end());
    tokens.erase(std::unique(tokens.begin(), tokens.end()), tokens.end());
    for (auto& t : tokens)
      if (!stopwords.contains(t)) ++df[t];
  }

  Vocabulary vocab;
  vocab.stopwords = stopwords;
  for (const auto& [term, count] : df)
    if (count >= min_df) vocab.terms.push_back(term);
  if (vocab.terms.empty()) throw DataError("vocabulary is empty after filtering");
  std::sort(vocab.terms.begin(), vocab.terms.end());
  for (std::size_t i = 0; i < vocab.terms.size(); ++i)
    vocab.index.emplace(vocab.terms[i], static_cast<std::uint32_t>(i));
  return vocab;
}

SparseBinaryMatrix vectorize_items(const std::vector<std::string>& corpus,
                                   const Vocabulary& vocab) {
  std::vector<std::pair<SparseBinaryMatrix::Index, SparseBinaryMatrix::Index>> pairs;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    for (const auto& token : tokenize(corpus[i])) {
      auto it = vocab.index.find(token);
      if (it != vocab.index.end())
        pairs.emplace_back(static_cast<SparseBinaryMatrix::Index>(i), it->second);
    }
  }
  return SparseBinaryMatrix::from_pairs(corpus.size(), vocab.size(), std::move(pairs));
}

SplitDataset split_per_user(const SparseBinaryMatrix& ratings, std::uint64_t seed) {
  using Pair = std::pair<SparseBinaryMatrix::Index, SparseBinaryMatrix::Index>;
  std::vector<Pair> train, valid, test;
  train.reserve(ratings.nnz());
  auto rng = make_rng(seed, Stream::split);

  std::vector<SparseBinaryMatrix::Index> items;
  for (std::size_t u = 0; u < ratings.rows(); ++u) {
    auto row = ratings.row(u);
    const auto user = static_cast<SparseBinaryMatrix::Index>(u);
    const std::size_t deg = row.size();
    const std::size_t held = deg < min_degree_for_holdout ? 0 : deg / 10;
    items.assign(row.begin(), row.end());
    if (held > 0) std::shuffle(items.begin(), items.end(), rng);
    for (std::size_t p = 0; p < deg; ++p) {
      if (p < held)
        valid.emplace_back(user, items[p]);
      else if (p < 2 * held)
        test.emplace_back(user, items[p]);
      else
        train.emplace_back(user, items[p]);
    }
  }
  const auto rows = ratings.rows(), cols = ratings.cols();
  return SplitDataset{SparseBinaryMatrix::from_pairs(rows, cols, std::move(train)),
                      SparseBinaryMatrix::from_pairs(rows, cols, std::move(valid)),
                      SparseBinaryMatrix::from_pairs(rows, cols, std::move(test)), seed};
}

SparseBinaryMatrix sparsify_rows(const SparseBinaryMatrix& m, std::size_t keep,
                                 std::uint64_t seed) {
  auto rng = make_rng(seed, Stream::sparsify);
  std::vector<std::pair<SparseBinaryMatrix::Index, SparseBinaryMatrix::Index>> pairs;
  std::vector<SparseBinaryMatrix::Index> items;
  for (std::size_t r = 0; r < m.rows(); ++r) {
    auto row = m.row(r);
    items.assign(row.begin(), row.end());
    if (items.size() > keep) {
      std::shuffle(items.begin(), items.end(), rng);
      items.resize(keep);
    }
    for (auto c : items) pairs.emplace_back(static_cast<SparseBinaryMatrix::Index>(r), c);
  }
  return SparseBinaryMatrix::from_pairs(m.rows(), m.cols(), std::move(pairs));
}

}  // namespace cvae
