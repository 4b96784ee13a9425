#include <sstream>

#include "cvae/data.hpp"
#include "cvae/errors.hpp"
#include "doctest.h"

using namespace cvae;

namespace {

SparseBinaryMatrix dense(std::size_t r, std::size_t c, std::vector<double> v) {
  return SparseBinaryMatrix::from_dense(r, c, v);
}

}  // namespace

TEST_CASE("parse_ratings: reindexing, duplicates and extra fields") {
  std::istringstream in("# header\nu1\ti1\nu1\ti2\t5\t123\n\nu2\ti2\r\nu1\ti1\n");
  auto r = parse_ratings(in);
  CHECK(r.users() == 2);
  CHECK(r.items() == 2);
  CHECK(r.user_ids == std::vector<std::string>{"u1", "u2"});
  CHECK(r.item_ids == std::vector<std::string>{"i1", "i2"});
  CHECK(r.interactions.size() == 4);
  auto y = r.binarize();
  CHECK(y.nnz() == 3);
  CHECK(y.contains(0, 0));
  CHECK(y.contains(0, 1));
  CHECK(y.contains(1, 1));
}

TEST_CASE("parse_ratings: two lines give m=1 n=2 nnz=2") {
  std::istringstream in("u1\ti1\nu1\ti2\n");
  auto y = parse_ratings(in).binarize();
  CHECK(y.rows() == 1);
  CHECK(y.cols() == 2);
  CHECK(y.nnz() == 2);
}

TEST_CASE("parse_ratings: duplicate line collapses to a single entry") {
  std::istringstream in("u1\ti1\nu1\ti1\n");
  auto y = parse_ratings(in).binarize();
  CHECK(y.nnz() == 1);
}

TEST_CASE("parse_ratings: errors") {
  std::istringstream bad("u1\ti1\nu2 i2\n");
  try {
    parse_ratings(bad);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
  std::istringstream empty_tok("\ti1\n");
  CHECK_THROWS_AS(parse_ratings(empty_tok), ParseError);
  std::istringstream empty("# only a comment\n\n");
  CHECK_THROWS_AS(parse_ratings(empty), DataError);
}

TEST_CASE("binarization is idempotent") {
  std::istringstream in("a\tx\nb\ty\na\ty\na\tx\n");
  auto y = parse_ratings(in).binarize();
  std::vector<std::pair<SparseBinaryMatrix::Index, SparseBinaryMatrix::Index>> pairs;
  for (std::size_t r = 0; r < y.rows(); ++r)
    for (auto c : y.row(r)) pairs.emplace_back(static_cast<SparseBinaryMatrix::Index>(r), c);
  auto twice = pairs;
  twice.insert(twice.end(), pairs.begin(), pairs.end());
  CHECK(SparseBinaryMatrix::from_pairs(y.rows(), y.cols(), twice) == y);
}

TEST_CASE("parse_reviews concatenates per item and ignores unknown items") {
  std::unordered_map<std::string, std::uint32_t> idx{{"i1", 0}, {"i2", 1}, {"i3", 2}};
  std::istringstream in("i1\tGood game\ni9\tunknown\ni1\tfun, really\ni2\tmeh\n");
  auto corpus = parse_reviews(in, idx);
  REQUIRE(corpus.size() == 3);
  CHECK(corpus[0] == "Good game fun, really");
  CHECK(corpus[1] == "meh");
  CHECK(corpus[2].empty());
  std::istringstream bad("no tab here\n");
  CHECK_THROWS_AS(parse_reviews(bad, idx), ParseError);
}

TEST_CASE("tokenize: lowercased alphabetic runs") {
  CHECK(tokenize("Good game!! 10/10, would-play") ==
        std::vector<std::string>{"good", "game", "would", "play"});
  CHECK(tokenize("").empty());
  CHECK(tokenize("caf\xc3\xa9 ok") == std::vector<std::string>{"caf", "ok"});
}

TEST_CASE("build_vocabulary: hand-tokenized examples") {
  std::vector<std::string> corpus{"Good game", "good fun"};
  auto v = build_vocabulary(corpus, {}, 1);
  CHECK(v.terms == std::vector<std::string>{"fun", "game", "good"});
  CHECK(v.size() == 3);
  CHECK(v.index.at("good") == 2);

  auto s = build_vocabulary(corpus, {"good"}, 1);
  CHECK(s.terms == std::vector<std::string>{"fun", "game"});

  auto df2 = build_vocabulary(corpus, {}, 2);
  CHECK(df2.terms == std::vector<std::string>{"good"});

  CHECK_THROWS_AS(build_vocabulary({}, {}, 1), DataError);
  CHECK_THROWS_AS(build_vocabulary({"", "..."}, {}, 1), DataError);
}

TEST_CASE("build_vocabulary is deterministic") {
  std::vector<std::string> corpus{"zeta alpha beta", "beta gamma", "alpha delta zeta"};
  auto a = build_vocabulary(corpus, {"gamma"}, 1);
  auto b = build_vocabulary(corpus, {"gamma"}, 1);
  CHECK(a.terms == b.terms);
  CHECK(a.terms == std::vector<std::string>{"alpha", "beta", "delta", "zeta"});
}

TEST_CASE("parse_stopwords lowercases and skips blanks") {
  std::istringstream in("The\n\n  and \n# comment\nA\r\n");
  auto s = parse_stopwords(in);
  CHECK(s == std::set<std::string>{"the", "and", "a"});
}

TEST_CASE("vectorize_items: binary presence") {
  std::vector<std::string> corpus{"good game good", "good fun", ""};
  auto v = build_vocabulary(corpus, {}, 1);
  auto x = vectorize_items(corpus, v);
  CHECK(x == dense(3, 3, {0, 1, 1, 1, 0, 1, 0, 0, 0}));
}

TEST_CASE("split_per_user: ratio and floor rules") {
  std::vector<double> d(3 * 20, 0.0);
  for (int i = 0; i < 10; ++i) d[i] = 1;       // user 0: 10 positives
  for (int i = 0; i < 2; ++i) d[20 + i] = 1;   // user 1: 2 positives
  for (int i = 0; i < 20; ++i) d[40 + i] = 1;  // user 2: 20 positives
  auto y = SparseBinaryMatrix::from_dense(3, 20, d);
  auto s = split_per_user(y, 11);
  CHECK(s.train.row_degree(0) == 8);
  CHECK(s.valid.row_degree(0) == 1);
  CHECK(s.test.row_degree(0) == 1);
  CHECK(s.train.row_degree(1) == 2);
  CHECK(s.valid.row_degree(1) == 0);
  CHECK(s.test.row_degree(1) == 0);
  CHECK(s.train.row_degree(2) == 16);
  CHECK(s.valid.row_degree(2) == 2);
  CHECK(s.test.row_degree(2) == 2);
  CHECK(s.train.nnz() + s.valid.nnz() + s.test.nnz() == y.nnz());
  CHECK(split_per_user(y, 11) == split_per_user(y, 11));
}

TEST_CASE("split_per_user: different seeds hold out different items") {
  std::vector<double> d(200, 1.0);
  auto y = SparseBinaryMatrix::from_dense(1, 200, d);
  auto a = split_per_user(y, 1);
  auto b = split_per_user(y, 2);
  CHECK(a.test.nnz() == 20);
  CHECK(a.test != b.test);
}

TEST_CASE("sparsify_rows keeps a subset of at most k per row") {
  std::vector<double> d(2 * 10, 0.0);
  for (int i = 0; i < 10; ++i) d[i] = 1;
  d[12] = 1;
  auto m = SparseBinaryMatrix::from_dense(2, 10, d);
  auto s = sparsify_rows(m, 3, 5);
  CHECK(s.row_degree(0) == 3);
  CHECK(s.row_degree(1) == 1);
  for (std::size_t r = 0; r < 2; ++r)
    for (auto c : s.row(r)) CHECK(m.contains(r, c));
}

TEST_CASE("column_samples: transpose of X") {
  auto x = dense(2, 3, {0, 1, 1, 1, 0, 1});
  auto cols = column_samples(x);
  REQUIRE(cols.size() == 3);
  CHECK(cols[0] == std::vector<double>{0, 1});
  CHECK(cols[1] == std::vector<double>{1, 0});
  CHECK(cols[2] == std::vector<double>{1, 1});

  std::vector<double> stacked;
  for (auto sample : cols) stacked.insert(stacked.end(), sample.begin(), sample.end());
  CHECK(SparseBinaryMatrix::from_dense(3, 2, stacked) == x.transpose());

  auto zero = SparseBinaryMatrix(4, 5);
  std::size_t count = 0;
  for (auto sample : column_samples(zero)) {
    CHECK(sample == std::vector<double>(4, 0.0));
    ++count;
  }
  CHECK(count == 5);
}

TEST_CASE("SBM1 cache round-trips and rejects malformed input") {
  auto x = dense(3, 4, {1, 0, 0, 1, 0, 0, 0, 0, 0, 1, 1, 0});
  std::stringstream ss;
  write_sbm(ss, x);
  CHECK(ss.str() == "SBM1 3 4 4\n0 0\n0 3\n2 1\n2 2\n");
  CHECK(read_sbm(ss) == x);

  std::istringstream bad_magic("SBM2 1 1 0\n");
  CHECK_THROWS_AS(read_sbm(bad_magic), ParseError);
  std::istringstream unsorted("SBM1 2 2 2\n1 0\n0 1\n");
  CHECK_THROWS_AS(read_sbm(unsorted), ParseError);
  std::istringstream range("SBM1 2 2 1\n2 0\n");
  CHECK_THROWS_AS(read_sbm(range), ParseError);
  std::istringstream short_body("SBM1 2 2 2\n0 0\n");
  CHECK_THROWS_AS(read_sbm(short_body), ParseError);
}

TEST_CASE("SparseBinaryMatrix invariants") {
  auto m = SparseBinaryMatrix::from_pairs(3, 5, {{2, 4}, {0, 3}, {0, 1}, {0, 3}});
  CHECK(m.nnz() == 3);
  CHECK(m.row_ptr().back() == m.nnz());
  for (std::size_t r = 0; r < m.rows(); ++r) {
    auto row = m.row(r);
    for (std::size_t i = 1; i < row.size(); ++i) CHECK(row[i - 1] < row[i]);
  }
  CHECK(m.transpose().transpose() == m);
  CHECK_THROWS_AS(SparseBinaryMatrix::from_pairs(2, 2, {{0, 2}}), ShapeError);
}
