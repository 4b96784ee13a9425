#include <sstream>

#include "cvae/errors.hpp"
#include "cvae/trainer.hpp"
#include "doctest.h"

using namespace cvae;

namespace {

// n=12 items in 3 blocks of 4; d=20 features, block j owns features
// [j*7, j*7+6) (block 2 gets the last 6).
SparseBinaryMatrix block_features() {
  std::vector<std::pair<SparseBinaryMatrix::Index, SparseBinaryMatrix::Index>> pairs;
  for (unsigned i = 0; i < 12; ++i) {
    const unsigned b = i / 4;
    for (unsigned f = b * 7; f < std::min(20u, b * 7 + 7); ++f)
      if ((i + f) % 3 != 0) pairs.emplace_back(i, f);
  }
  return SparseBinaryMatrix::from_pairs(12, 20, pairs);
}

// m=8 users over the same 12 items, each user likes most of one block plus
// a stray item.
SparseBinaryMatrix toy_ratings() {
  std::vector<std::pair<SparseBinaryMatrix::Index, SparseBinaryMatrix::Index>> pairs;
  for (unsigned u = 0; u < 8; ++u) {
    const unsigned b = u % 3;
    for (unsigned i = b * 4; i < b * 4 + 4; ++i)
      if ((i + u) % 4 != 0) pairs.emplace_back(u, i);
    pairs.emplace_back(u, (u * 5 + 1) % 12);
  }
  return SparseBinaryMatrix::from_pairs(8, 12, pairs);
}

TrainConfig small_config() {
  TrainConfig c;
  c.model.k = 3;
  c.model.encoder_widths = {8};
  c.model.decoder_widths = {8};
  c.model.alpha = 2.0;
  c.batch_size = 5;
  c.optimizer.learning_rate = 5e-3;
  c.seed = 7;
  c.epochs_pretrain = 20;
  c.epochs_refine = 20;
  return c;
}

}  // namespace

TEST_CASE("pretrain with zero epochs returns the seeded initialization") {
  auto c = small_config();
  c.epochs_pretrain = 0;
  auto r = pretrain(block_features(), c);
  CHECK(r.params == initial_params(12, c));
  CHECK(r.run.log.empty());
  CHECK(r.run.phase == Phase::pretrain);
}

TEST_CASE("pretrain improves its objective on block-structured features") {
  auto c = small_config();
  c.epochs_pretrain = 300;
  auto r = pretrain(block_features(), c);
  REQUIRE(r.run.log.size() == 300);
  const double first = r.run.log.front().objective;
  double tail = 0.0;
  for (std::size_t e = 270; e < 300; ++e) tail += r.run.log[e].objective;
  tail /= 30.0;
  CHECK(r.run.log.back().objective > first);
  CHECK(tail >= first);
  for (const auto& rec : r.run.log) CHECK(std::isfinite(rec.objective));
}

TEST_CASE("training is deterministic for a fixed seed") {
  auto c = small_config();
  auto a = train_cvae(block_features(), toy_ratings(), c);
  auto b = train_cvae(block_features(), toy_ratings(), c);
  CHECK(a.params == b.params);
  auto c2 = c;
  c2.seed = 8;
  CHECK(!(train_cvae(block_features(), toy_ratings(), c2).params == a.params));
}

TEST_CASE("refine with zero epochs leaves parameters unchanged") {
  auto c = small_config();
  c.epochs_refine = 0;
  auto p = initial_params(12, c);
  auto r = refine(p, toy_ratings(), c);
  CHECK(r.params == p);
}

TEST_CASE("phase beta is exactly the configured per-phase value") {
  auto c = small_config();
  c.beta_pre = 0.3;
  c.beta_refine = 2.5;
  auto r = train_cvae(block_features(), toy_ratings(), c);
  CHECK(r.pretrain_run->beta == 0.3);
  CHECK(r.refine_run->beta == 2.5);
  CHECK(c.phase_model(Phase::pretrain).beta == 0.3);
  CHECK(c.phase_model(Phase::refine).beta == 2.5);
}

TEST_CASE("train_cvae composes pretrain and refine; baselines are its special cases") {
  auto c = small_config();
  const auto x = block_features();
  const auto y = toy_ratings();
  auto full = train_cvae(x, y, c);
  auto composed = refine(pretrain(x, c).params, y, c);
  CHECK(full.params == composed.params);

  auto fc = c;
  fc.epochs_refine = 0;
  CHECK(train_cvae(x, y, fc).params == train_method(Method::fvae, x, y, c).params);

  auto rc = c;
  rc.epochs_pretrain = 0;
  auto rvae = train_method(Method::rvae, x, y, c);
  CHECK(train_cvae(x, y, rc).params == rvae.params);
  CHECK(rvae.params == refine(initial_params(12, c), y, c).params);
  CHECK(!rvae.pretrain_run.has_value());
  CHECK(!train_method(Method::fvae, x, y, c).refine_run.has_value());
}

TEST_CASE("trainer errors") {
  auto c = small_config();
  CHECK_THROWS_AS(train_cvae(SparseBinaryMatrix(5, 20), toy_ratings(), c), ShapeError);
  c.batch_size = 0;
  CHECK_THROWS_AS(pretrain(block_features(), c), DomainError);

  auto ok = small_config();
  auto broken = initial_params(12, ok);
  broken.encoder.layers.back().bias[ok.model.k] = 1e6;  // sigma overflows
  try {
    refine(broken, toy_ratings(), ok);
    FAIL("expected DivergenceError");
  } catch (const DivergenceError& e) {
    CHECK(e.epoch() == 1);
  }
  CHECK(parse_method("rvae") == Method::rvae);
  CHECK_THROWS_AS(parse_method("slim"), DomainError);
}

TEST_CASE("epoch log format") {
  TrainRun run;
  run.log = {{1, -2.5}, {2, -1.25}};
  std::ostringstream out;
  write_epoch_log(out, run);
  CHECK(out.str() == "1\t-2.5\n2\t-1.25\n");
}
