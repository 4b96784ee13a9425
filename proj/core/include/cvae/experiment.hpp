#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "cvae/synth.hpp"
#include "cvae/trainer.hpp"

namespace cvae {

/// cVAE vs fVAE vs rVAE on generated data, one run per seed.
struct ComparisonSpec {
  SynthSpec synth;
  TrainConfig train;
  /// Cap on training positives per user after the split (0 keeps all).
  std::size_t train_positives = 3;
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  std::size_t cutoff = 10;
  /// Worker threads across seeds. Results do not depend on this.
  std::size_t threads = 1;
};

struct SeedOutcome {
  std::uint64_t seed = 0;
  double cvae = 0.0;
  double fvae = 0.0;
  double rvae = 0.0;
  double oracle = 0.0;
};

struct Summary {
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;
};

struct ComparisonResult {
  std::size_t cutoff = 10;
  std::vector<SeedOutcome> seeds;  // in spec order

  Summary summary(Method method) const;
  Summary oracle_summary() const;
};

/// For each seed: generate, split, cap training positives, then train fVAE
/// (pretrain), cVAE (fVAE refined) and rVAE (refined from scratch) with the
/// seed as run seed, and record test Rec@cutoff for each plus the oracle
/// ceiling.
ComparisonResult run_synthetic_comparison(const ComparisonSpec& spec);

/// `seed<TAB>method<TAB>rec@N` rows followed by `mean/min/max` summary rows.
void write_comparison_tsv(std::ostream& out, const ComparisonResult& result);

}  // namespace cvae
