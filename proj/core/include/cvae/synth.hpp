#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "cvae/sparse.hpp"

namespace cvae {

/// Bernoulli block model: users, items and features are dealt round-robin
/// into `clusters` groups. Ratings and features are dense inside matching
/// blocks and `noise` times as dense outside them.
struct SynthSpec {
  std::size_t users = 300;
  std::size_t items = 200;
  std::size_t features = 400;
  std::size_t clusters = 4;
  double rating_density = 0.3;
  double feature_density = 0.2;
  double noise = 0.05;
  std::uint64_t seed = 1;

  /// Throws DomainError on zero sizes, densities outside (0, 1) or noise
  /// outside [0, 0.5).
  void validate() const;
};

struct SynthData {
  SparseBinaryMatrix features;  // items x features
  SparseBinaryMatrix ratings;   // users x items
  std::vector<std::size_t> user_cluster;
  std::vector<std::size_t> item_cluster;
  std::vector<std::size_t> feature_cluster;
};

/// Draws the matrices. A user row with no positives is redrawn up to 10
/// times before DataError is thrown.
SynthData generate(const SynthSpec& spec);

/// Expected recall at `n` of a cluster-aware oracle that ranks a user's
/// unrated in-cluster items first and the rest after, each group in
/// uniformly random order, averaged over users with `target` positives.
/// Exact given the split. With zero noise this is the best achievable
/// expected Rec@N.
double oracle_recall_ceiling(const SynthData& data, const SparseBinaryMatrix& train,
                             const SparseBinaryMatrix& target, std::size_t n);

}  // namespace cvae
