#include "cvae/synth.hpp"

#include <algorithm>
#include <random>
#include <string>

#include "cvae/errors.hpp"
#include "cvae/rng.hpp"

namespace cvae {

namespace {

std::vector<std::size_t> round_robin(std::size_t count, std::size_t clusters) {
  std::vector<std::size_t> out(count);
  for (std::size_t i = 0; i < count; ++i) out[i] = i % clusters;
  return out;
}

}  // namespace

void SynthSpec::validate() const {
  if (users == 0 || items == 0 || features == 0) throw DomainError("synthetic sizes must be >= 1");
  if (clusters == 0 || clusters > users || clusters > items || clusters > features)
    throw DomainError("cluster count must be in [1, min(users, items, features)]");
  if (!(rating_density > 0.0 && rating_density < 1.0))
    throw DomainError("rating density must be in (0, 1)");
  if (!(feature_density > 0.0 && feature_density < 1.0))
    throw DomainError("feature density must be in (0, 1)");
  if (!(noise >= 0.0 && noise < 0.5)) throw DomainError("noise must be in [0, 0.5)");
}

SynthData generate(const SynthSpec& spec) {
  spec.validate();
  SynthData data;
  data.user_cluster = round_robin(spec.users, spec.clusters);
  data.item_cluster = round_robin(spec.items, spec.clusters);
  data.feature_cluster = round_robin(spec.features, spec.clusters);

  auto rng = make_rng(spec.seed, Stream::synth);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  using Index = SparseBinaryMatrix::Index;

  std::vector<std::pair<Index, Index>> feature_pairs;
  for (std::size_t i = 0; i < spec.items; ++i) {
    for (std::size_t f = 0; f < spec.features; ++f) {
      const double p = data.item_cluster[i] == data.feature_cluster[f]
                           ? spec.feature_density
                           : spec.noise * spec.feature_density;
      if (unit(rng) < p) feature_pairs.emplace_back(static_cast<Index>(i), static_cast<Index>(f));
    }
  }
  data.features =
      SparseBinaryMatrix::from_pairs(spec.items, spec.features, std::move(feature_pairs));

  constexpr int kMaxRedraws = 10;
  std::vector<std::pair<Index, Index>> rating_pairs;
  std::vector<Index> row;
  for (std::size_t u = 0; u < spec.users; ++u) {
    for (int attempt = 0;; ++attempt) {
      row.clear();
      for (std::size_t i = 0; i < spec.items; ++i) {
        const double p = data.user_cluster[u] == data.item_cluster[i]
                             ? spec.rating_density
                             : spec.noise * spec.rating_density;
        if (unit(rng) < p) row.push_back(static_cast<Index>(i));
      }
      if (!row.empty()) break;
      if (attempt == kMaxRedraws)
        throw DataError("user " + std::to_string(u) + " has no positives after " +
                        std::to_string(kMaxRedraws) + " redraws");
    }
    for (auto i : row) rating_pairs.emplace_back(static_cast<Index>(u), i);
  }
  data.ratings = SparseBinaryMatrix::from_pairs(spec.users, spec.items, std::move(rating_pairs));
  return data;
}

double oracle_recall_ceiling(const SynthData& data, const SparseBinaryMatrix& train,
                             const SparseBinaryMatrix& target, std::size_t n) {
  if (train.rows() != data.user_cluster.size() || train.cols() != data.item_cluster.size())
    throw ShapeError("split does not match synthetic data shape");
  double total = 0.0;
  std::size_t users = 0;
  for (std::size_t u = 0; u < train.rows(); ++u) {
    auto relevant = target.row(u);
    if (relevant.empty()) continue;
    const std::size_t cu = data.user_cluster[u];
    std::size_t in_candidates = 0, out_candidates = 0;
    for (std::size_t i = 0; i < train.cols(); ++i) {
      if (train.contains(u, i)) continue;
      (data.item_cluster[i] == cu ? in_candidates : out_candidates)++;
    }
    std::size_t rel_in = 0;
    for (auto i : relevant) rel_in += data.item_cluster[i] == cu;
    const std::size_t rel_out = relevant.size() - rel_in;

    double hits = 0.0;
    if (in_candidates > 0)
      hits += static_cast<double>(rel_in) * static_cast<double>(std::min(n, in_candidates)) /
              static_cast<double>(in_candidates);
    if (n > in_candidates && out_candidates > 0)
      hits += static_cast<double>(rel_out) *
              static_cast<double>(std::min(n - in_candidates, out_candidates)) /
              static_cast<double>(out_candidates);
    total += hits / static_cast<double>(relevant.size());
    ++users;
  }
  if (users == 0) throw DataError("no user has target positives");
  return total / static_cast<double>(users);
}

}  // namespace cvae
