#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cvae/data.hpp"
#include "cvae/sparse.hpp"
#include "cvae/vae.hpp"

namespace cvae {

using ItemIndex = SparseBinaryMatrix::Index;

struct RankedList {
  std::size_t user = 0;
  std::vector<ItemIndex> items;
  std::vector<double> scores;  // score of each listed item
};

/// Highest-scoring items not in `train_items` (sorted ascending), best
/// first; ties go to the lower item index. At most N items, fewer when not
/// enough unmasked items exist.
RankedList top_n(std::span<const double> scores, std::span<const ItemIndex> train_items,
                 std::size_t n, std::size_t user = 0);

struct PrecisionRecall {
  double precision = 0.0;
  double recall = 0.0;
};

/// Precision and recall of the first `n` entries of `list` against the
/// sorted `relevant` set (|hits| / n and |hits| / |relevant|). Returns
/// nullopt when `relevant` is empty: such users are skipped.
std::optional<PrecisionRecall> precision_recall_at_n(std::span<const ItemIndex> list,
                                                     std::span<const ItemIndex> relevant,
                                                     std::size_t n);

/// sum_{k<=n} Pre@k * rel(k) / min(n, |relevant|); nullopt on empty
/// `relevant`.
std::optional<double> ap_at_n(std::span<const ItemIndex> list,
                              std::span<const ItemIndex> relevant, std::size_t n);

struct CutoffMetrics {
  double recall = 0.0;
  double precision = 0.0;
  double map = 0.0;
};

struct UserMetrics {
  std::size_t user = 0;
  std::size_t relevant = 0;
  std::map<std::size_t, CutoffMetrics> by_cutoff;
};

struct EvalReport {
  std::vector<std::size_t> cutoffs;
  std::map<std::size_t, CutoffMetrics> by_cutoff;
  std::size_t users_evaluated = 0;
  std::vector<UserMetrics> per_user;  // filled when requested
};

/// Scores for user `u` given that user's training row as a dense vector.
using Scorer = std::function<std::vector<double>(std::size_t user, std::span<const double> train_row)>;

/// Ranks every user's unrated (non-train) items and scores them against
/// `target`. Users with no target positives are skipped. Throws DataError
/// when no user can be evaluated.
EvalReport evaluate_scorer(const Scorer& scorer, const SparseBinaryMatrix& train,
                           const SparseBinaryMatrix& target, std::span<const std::size_t> cutoffs,
                           bool keep_per_user = false);

/// Test-set evaluation of a trained model.
EvalReport evaluate(const VaeParams& params, const SplitDataset& split,
                    std::span<const std::size_t> cutoffs, bool keep_per_user = false);

/// Validation-set evaluation, used for model selection (by Rec@10).
EvalReport evaluate_validation(const VaeParams& params, const SplitDataset& split,
                               std::span<const std::size_t> cutoffs);

/// `method<TAB>metric<TAB>N<TAB>value` rows, metrics rec, pre, map per cutoff.
void write_report_tsv(std::ostream& out, const std::string& method, const EvalReport& report);

/// `user<TAB>N<TAB>relevant<TAB>rec<TAB>pre<TAB>ap` rows.
void write_per_user_tsv(std::ostream& out, const EvalReport& report);

}  // namespace cvae
