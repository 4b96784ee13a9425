#include "cvae/evaluator.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <ostream>

#include "cvae/errors.hpp"

namespace cvae {

namespace {

bool is_relevant(std::span<const ItemIndex> relevant, ItemIndex item) {
  return std::binary_search(relevant.begin(), relevant.end(), item);
}

std::string format_value(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

}  // namespace

RankedList top_n(std::span<const double> scores, std::span<const ItemIndex> train_items,
                 std::size_t n, std::size_t user) {
  RankedList list;
  list.user = user;
  std::vector<ItemIndex> candidates;
  candidates.reserve(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const auto item = static_cast<ItemIndex>(i);
    if (!std::binary_search(train_items.begin(), train_items.end(), item))
      candidates.push_back(item);
  }
  const std::size_t take = std::min(n, candidates.size());
  auto better = [&](ItemIndex a, ItemIndex b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return a < b;
  };
  std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(take),
                    candidates.end(), better);
  candidates.resize(take);
  list.items = std::move(candidates);
  list.scores.reserve(take);
  for (auto item : list.items) list.scores.push_back(scores[item]);
  return list;
}

std::optional<PrecisionRecall> precision_recall_at_n(std::span<const ItemIndex> list,
                                                     std::span<const ItemIndex> relevant,
                                                     std::size_t n) {
  if (relevant.empty() || n == 0) return std::nullopt;
  const std::size_t depth = std::min(n, list.size());
  std::size_t hits = 0;
  for (std::size_t i = 0; i < depth; ++i) hits += is_relevant(relevant, list[i]);
  return PrecisionRecall{static_cast<double>(hits) / static_cast<double>(n),
                         static_cast<double>(hits) / static_cast<double>(relevant.size())};
}

std::optional<double> ap_at_n(std::span<const ItemIndex> list,
                              std::span<const ItemIndex> relevant, std::size_t n) {
  if (relevant.empty() || n == 0) return std::nullopt;
  const std::size_t depth = std::min(n, list.size());
  std::size_t hits = 0;
  double sum = 0.0;
  for (std::size_t k = 0; k < depth; ++k) {
    if (is_relevant(relevant, list[k])) {
      ++hits;
      sum += static_cast<double>(hits) / static_cast<double>(k + 1);
    }
  }
  return sum / static_cast<double>(std::min(n, relevant.size()));
}

EvalReport evaluate_scorer(const Scorer& scorer, const SparseBinaryMatrix& train,
                           const SparseBinaryMatrix& target, std::span<const std::size_t> cutoffs,
                           bool keep_per_user) {
  if (train.rows() != target.rows() || train.cols() != target.cols())
    throw ShapeError("train and target matrices differ in shape");
  if (cutoffs.empty()) throw DomainError("no cutoffs requested");
  for (auto c : cutoffs)
    if (c == 0) throw DomainError("cutoff N must be >= 1");

  EvalReport report;
  report.cutoffs.assign(cutoffs.begin(), cutoffs.end());
  std::sort(report.cutoffs.begin(), report.cutoffs.end());
  report.cutoffs.erase(std::unique(report.cutoffs.begin(), report.cutoffs.end()),
                       report.cutoffs.end());
  const std::size_t max_n = report.cutoffs.back();
  for (auto c : report.cutoffs) report.by_cutoff[c] = {};

  std::vector<double> row;
  for (std::size_t u = 0; u < train.rows(); ++u) {
    auto relevant = target.row(u);
    if (relevant.empty()) continue;
    train.dense_row_into(u, row);
    const auto scores = scorer(u, row);
    if (scores.size() != train.cols()) throw ShapeError("scorer returned wrong width");
    const auto list = top_n(scores, train.row(u), max_n, u);

    UserMetrics um{u, relevant.size(), {}};
    for (auto c : report.cutoffs) {
      const auto pr = *precision_recall_at_n(list.items, relevant, c);
      const double ap = *ap_at_n(list.items, relevant, c);
      auto& agg = report.by_cutoff[c];
      agg.recall += pr.recall;
      agg.precision += pr.precision;
      agg.map += ap;
      if (keep_per_user) um.by_cutoff[c] = {pr.recall, pr.precision, ap};
    }
    ++report.users_evaluated;
    if (keep_per_user) report.per_user.push_back(std::move(um));
  }
  if (report.users_evaluated == 0) throw DataError("no user has target positives to evaluate");
  const double users = static_cast<double>(report.users_evaluated);
  for (auto& [c, m] : report.by_cutoff) {
    m.recall /= users;
    m.precision /= users;
    m.map /= users;
  }
  return report;
}

EvalReport evaluate(const VaeParams& params, const SplitDataset& split,
                    std::span<const std::size_t> cutoffs, bool keep_per_user) {
  Scorer scorer = [&params](std::size_t, std::span<const double> row) {
    return predict_scores(params, row);
  };
  return evaluate_scorer(scorer, split.train, split.test, cutoffs, keep_per_user);
}

EvalReport evaluate_validation(const VaeParams& params, const SplitDataset& split,
                               std::span<const std::size_t> cutoffs) {
  Scorer scorer = [&params](std::size_t, std::span<const double> row) {
    return predict_scores(params, row);
  };
  return evaluate_scorer(scorer, split.train, split.valid, cutoffs);
}

void write_report_tsv(std::ostream& out, const std::string& method, const EvalReport& report) {
  for (auto c : report.cutoffs) {
    const auto& m = report.by_cutoff.at(c);
    out << method << "\trec\t" << c << '\t' << format_value(m.recall) << '\n';
    out << method << "\tpre\t" << c << '\t' << format_value(m.precision) << '\n';
    out << method << "\tmap\t" << c << '\t' << format_value(m.map) << '\n';
  }
}

void write_per_user_tsv(std::ostream& out, const EvalReport& report) {
  out << "user\tN\trelevant\trec\tpre\tap\n";
  for (const auto& um : report.per_user)
    for (const auto& [c, m] : um.by_cutoff)
      out << um.user << '\t' << c << '\t' << um.relevant << '\t' << format_value(m.recall) << '\t'
          << format_value(m.precision) << '\t' << format_value(m.map) << '\n';
}

}  // namespace cvae
