#include "cvae/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <mutex>
#include <ostream>
#include <thread>

#include "cvae/data.hpp"
#include "cvae/errors.hpp"
#include "cvae/evaluator.hpp"

namespace cvae {

namespace {

SeedOutcome run_seed(const ComparisonSpec& spec, std::uint64_t seed) {
  SynthSpec synth = spec.synth;
  synth.seed = seed;
  TrainConfig train = spec.train;
  train.seed = seed;

  const SynthData data = generate(synth);
  SplitDataset split = split_per_user(data.ratings, seed);
  if (spec.train_positives > 0) split.train = sparsify_rows(split.train, spec.train_positives, seed);

  const std::size_t cutoffs[] = {spec.cutoff};
  auto recall = [&](const VaeParams& p) {
    return evaluate(p, split, cutoffs).by_cutoff.at(spec.cutoff).recall;
  };

  SeedOutcome out;
  out.seed = seed;
  auto fvae = pretrain(data.features, train);
  out.fvae = recall(fvae.params);
  auto cvae = refine(std::move(fvae.params), split.train, train);
  out.cvae = recall(cvae.params);
  auto rvae = refine(initial_params(split.train.cols(), train), split.train, train);
  out.rvae = recall(rvae.params);
  out.oracle = oracle_recall_ceiling(data, split.train, split.test, spec.cutoff);
  return out;
}

Summary summarize(const std::vector<SeedOutcome>& seeds, double SeedOutcome::*field) {
  if (seeds.empty()) return {};
  Summary s{0.0, seeds.front().*field, seeds.front().*field};
  for (const auto& o : seeds) {
    s.mean += o.*field;
    s.min = std::min(s.min, o.*field);
    s.max = std::max(s.max, o.*field);
  }
  s.mean /= static_cast<double>(seeds.size());
  return s;
}

}  // namespace

Summary ComparisonResult::summary(Method method) const {
  switch (method) {
    case Method::cvae: return summarize(seeds, &SeedOutcome::cvae);
    case Method::fvae: return summarize(seeds, &SeedOutcome::fvae);
    case Method::rvae: return summarize(seeds, &SeedOutcome::rvae);
  }
  return {};
}

Summary ComparisonResult::oracle_summary() const { return summarize(seeds, &SeedOutcome::oracle); }

ComparisonResult run_synthetic_comparison(const ComparisonSpec& spec) {
  if (spec.seeds.empty()) throw DomainError("no seeds given");
  ComparisonResult result;
  result.cutoff = spec.cutoff;
  result.seeds.resize(spec.seeds.size());

  const std::size_t workers = std::clamp<std::size_t>(spec.threads, 1, spec.seeds.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < spec.seeds.size();) {
      try {
        result.seeds[i] = run_seed(spec, spec.seeds[i]);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  if (failure) std::rethrow_exception(failure);
  return result;
}

void write_comparison_tsv(std::ostream& out, const ComparisonResult& result) {
  char buf[32];
  auto fmt = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return std::string(buf);
  };
  const std::string metric = "rec@" + std::to_string(result.cutoff);
  out << "seed\tmethod\t" << metric << '\n';
  for (const auto& s : result.seeds) {
    out << s.seed << "\tcvae\t" << fmt(s.cvae) << '\n';
    out << s.seed << "\tfvae\t" << fmt(s.fvae) << '\n';
    out << s.seed << "\trvae\t" << fmt(s.rvae) << '\n';
    out << s.seed << "\toracle\t" << fmt(s.oracle) << '\n';
  }
  auto row = [&](const char* name, const Summary& s) {
    out << "mean\t" << name << '\t' << fmt(s.mean) << '\n';
    out << "min\t" << name << '\t' << fmt(s.min) << '\n';
    out << "max\t" << name << '\t' << fmt(s.max) << '\n';
  };
  row("cvae", result.summary(Method::cvae));
  row("fvae", result.summary(Method::fvae));
  row("rvae", result.summary(Method::rvae));
  row("oracle", result.oracle_summary());
}

}  // namespace cvae
