#pragma once

#include <iosfwd>

#include "run_config.hpp"

namespace cvae::cli {

// Each command reads and writes under config.workdir(), prints a summary to
// `out`, writes its resolved configuration as `<command>.config`, and
// returns the process exit code. Library errors propagate as exceptions.

/// Ratings (+ reviews, stopwords) -> SBM1 caches, split, id tables, stats.
int cmd_ingest(const RunConfig& config, std::ostream& out);

/// Cached matrices -> model.cvae1, pretrain.log and/or refine.log.
int cmd_train(const RunConfig& config, std::ostream& out);

/// Checkpoint + cached split -> report.tsv (and users.tsv on request).
int cmd_eval(const RunConfig& config, std::ostream& out);

/// Analytic vs finite-difference ELBO gradients on a tiny random model, per
/// head. Exit 0 iff both are within gradcheck_threshold.
int cmd_gradcheck(const RunConfig& config, std::ostream& out);

/// cVAE / fVAE / rVAE comparison on generated data -> bench.tsv.
int cmd_bench_synth(const RunConfig& config, std::ostream& out);

}  // namespace cvae::cli
