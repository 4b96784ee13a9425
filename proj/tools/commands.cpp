#include "commands.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>
#include <random>
#include <string>

#include "cvae/checkpoint.hpp"
#include "cvae/data.hpp"
#include "cvae/errors.hpp"
#include "cvae/evaluator.hpp"
#include "cvae/experiment.hpp"
#include "cvae/gradcheck.hpp"
#include "cvae/trainer.hpp"

namespace cvae::cli {

namespace fs = std::filesystem;

namespace {

constexpr const char* kModelFile = "model.cvae1";

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  return out;
}

fs::path prepare_workdir(const RunConfig& config, const char* command) {
  const fs::path dir = config.workdir();
  fs::create_directories(dir);
  auto out = open_output(dir / (std::string(command) + ".config"));
  config.write(out);
  return dir;
}

void write_lines(const fs::path& path, const std::vector<std::string>& lines) {
  auto out = open_output(path);
  for (const auto& l : lines) out << l << '\n';
}

SparseBinaryMatrix load_cache(const fs::path& dir, const char* name) {
  const fs::path path = dir / name;
  if (!fs::exists(path))
    throw DataError(path.string() + " not found; run 'cvae ingest' first");
  return load_sbm(path);
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Metadata checkpoint_metadata(const RunConfig& config, Method method) {
  Metadata m{{"method", std::string(to_string(method))}};
  for (const char* key : {"alpha", "beta_pre", "beta_refine", "samples", "epochs_pretrain",
                          "epochs_refine", "batch_size", "learning_rate", "optimizer", "seed"})
    m.emplace_back(key, config.get(key));
  return m;
}

}  // namespace

int cmd_ingest(const RunConfig& config, std::ostream& out) {
  const std::string ratings_path = config.get("ratings");
  if (ratings_path.empty()) throw DomainError("ingest needs 'ratings'");
  const fs::path dir = prepare_workdir(config, "ingest");

  const RatingsData ratings = parse_ratings(fs::path(ratings_path));
  const SparseBinaryMatrix y = ratings.binarize();

  SparseBinaryMatrix x(ratings.items(), 0);
  std::vector<std::string> terms;
  if (const auto reviews_path = config.get("reviews"); !reviews_path.empty()) {
    const auto corpus = parse_reviews(fs::path(reviews_path), ratings.item_index);
    std::set<std::string> stopwords;
    if (const auto sw = config.get("stopwords"); !sw.empty()) stopwords = parse_stopwords(fs::path(sw));
    const auto vocab = build_vocabulary(corpus, stopwords, config.get_size("min_df"));
    x = vectorize_items(corpus, vocab);
    terms = vocab.terms;
  }

  const SplitDataset split = split_per_user(y, config.get_u64("seed"));
  save_sbm(dir / "ratings.sbm1", y);
  save_sbm(dir / "features.sbm1", x);
  save_sbm(dir / "train.sbm1", split.train);
  save_sbm(dir / "valid.sbm1", split.valid);
  save_sbm(dir / "test.sbm1", split.test);
  write_lines(dir / "users.txt", ratings.user_ids);
  write_lines(dir / "items.txt", ratings.item_ids);
  write_lines(dir / "vocab.txt", terms);

  const std::string header = "#users\t#items\t#ratings\t#dimensions\t#features";
  const std::string row = std::to_string(y.rows()) + '\t' + std::to_string(y.cols()) + '\t' +
                          std::to_string(y.nnz()) + '\t' + std::to_string(x.cols()) + '\t' +
                          std::to_string(x.nnz());
  write_lines(dir / "stats.tsv", {header, row});
  out << header << '\n' << row << '\n';
  out << "split\ttrain=" << split.train.nnz() << "\tvalid=" << split.valid.nnz()
      << "\ttest=" << split.test.nnz() << '\n';
  return 0;
}

int cmd_train(const RunConfig& config, std::ostream& out) {
  const Method method = parse_method(config.get("method"));
  const TrainConfig train = config.train_config();
  const fs::path dir = prepare_workdir(config, "train");

  const SparseBinaryMatrix ratings = load_cache(dir, "train.sbm1");
  SparseBinaryMatrix features = method == Method::rvae ? SparseBinaryMatrix(ratings.cols(), 0)
                                                       : load_cache(dir, "features.sbm1");
  if (method != Method::rvae && features.cols() == 0)
    throw DataError("method " + std::string(to_string(method)) +
                    " needs side information; ingest with 'reviews'");

  const TrainResult result = train_method(method, features, ratings, train);

  const fs::path model = config.get("checkpoint").empty() ? dir / kModelFile
                                                          : fs::path(config.get("checkpoint"));
  save_checkpoint(model, result.params, checkpoint_metadata(config, method));

  for (const auto& [name, run] : {std::pair{"pretrain.log", &result.pretrain_run},
                                  std::pair{"refine.log", &result.refine_run}}) {
    const fs::path log = dir / name;
    if (!run->has_value()) {
      fs::remove(log);
      continue;
    }
    auto stream = open_output(log);
    write_epoch_log(stream, **run);
    const auto& records = (*run)->log;
    out << to_string((*run)->phase) << "\tbeta=" << (*run)->beta << "\tepochs=" << records.size();
    if (!records.empty()) out << "\tfinal_objective=" << fmt(records.back().objective);
    out << '\n';
  }
  out << "wrote " << model.string() << '\n';
  return 0;
}

int cmd_eval(const RunConfig& config, std::ostream& out) {
  const fs::path dir = prepare_workdir(config, "eval");
  const fs::path model = config.get("checkpoint").empty() ? dir / kModelFile
                                                          : fs::path(config.get("checkpoint"));
  const Checkpoint cp = load_checkpoint(model);

  SplitDataset split{load_cache(dir, "train.sbm1"), load_cache(dir, "valid.sbm1"),
                     load_cache(dir, "test.sbm1"), config.get_u64("seed")};
  if (split.train.cols() != cp.params.n)
    throw ShapeError("checkpoint has n=" + std::to_string(cp.params.n) + " but data has " +
                     std::to_string(split.train.cols()) + " items");

  const auto cutoffs = config.cutoffs();
  const std::string which = config.get("eval_split");
  if (which != "test" && which != "valid") throw DomainError("eval_split must be test or valid");
  const bool detail = config.get_bool("per_user_detail");
  Scorer scorer = [&cp](std::size_t, std::span<const double> row) {
    return predict_scores(cp.params, row);
  };
  const EvalReport report = evaluate_scorer(
      scorer, split.train, which == "test" ? split.test : split.valid, cutoffs, detail);

  const std::string method = cp.get("method", config.get("method"));
  {
    auto tsv = open_output(dir / "report.tsv");
    write_report_tsv(tsv, method, report);
  }
  if (detail) {
    auto users = open_output(dir / "users.tsv");
    write_per_user_tsv(users, report);
  }
  write_report_tsv(out, method, report);
  out << "evaluated_users\t" << report.users_evaluated << '\n';
  return 0;
}

int cmd_gradcheck(const RunConfig& config, std::ostream& out) {
  prepare_workdir(config, "gradcheck");
  const std::size_t n = config.get_size("gradcheck_n");
  const std::size_t batch_size = config.get_size("gradcheck_batch");
  const double threshold = config.get_double("gradcheck_threshold");
  const bool corrupt = config.get_bool("gradcheck_corrupt");
  const std::uint64_t seed = config.get_u64("seed");
  if (n == 0 || batch_size == 0) throw DomainError("gradcheck_n and gradcheck_batch must be >= 1");

  ModelConfig model;
  model.k = config.get_size("gradcheck_k");
  model.encoder_widths = {config.get_size("gradcheck_width")};
  model.decoder_widths = {config.get_size("gradcheck_width")};
  model.alpha = config.get_double("alpha");
  model.samples = config.get_size("samples");
  VaeParams params = VaeParams::init(n, model, seed);

  auto rng = make_rng(seed, Stream::gradcheck);
  std::bernoulli_distribution on(0.4);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> bias(-0.3, 0.3);
  for (auto* mlp : {&params.encoder, &params.decoder})
    for (auto& layer : mlp->layers)
      for (double& b : layer.bias) b = bias(rng);

  bool ok = true;
  out << "head\tparameters\tmax_relative_error\tthreshold\tstatus\n";
  for (Head head : {Head::bernoulli, Head::gaussian}) {
    model.beta = config.get_double(head == Head::bernoulli ? "beta_refine" : "beta_pre");
    std::vector<std::vector<double>> rows(batch_size, std::vector<double>(n));
    std::vector<Datapoint> batch;
    for (auto& r : rows) {
      for (double& v : r) v = on(rng) ? 1.0 : 0.0;
      batch.push_back({r, head});
    }
    std::vector<double> noise(batch_size * model.samples * model.k);
    for (double& e : noise) e = normal(rng);

    auto analytic = elbo_batch(params, batch, model, replay_eps(noise)).gradient.flatten();
    if (corrupt && !analytic.empty()) analytic.front() += 1e-2 * (1.0 + std::abs(analytic.front()));
    auto loss = [&] { return elbo_batch(params, batch, model, replay_eps(noise)).value; };
    auto views = params.views();
    const auto numeric = finite_diff_grad(loss, views);
    const double err = max_relative_error(analytic, numeric);
    const bool pass = err <= threshold;
    ok &= pass;
    char buf[128];
    std::snprintf(buf, sizeof buf, "%s\t%zu\t%.3e\t%.1e\t%s\n", std::string(to_string(head)).c_str(),
                  analytic.size(), err, threshold, pass ? "PASS" : "FAIL");
    out << buf;
  }
  return ok ? 0 : 1;
}

int cmd_bench_synth(const RunConfig& config, std::ostream& out) {
  const ComparisonSpec spec = config.comparison_spec();
  const fs::path dir = prepare_workdir(config, "bench-synth");
  const ComparisonResult result = run_synthetic_comparison(spec);
  {
    auto tsv = open_output(dir / "bench.tsv");
    write_comparison_tsv(tsv, result);
  }
  char buf[160];
  out << "method\tmean_rec@" << result.cutoff << "\tmin\tmax\n";
  auto row = [&](const char* name, const Summary& s) {
    std::snprintf(buf, sizeof buf, "%s\t%.4f\t%.4f\t%.4f\n", name, s.mean, s.min, s.max);
    out << buf;
  };
  row("cvae", result.summary(Method::cvae));
  row("fvae", result.summary(Method::fvae));
  row("rvae", result.summary(Method::rvae));
  row("oracle", result.oracle_summary());
  return 0;
}

}  // namespace cvae::cli
