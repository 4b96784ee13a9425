// One PASS/FAIL line per acceptance criterion. Exit code is the number of
// failures.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "commands.hpp"
#include "cvae/checkpoint.hpp"
#include "cvae/data.hpp"
#include "cvae/evaluator.hpp"
#include "cvae/experiment.hpp"
#include "cvae/gradcheck.hpp"
#include "cvae/synth.hpp"
#include "cvae/trainer.hpp"
#include "cvae/vae.hpp"
#include "oracles.hpp"
#include "run_config.hpp"

using namespace cvae;
namespace fs = std::filesystem;

namespace {

int failures = 0;

struct Outcome {
  bool pass = false;
  std::string detail;
};

void report(int id, const char* name, const std::function<Outcome()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::printf("%s %d %s: %s (%.1fs)\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.c_str(), secs);
  std::fflush(stdout);
  if (!o.pass) ++failures;
}

std::string format(const char* fmt, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, fmt, args...);
  return buf;
}

Outcome gradient_oracle() {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<std::size_t> n_dist(2, 12), k_dist(1, 4), w_dist(1, 8), b_dist(1, 3);
  std::uniform_real_distribution<double> bias(-0.3, 0.3);
  std::bernoulli_distribution on(0.4);
  std::normal_distribution<double> normal;
  const double alphas[] = {1.0, 3.0};
  const double betas[] = {0.0, 0.5, 2.0};
  double worst = 0.0;
  int configs = 0;
  for (int rep = 0; rep < 2; ++rep)
    for (Head head : {Head::bernoulli, Head::gaussian})
      for (double alpha : alphas)
        for (double beta : betas) {
          ModelConfig c;
          const std::size_t n = n_dist(rng);
          c.k = k_dist(rng);
          c.encoder_widths = {w_dist(rng)};
          c.decoder_widths = {w_dist(rng)};
          if (rep == 1) c.decoder_widths.push_back(w_dist(rng));
          c.alpha = alpha;
          c.beta = beta;
          c.samples = 1 + rep;
          VaeParams p = VaeParams::init(n, c, rng());
          for (auto* mlp : {&p.encoder, &p.decoder})
            for (auto& layer : mlp->layers)
              for (double& b : layer.bias) b = bias(rng);
          std::vector<std::vector<double>> rows(b_dist(rng), std::vector<double>(n));
          std::vector<Datapoint> batch;
          for (auto& r : rows) {
            for (double& v : r) v = on(rng) ? 1.0 : 0.0;
            batch.push_back({r, head});
          }
          std::vector<double> noise(rows.size() * c.samples * c.k);
          for (double& e : noise) e = normal(rng);
          const auto analytic = elbo_batch(p, batch, c, replay_eps(noise)).gradient.flatten();
          auto loss = [&] { return elbo_batch(p, batch, c, replay_eps(noise)).value; };
          auto views = p.views();
          worst = std::max(worst, max_relative_error(analytic, finite_diff_grad(loss, views)));
          ++configs;
        }
  return {configs >= 20 && worst <= 1e-5,
          format("%d configs, max relative error %.2e", configs, worst)};
}

Outcome kl_correctness() {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> mu_dist(-3.0, 3.0), log_s(std::log(0.1), std::log(4.0));
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double mu = mu_dist(rng), s = std::exp(log_s(rng));
    const double closed = kl_standard_normal({{mu}, {s}});
    worst = std::max(worst, std::abs(closed - oracle::kl_1d_quadrature(mu, s)));
  }
  std::uniform_real_distribution<double> wide_mu(-10.0, 10.0), wide_s(std::log(1e-3), std::log(1e3));
  std::size_t negative = 0;
  for (int i = 0; i < 100000; ++i)
    if (kl_standard_normal({{wide_mu(rng)}, {std::exp(wide_s(rng))}}) < 0.0) ++negative;
  return {worst <= 1e-6 && negative == 0,
          format("max |closed - quadrature| %.2e on 100 pairs, %zu negative of 1e5", worst, negative)};
}

Outcome metric_oracle() {
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<int> n_dist(1, 30), cut_dist(1, 12);
  std::uniform_int_distribution<int> level(0, 6);
  std::bernoulli_distribution masked_p(0.2), relevant_p(0.25);
  std::size_t mismatches = 0;
  for (int inst = 0; inst < 1000; ++inst) {
    const int n = n_dist(rng);
    const std::size_t cutoff = cut_dist(rng);
    std::vector<double> scores(n);
    for (double& s : scores) s = level(rng) * 0.5;  // ties are common
    std::set<unsigned> masked, relevant;
    for (int i = 0; i < n; ++i) {
      if (masked_p(rng)) masked.insert(i);
      else if (relevant_p(rng)) relevant.insert(i);
    }
    const std::vector<ItemIndex> mask_vec(masked.begin(), masked.end());
    const std::vector<ItemIndex> rel_vec(relevant.begin(), relevant.end());
    const auto list = top_n(scores, mask_vec, cutoff);
    const auto naive = oracle::naive_ranking(scores, masked, cutoff);
    if (std::vector<unsigned>(list.items.begin(), list.items.end()) != naive) ++mismatches;
    const auto pr = precision_recall_at_n(list.items, rel_vec, cutoff);
    const auto ap = ap_at_n(list.items, rel_vec, cutoff);
    if (relevant.empty()) {
      if (pr || ap) ++mismatches;
      continue;
    }
    if (!pr || !ap || pr->precision != oracle::naive_precision(naive, relevant, cutoff) ||
        pr->recall != oracle::naive_recall(naive, relevant, cutoff) ||
        *ap != oracle::naive_ap(naive, relevant, cutoff))
      ++mismatches;

    // MAP over a one-user report equals that user's AP
    SparseBinaryMatrix train = SparseBinaryMatrix::from_pairs(
        1, n, [&] {
          std::vector<std::pair<ItemIndex, ItemIndex>> v;
          for (auto i : masked) v.emplace_back(0, i);
          return v;
        }());
    SparseBinaryMatrix target = SparseBinaryMatrix::from_pairs(
        1, n, [&] {
          std::vector<std::pair<ItemIndex, ItemIndex>> v;
          for (auto i : relevant) v.emplace_back(0, i);
          return v;
        }());
    const std::size_t cuts[] = {cutoff};
    const auto rep = evaluate_scorer([&](std::size_t, std::span<const double>) { return scores; },
                                     train, target, cuts);
    if (rep.by_cutoff.at(cutoff).map != oracle::naive_ap(naive, relevant, cutoff)) ++mismatches;
  }
  const std::vector<ItemIndex> hand_list{4, 7, 2}, hand_rel{2, 4};
  const double hand = *ap_at_n(hand_list, hand_rel, 3);
  const bool hand_ok = std::abs(hand - 5.0 / 6.0) < 1e-15 && format("%.6f", hand) == "0.833333";
  return {mismatches == 0 && hand_ok,
          format("%zu mismatches on 1000 instances, hand AP@3 = %.6f", mismatches, hand)};
}

Outcome split_contract() {
  std::mt19937_64 rng(5);
  const std::size_t users = 1000, items = 60;
  std::uniform_int_distribution<std::size_t> deg_dist(0, items);
  std::vector<std::pair<ItemIndex, ItemIndex>> pairs;
  std::vector<ItemIndex> all(items);
  for (std::size_t i = 0; i < items; ++i) all[i] = static_cast<ItemIndex>(i);
  for (std::size_t u = 0; u < users; ++u) {
    std::shuffle(all.begin(), all.end(), rng);
    const std::size_t deg = u < 50 ? u % 4 : deg_dist(rng);
    for (std::size_t j = 0; j < deg; ++j) pairs.emplace_back(static_cast<ItemIndex>(u), all[j]);
  }
  const auto y = SparseBinaryMatrix::from_pairs(users, items, pairs);
  const auto split = split_per_user(y, 17);
  std::size_t bad = 0;
  for (std::size_t u = 0; u < users; ++u) {
    const auto tr = split.train.row(u), va = split.valid.row(u), te = split.test.row(u);
    std::set<ItemIndex> s_tr(tr.begin(), tr.end()), s_va(va.begin(), va.end()),
        s_te(te.begin(), te.end());
    std::set<ItemIndex> uni = s_tr;
    uni.insert(s_va.begin(), s_va.end());
    uni.insert(s_te.begin(), s_te.end());
    const auto row = y.row(u);
    const std::size_t deg = row.size();
    const std::size_t hold = deg >= 3 ? deg / 10 : 0;
    const bool ok = uni == std::set<ItemIndex>(row.begin(), row.end()) &&
                    s_tr.size() + s_va.size() + s_te.size() == deg && s_va.size() == hold &&
                    s_te.size() == hold && s_tr.size() == deg - 2 * hold;
    if (!ok) ++bad;
  }
  return {bad == 0, format("%zu of %zu users violate partition/ratio invariants", bad, users)};
}

Outcome memorization() {
  const std::size_t m = 8, n = 12;
  std::mt19937_64 rng(3);
  std::bernoulli_distribution on(0.5);
  std::vector<std::pair<ItemIndex, ItemIndex>> pairs;
  for (std::size_t u = 0; u < m; ++u) {
    bool any = false, all = true;
    std::vector<bool> row(n);
    do {
      any = false;
      all = true;
      for (std::size_t i = 0; i < n; ++i) {
        row[i] = on(rng);
        any |= row[i];
        all &= row[i];
      }
    } while (!any || all);
    for (std::size_t i = 0; i < n; ++i)
      if (row[i]) pairs.emplace_back(static_cast<ItemIndex>(u), static_cast<ItemIndex>(i));
  }
  const auto y = SparseBinaryMatrix::from_pairs(m, n, pairs);

  TrainConfig c;
  c.model.k = 4;
  c.model.encoder_widths = {16};
  c.model.decoder_widths = {16};
  c.model.alpha = 1.0;
  c.beta_refine = 0.1;
  c.epochs_pretrain = 0;
  c.epochs_refine = 500;
  c.batch_size = 4;
  c.optimizer.learning_rate = 1e-2;
  c.seed = 11;
  const auto result = train_method(Method::rvae, SparseBinaryMatrix(n, 0), y, c);

  double worst = 1.0;
  for (std::size_t u = 0; u < m; ++u) {
    const auto row = y.dense_row(u);
    const auto s = predict_scores(result.params, row);
    std::size_t good = 0, total = 0;
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b)
        if (row[a] == 1.0 && row[b] == 0.0) {
          ++total;
          good += s[a] > s[b];
        }
    worst = std::min(worst, double(good) / double(total));
  }
  return {worst >= 0.9, format("worst user orders %.1f%% of positive/negative pairs", 100 * worst)};
}

Outcome comparative_ordering() {
  ComparisonSpec spec;
  spec.synth = SynthSpec{300, 200, 400, 4, 0.3, 0.2, 0.05, 1};
  spec.train.model.k = 20;
  spec.train.model.encoder_widths = {100};
  spec.train.model.decoder_widths = {100};
  spec.train.model.alpha = 5.0;
  spec.train.beta_pre = 0.1;
  spec.train.beta_refine = 1.0;
  spec.train.epochs_pretrain = 100;
  spec.train.epochs_refine = 100;
  spec.train.batch_size = 100;
  spec.train_positives = 3;
  spec.seeds = {1, 2, 3, 4, 5};
  spec.cutoff = 10;
  spec.threads = std::max(1u, std::thread::hardware_concurrency());
  const auto r = run_synthetic_comparison(spec);
  const double cv = r.summary(Method::cvae).mean, fv = r.summary(Method::fvae).mean,
               rv = r.summary(Method::rvae).mean, orc = r.oracle_summary().mean;
  return {cv - rv >= 0.05 && cv >= fv,
          format("mean Rec@10 cvae %.4f fvae %.4f rvae %.4f (oracle %.4f)", cv, fv, rv, orc)};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome determinism() {
  const fs::path root = fs::temp_directory_path() / "cvae_acceptance_determinism";
  fs::remove_all(root);
  fs::create_directories(root);
  const auto data = generate(SynthSpec{60, 120, 30, 3, 0.5, 0.3, 0.05, 4});
  {
    std::ofstream r(root / "ratings.tsv"), v(root / "reviews.tsv");
    for (std::size_t u = 0; u < data.ratings.rows(); ++u)
      for (auto i : data.ratings.row(u)) r << "user" << u << '\t' << "item" << i << '\n';
    const char* letters = "abcdefghij";
    for (std::size_t i = 0; i < data.features.rows(); ++i) {
      v << "item" << i << '\t';
      for (auto f : data.features.row(i)) v << 'w' << letters[f / 10] << letters[f % 10] << ' ';
      v << '\n';
    }
  }
  std::vector<std::string> artifacts;
  for (int run = 0; run < 2; ++run) {
    cli::RunConfig c;
    const fs::path work = root / ("run" + std::to_string(run));
    c.set("ratings", (root / "ratings.tsv").string());
    c.set("reviews", (root / "reviews.tsv").string());
    c.set("workdir", work.string());
    c.set("min_df", "1");
    c.set("k", "5");
    c.set("encoder_widths", "16");
    c.set("decoder_widths", "16");
    c.set("epochs_pretrain", "10");
    c.set("epochs_refine", "10");
    c.set("batch_size", "16");
    std::ostringstream sink;
    cli::cmd_ingest(c, sink);
    cli::cmd_train(c, sink);
    cli::cmd_eval(c, sink);
    std::string all;
    for (const char* f : {"model.cvae1", "report.tsv", "pretrain.log", "refine.log"})
      all += slurp(work / f) + '\x1f';
    artifacts.push_back(all);
  }
  fs::remove_all(root);
  const bool same = artifacts[0] == artifacts[1];
  return {same, same ? "checkpoint, logs and report byte-identical across reruns"
                     : "artifacts differ between reruns"};
}

Outcome checkpoint_round_trip() {
  const auto data = generate(SynthSpec{100, 50, 20, 4, 0.3, 0.2, 0.05, 8});
  TrainConfig c;
  c.model.k = 6;
  c.model.encoder_widths = {24, 12};
  c.model.decoder_widths = {12};
  c.epochs_pretrain = 3;
  c.epochs_refine = 3;
  c.batch_size = 20;
  const auto trained = train_cvae(data.features, data.ratings, c).params;
  const fs::path path = fs::temp_directory_path() / "cvae_acceptance_roundtrip.cvae1";
  save_checkpoint(path, trained, {{"method", "cvae"}});
  const auto loaded = load_checkpoint(path);
  fs::remove(path);
  std::size_t differing = 0;
  for (std::size_t u = 0; u < 100; ++u) {
    const auto row = data.ratings.dense_row(u);
    const auto a = predict_scores(trained, row), b = predict_scores(loaded.params, row);
    if (a.size() != b.size() || std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) != 0)
      ++differing;
  }
  return {differing == 0 && loaded.params == trained,
          format("%zu of 100 users differ after reload", differing)};
}

}  // namespace

int main() {
  report(1, "gradient oracle", gradient_oracle);
  report(2, "KL correctness", kl_correctness);
  report(3, "metric oracle equivalence", metric_oracle);
  report(4, "split contract", split_contract);
  report(5, "memorization", memorization);
  report(6, "comparative ordering", comparative_ordering);
  report(7, "determinism", determinism);
  report(8, "checkpoint round-trip", checkpoint_round_trip);
  return failures;
}
