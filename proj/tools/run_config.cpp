#include "run_config.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>

#include "cvae/errors.hpp"

namespace cvae::cli {

namespace {

// Defaults mirror the published setup: batch 100, L = 1, 1000-100 /
// 100-1000 networks, cVAE alpha = 2, beta = 2 during refinement.
const std::map<std::string, std::string>& defaults() {
  static const std::map<std::string, std::string> table{
      {"ratings", ""},
      {"reviews", ""},
      {"stopwords", ""},
      {"workdir", "."},
      {"min_df", "5"},
      {"method", "cvae"},
      {"k", "100"},
      {"encoder_widths", "1000"},
      {"decoder_widths", "1000"},
      {"alpha", "2"},
      {"beta_pre", "0.1"},
      {"beta_refine", "2"},
      {"samples", "1"},
      {"epochs_pretrain", "100"},
      {"epochs_refine", "100"},
      {"batch_size", "100"},
      {"learning_rate", "0.001"},
      {"optimizer", "adam"},
      {"seed", "42"},
      {"checkpoint", ""},
      {"n_list", "5,10,15,20"},
      {"eval_split", "test"},
      {"sweep_max", "0"},
      {"sweep_step", "10"},
      {"per_user_detail", "false"},
      {"synth_users", "300"},
      {"synth_items", "200"},
      {"synth_features", "400"},
      {"synth_clusters", "4"},
      {"synth_rating_density", "0.3"},
      {"synth_feature_density", "0.2"},
      {"synth_noise", "0.05"},
      {"synth_train_positives", "3"},
      {"bench_seeds", "1,2,3,4,5"},
      {"bench_cutoff", "10"},
      {"threads", "1"},
      {"gradcheck_n", "8"},
      {"gradcheck_k", "3"},
      {"gradcheck_width", "5"},
      {"gradcheck_batch", "3"},
      {"gradcheck_threshold", "1e-5"},
      {"gradcheck_corrupt", "false"},
  };
  return table;
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <typename T>
T parse_number(const std::string& key, const std::string& text) {
  T value{};
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size())
    throw ParseError("config key '" + key + "': cannot parse '" + text + "'", 0);
  return value;
}

std::vector<std::size_t> parse_list(const std::string& key, const std::string& text) {
  std::vector<std::size_t> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto comma = text.find(',', pos);
    if (comma == std::string::npos) comma = text.size();
    const auto item = trim(text.substr(pos, comma - pos));
    if (!item.empty()) out.push_back(parse_number<std::size_t>(key, item));
    pos = comma + 1;
  }
  return out;
}

}  // namespace

RunConfig::RunConfig() : values_(defaults()) {}

RunConfig RunConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config " + path.string());
  RunConfig cfg;
  cfg.merge(in);
  return cfg;
}

void RunConfig::merge(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto text = trim(line);
    if (text.empty() || text.front() == '#') continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos) throw ParseError("expected key = value", lineno);
    try {
      set(trim(text.substr(0, eq)), trim(text.substr(eq + 1)));
    } catch (const DomainError& e) {
      throw ParseError(e.what(), lineno);
    }
  }
}

void RunConfig::set(const std::string& key, const std::string& value) {
  auto it = values_.find(key);
  if (it == values_.end()) throw DomainError("unknown config key '" + key + "'");
  it->second = value;
}

void RunConfig::set_assignment(const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw DomainError("expected key=value, got '" + assignment + "'");
  set(trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
}

const std::string& RunConfig::get(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw DomainError("unknown config key '" + key + "'");
  return it->second;
}

double RunConfig::get_double(const std::string& key) const {
  const auto& text = get(key);
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used == text.size()) return v;
  } catch (const std::exception&) {
  }
  throw ParseError("config key '" + key + "': cannot parse '" + text + "'", 0);
}

std::size_t RunConfig::get_size(const std::string& key) const {
  return parse_number<std::size_t>(key, get(key));
}

std::uint64_t RunConfig::get_u64(const std::string& key) const {
  return parse_number<std::uint64_t>(key, get(key));
}

bool RunConfig::get_bool(const std::string& key) const {
  const auto& v = get(key);
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ParseError("config key '" + key + "': expected a boolean, got '" + v + "'", 0);
}

std::vector<std::size_t> RunConfig::get_size_list(const std::string& key) const {
  return parse_list(key, get(key));
}

TrainConfig RunConfig::train_config() const {
  TrainConfig c;
  c.model.k = get_size("k");
  c.model.encoder_widths = get_size_list("encoder_widths");
  c.model.decoder_widths = get_size_list("decoder_widths");
  c.model.alpha = get_double("alpha");
  c.model.samples = get_size("samples");
  c.beta_pre = get_double("beta_pre");
  c.beta_refine = get_double("beta_refine");
  c.epochs_pretrain = get_size("epochs_pretrain");
  c.epochs_refine = get_size("epochs_refine");
  c.batch_size = get_size("batch_size");
  c.optimizer.kind = parse_optimizer_kind(get("optimizer"));
  c.optimizer.learning_rate = get_double("learning_rate");
  c.seed = get_u64("seed");
  c.validate();
  return c;
}

ComparisonSpec RunConfig::comparison_spec() const {
  ComparisonSpec s;
  s.synth.users = get_size("synth_users");
  s.synth.items = get_size("synth_items");
  s.synth.features = get_size("synth_features");
  s.synth.clusters = get_size("synth_clusters");
  s.synth.rating_density = get_double("synth_rating_density");
  s.synth.feature_density = get_double("synth_feature_density");
  s.synth.noise = get_double("synth_noise");
  s.synth.validate();
  s.train = train_config();
  s.train_positives = get_size("synth_train_positives");
  s.seeds.clear();
  for (auto v : get_size_list("bench_seeds")) s.seeds.push_back(v);
  s.cutoff = get_size("bench_cutoff");
  s.threads = get_size("threads");
  return s;
}

std::vector<std::size_t> RunConfig::cutoffs() const {
  const std::size_t sweep = get_size("sweep_max");
  if (sweep == 0) {
    auto list = get_size_list("n_list");
    if (list.empty()) throw DomainError("n_list is empty");
    return list;
  }
  const std::size_t step = get_size("sweep_step");
  if (step == 0) throw DomainError("sweep_step must be >= 1");
  std::vector<std::size_t> out;
  for (std::size_t n = step; n <= sweep; n += step) out.push_back(n);
  if (out.empty() || out.back() != sweep) out.push_back(sweep);
  return out;
}

void RunConfig::write(std::ostream& out) const {
  out << "# resolved configuration\n"
         "# sub-seeds derived from 'seed': init, split, shuffle(phase, epoch), eps(phase),\n"
         "# synth and sparsify streams (bench-synth uses each bench seed in place of 'seed')\n";
  for (const auto& [key, value] : values_) out << key << " = " << value << '\n';
}

}  // namespace cvae::cli
