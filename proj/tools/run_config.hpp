#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "cvae/experiment.hpp"
#include "cvae/synth.hpp"
#include "cvae/trainer.hpp"

namespace cvae::cli {

/// Flat `key = value` settings with a fixed key set. Every key has a
/// default; unknown keys are rejected.
class RunConfig {
 public:
  RunConfig();

  /// Reads `key = value` lines; `#` starts a comment line.
  static RunConfig load(const std::filesystem::path& path);
  void merge(std::istream& in);

  void set(const std::string& key, const std::string& value);
  /// `key=value` form used by `--set`.
  void set_assignment(const std::string& assignment);

  const std::string& get(const std::string& key) const;
  std::string get_string(const std::string& key) const { return get(key); }
  double get_double(const std::string& key) const;
  std::size_t get_size(const std::string& key) const;
  std::uint64_t get_u64(const std::string& key) const;
  bool get_bool(const std::string& key) const;
  std::vector<std::size_t> get_size_list(const std::string& key) const;

  std::filesystem::path workdir() const { return get("workdir"); }
  TrainConfig train_config() const;
  ComparisonSpec comparison_spec() const;
  /// Cutoff list, expanded from sweep_max/sweep_step when sweep_max > 0.
  std::vector<std::size_t> cutoffs() const;

  /// Resolved settings, sorted by key, preceded by a note on how the run
  /// seed is split into sub-streams.
  void write(std::ostream& out) const;

  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace cvae::cli
