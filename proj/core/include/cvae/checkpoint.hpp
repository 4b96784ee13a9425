#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "cvae/vae.hpp"

namespace cvae {

/// Extra manifest entries (alpha, beta, seed, ...), written in order.
using Metadata = std::vector<std::pair<std::string, std::string>>;

struct Checkpoint {
  VaeParams params;
  Metadata metadata;

  /// Value of a metadata key, or `fallback` when absent.
  std::string get(const std::string& key, const std::string& fallback = {}) const;
};

// Layout:
//   CVAE1\n
//   n=<n>\n k=<k>\n encoder_widths=<w,...>\n decoder_widths=<w,...>\n
//   <metadata key=value lines>\n
//   end\n
//   encoder layers then decoder layers, each weight (row-major) then bias,
//   as little-endian IEEE-754 binary64.
void write_checkpoint(std::ostream& out, const VaeParams& params, const Metadata& metadata);
Checkpoint read_checkpoint(std::istream& in);

void save_checkpoint(const std::filesystem::path& path, const VaeParams& params,
                     const Metadata& metadata);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace cvae
