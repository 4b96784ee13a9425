#include "cvae/checkpoint.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "cvae/errors.hpp"

namespace cvae {

namespace {

constexpr const char* kMagic = "CVAE1";

std::string join(const std::vector<std::size_t>& widths) {
  std::string s;
  for (std::size_t i = 0; i < widths.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(widths[i]);
  }
  return s;
}

std::vector<std::size_t> parse_widths(const std::string& text) {
  std::vector<std::size_t> widths;
  if (text.empty()) return widths;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto comma = text.find(',', pos);
    if (comma == std::string::npos) comma = text.size();
    std::size_t w = 0;
    auto [ptr, ec] = std::from_chars(text.data() + pos, text.data() + comma, w);
    if (ec != std::errc() || ptr != text.data() + comma || w == 0)
      throw ParseError("bad width list '" + text + "'", 0);
    widths.push_back(w);
    pos = comma + 1;
  }
  return widths;
}

std::size_t parse_count(const std::string& text, const char* key) {
  std::size_t v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size())
    throw ParseError(std::string("bad value for ") + key, 0);
  return v;
}

void write_doubles(std::ostream& out, std::span<const double> values) {
  std::array<char, 8> bytes{};
  for (double v : values) {
    auto bits = std::bit_cast<std::uint64_t>(v);
    for (int b = 0; b < 8; ++b) bytes[b] = static_cast<char>((bits >> (8 * b)) & 0xff);
    out.write(bytes.data(), 8);
  }
}

void read_doubles(std::istream& in, std::span<double> values) {
  std::array<unsigned char, 8> bytes{};
  for (double& v : values) {
    if (!in.read(reinterpret_cast<char*>(bytes.data()), 8))
      throw ParseError("checkpoint payload truncated", 0);
    std::uint64_t bits = 0;
    for (int b = 0; b < 8; ++b) bits |= static_cast<std::uint64_t>(bytes[b]) << (8 * b);
    v = std::bit_cast<double>(bits);
  }
}

bool reserved(const std::string& key) {
  return key == "n" || key == "k" || key == "encoder_widths" || key == "decoder_widths" ||
         key == "end";
}

}  // namespace

std::string Checkpoint::get(const std::string& key, const std::string& fallback) const {
  for (const auto& [k, v] : metadata)
    if (k == key) return v;
  return fallback;
}

void write_checkpoint(std::ostream& out, const VaeParams& params, const Metadata& metadata) {
  params.validate();
  out << kMagic << '\n';
  out << "n=" << params.n << '\n';
  out << "k=" << params.k << '\n';
  out << "encoder_widths=" << join(params.encoder_hidden_widths()) << '\n';
  out << "decoder_widths=" << join(params.decoder_hidden_widths()) << '\n';
  for (const auto& [key, value] : metadata) {
    if (key.empty() || key.find_first_of("=\n") != std::string::npos || reserved(key) ||
        value.find('\n') != std::string::npos)
      throw DomainError("invalid checkpoint metadata key '" + key + "'");
    out << key << '=' << value << '\n';
  }
  out << "end\n";
  for (auto v : params.views()) write_doubles(out, v);
}

Checkpoint read_checkpoint(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kMagic) throw ParseError("not a CVAE1 checkpoint", 1);

  Checkpoint cp;
  std::size_t n = 0, k = 0;
  std::vector<std::size_t> enc, dec;
  bool have_n = false, have_k = false, have_enc = false, have_dec = false, ended = false;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line == "end") {
      ended = true;
      break;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos || eq == 0) throw ParseError("expected key=value", lineno);
    std::string key = line.substr(0, eq), value = line.substr(eq + 1);
    if (key == "n") {
      n = parse_count(value, "n");
      have_n = true;
    } else if (key == "k") {
      k = parse_count(value, "k");
      have_k = true;
    } else if (key == "encoder_widths") {
      enc = parse_widths(value);
      have_enc = true;
    } else if (key == "decoder_widths") {
      dec = parse_widths(value);
      have_dec = true;
    } else {
      cp.metadata.emplace_back(std::move(key), std::move(value));
    }
  }
  if (!ended) throw ParseError("checkpoint manifest not terminated", lineno);
  if (!(have_n && have_k && have_enc && have_dec) || n == 0 || k == 0)
    throw ParseError("checkpoint manifest incomplete", lineno);

  ModelConfig shape;
  shape.k = k;
  shape.encoder_widths = enc;
  shape.decoder_widths = dec;
  cp.params = VaeParams::zeros(n, shape);
  for (auto v : cp.params.views()) read_doubles(in, v);
  if (in.peek() != std::char_traits<char>::eof())
    throw ParseError("trailing bytes after checkpoint payload", 0);
  cp.params.validate();
  return cp;
}

void save_checkpoint(const std::filesystem::path& path, const VaeParams& params,
                     const Metadata& metadata) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  write_checkpoint(out, params, metadata);
  if (!out) throw Error("write failed for " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  return read_checkpoint(in);
}

}  // namespace cvae
