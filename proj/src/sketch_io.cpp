#include <array>
#include <bit>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "fastgm/error.hpp"
#include "fastgm/sketch.hpp"

namespace fastgm {

namespace {

constexpr std::array<char, 4> kMagic = {'G', 'M', 'S', 'K'};
constexpr std::uint16_t kVersion = 1;
constexpr char kTextHeader[] = "gmsketch";
// Refuse absurd register counts from corrupt headers before allocating.
constexpr std::uint32_t kMaxK = 1u << 28;

template <typename T>
void put_le(std::ostream& out, T value) {
  std::array<char, sizeof(T)> bytes{};
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    bytes[i] = static_cast<char>((static_cast<std::uint64_t>(value) >> (8 * i)) & 0xff);
  }
  out.write(bytes.data(), bytes.size());
}

template <typename T>
T get_le(std::istream& in) {
  std::array<unsigned char, sizeof(T)> bytes{};
  in.read(reinterpret_cast<char*>(bytes.data()), bytes.size());
  if (!in) throw Error(ErrorCode::kParse, "truncated binary sketch");
  std::uint64_t value = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) value |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
  return static_cast<T>(value);
}

void write_binary(std::ostream& out, const GumbelMaxSketch& sketch) {
  out.write(kMagic.data(), kMagic.size());
  put_le<std::uint16_t>(out, kVersion);
  put_le<std::uint16_t>(out, 0);
  put_le<std::uint32_t>(out, sketch.k());
  put_le<std::uint64_t>(out, sketch.fingerprint());
  for (std::uint32_t j = 0; j < sketch.k(); ++j) {
    put_le<std::uint64_t>(out, sketch.s()[j]);
    put_le<std::uint64_t>(out, std::bit_cast<std::uint64_t>(sketch.y()[j]));
  }
}

void write_text(std::ostream& out, const GumbelMaxSketch& sketch) {
  out << kTextHeader << ' ' << kVersion << '\n';
  out << "k " << sketch.k() << " fingerprint " << std::hex << std::setw(16) << std::setfill('0')
      << sketch.fingerprint() << std::dec << std::setfill(' ') << '\n';
  char buf[64];
  for (std::uint32_t j = 0; j < sketch.k(); ++j) {
    std::snprintf(buf, sizeof(buf), "%a", sketch.y()[j]);
    out << sketch.s()[j] << ' ' << buf << '\n';
  }
}

GumbelMaxSketch build(std::uint64_t fingerprint, std::vector<ElementId> s, std::vector<double> y) {
  try {
    return GumbelMaxSketch(fingerprint, std::move(s), std::move(y));
  } catch (const Error& e) {
    throw Error(ErrorCode::kParse, std::string("invalid sketch contents: ") + e.what());
  }
}

GumbelMaxSketch read_binary(std::istream& in) {
  const auto version = get_le<std::uint16_t>(in);
  if (version != kVersion) {
    throw Error(ErrorCode::kParse, "unsupported sketch version " + std::to_string(version));
  }
  get_le<std::uint16_t>(in);
  const auto k = get_le<std::uint32_t>(in);
  if (k == 0 || k > kMaxK) throw Error(ErrorCode::kParse, "bad register count in sketch header");
  const auto fingerprint = get_le<std::uint64_t>(in);
  std::vector<ElementId> s(k);
  std::vector<double> y(k);
  for (std::uint32_t j = 0; j < k; ++j) {
    s[j] = get_le<std::uint64_t>(in);
    y[j] = std::bit_cast<double>(get_le<std::uint64_t>(in));
  }
  return build(fingerprint, std::move(s), std::move(y));
}

GumbelMaxSketch read_text(std::istream& in) {
  std::string word;
  unsigned version = 0;
  if (!(in >> word >> version) || word != kTextHeader) {
    throw Error(ErrorCode::kParse, "missing text sketch header");
  }
  if (version != kVersion) {
    throw Error(ErrorCode::kParse, "unsupported sketch version " + std::to_string(version));
  }
  std::string k_tag, fp_tag, fp_hex;
  std::uint64_t k = 0;
  if (!(in >> k_tag >> k >> fp_tag >> fp_hex) || k_tag != "k" || fp_tag != "fingerprint") {
    throw Error(ErrorCode::kParse, "malformed text sketch header");
  }
  if (k == 0 || k > kMaxK) throw Error(ErrorCode::kParse, "bad register count in sketch header");
  const std::uint64_t fingerprint = std::strtoull(fp_hex.c_str(), nullptr, 16);
  std::vector<ElementId> s(k);
  std::vector<double> y(k);
  for (std::uint64_t j = 0; j < k; ++j) {
    std::string y_token;
    if (!(in >> s[j] >> y_token)) {
      throw Error(ErrorCode::kParse, "text sketch ended at register " + std::to_string(j));
    }
    char* end = nullptr;
    y[j] = std::strtod(y_token.c_str(), &end);
    if (end == y_token.c_str() || *end != '\0') {
      throw Error(ErrorCode::kParse, "bad y value '" + y_token + "'");
    }
  }
  return build(fingerprint, std::move(s), std::move(y));
}

}  // namespace

void write_sketch(std::ostream& out, const GumbelMaxSketch& sketch, SketchFormat format) {
  if (format == SketchFormat::kBinary) {
    write_binary(out, sketch);
  } else {
    write_text(out, sketch);
  }
  if (!out) throw Error(ErrorCode::kIo, "failed writing sketch");
}

GumbelMaxSketch read_sketch(std::istream& in) {
  std::array<char, 4> head{};
  in.read(head.data(), head.size());
  if (!in) throw Error(ErrorCode::kParse, "sketch input too short");
  if (head == kMagic) return read_binary(in);
  // Not binary: rewind what we consumed and parse as text.
  std::string rest(head.data(), head.size());
  std::stringstream text;
  text << rest << in.rdbuf();
  return read_text(text);
}

void save_sketch(const std::string& path, const GumbelMaxSketch& sketch, SketchFormat format) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot open " + path + " for writing");
  write_sketch(out, sketch, format);
}

GumbelMaxSketch load_sketch(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path);
  return read_sketch(in);
}

}  // namespace fastgm
