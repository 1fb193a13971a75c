#include "salrank/pgm.hpp"

#include <cctype>
#include <cmath>

#include "salrank/binary_io.hpp"
#include "salrank/errors.hpp"

namespace salrank {

namespace {

class HeaderScanner {
 public:
  HeaderScanner(const std::vector<std::uint8_t>& b, const std::string& origin)
      : b_(b), origin_(origin) {}

  void skip_space_and_comments() {
    while (pos_ < b_.size()) {
      if (std::isspace(b_[pos_])) {
        ++pos_;
      } else if (b_[pos_] == '#') {
        while (pos_ < b_.size() && b_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  long number(const char* field) {
    skip_space_and_comments();
    long v = 0;
    std::size_t digits = 0;
    while (pos_ < b_.size() && std::isdigit(b_[pos_])) {
      v = v * 10 + (b_[pos_] - '0');
      if (v > 1'000'000) throw ValidationError(origin_ + ": " + field + " out of range");
      ++pos_;
      ++digits;
    }
    if (digits == 0) throw ValidationError(origin_ + ": malformed PGM header field '" + field + "'");
    return v;
  }

  std::size_t pos_ = 0;

 private:
  const std::vector<std::uint8_t>& b_;
  const std::string& origin_;
};

}  // namespace

std::uint8_t quantize_intensity(float v) {
  const float c = std::fmin(1.0f, std::fmax(0.0f, v));
  return static_cast<std::uint8_t>(std::lround(c * 255.0f));
}

SaliencyMap decode_pgm(const std::vector<std::uint8_t>& bytes, const std::string& origin) {
  if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '5') {
    throw ValidationError(origin + ": unsupported format (only binary P5 PGM is accepted)");
  }
  HeaderScanner scan(bytes, origin);
  scan.pos_ = 2;
  const long width = scan.number("width");
  const long height = scan.number("height");
  const long maxval = scan.number("maxval");
  if (maxval != 255) {
    throw ValidationError(origin + ": unsupported format: maxval " + std::to_string(maxval) +
                          " (only 255 is accepted)");
  }
  if (width < 1 || height < 1) throw ValidationError(origin + ": empty image dimensions");
  if (scan.pos_ >= bytes.size() || !std::isspace(bytes[scan.pos_])) {
    throw ValidationError(origin + ": missing whitespace after PGM header");
  }
  ++scan.pos_;
  const std::size_t expected = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  const std::size_t available = bytes.size() - scan.pos_;
  if (available != expected) {
    throw ValidationError(origin + ": dimension header mismatch: " + std::to_string(width) + "x" +
                          std::to_string(height) + " needs " + std::to_string(expected) +
                          " pixel bytes, found " + std::to_string(available));
  }
  SaliencyMap map(static_cast<int>(width), static_cast<int>(height));
  for (std::size_t i = 0; i < expected; ++i) {
    map.data[i] = static_cast<float>(bytes[scan.pos_ + i]) / 255.0f;
  }
  return map;
}

std::vector<std::uint8_t> encode_pgm(const SaliencyMap& map) {
  if (map.width < 1 || map.height < 1 || map.size() != static_cast<std::size_t>(map.width) * map.height) {
    throw ValidationError("cannot encode map: inconsistent dimensions");
  }
  const std::string header =
      "P5\n" + std::to_string(map.width) + " " + std::to_string(map.height) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.reserve(out.size() + map.size());
  for (float v : map.data) out.push_back(quantize_intensity(v));
  return out;
}

SaliencyMap read_map(const std::string& path) {
  return decode_pgm(detail::read_file_bytes(path), path);
}

void write_map(const SaliencyMap& map, const std::string& path) {
  detail::write_file_bytes(path, encode_pgm(map));
}

}  // namespace salrank
