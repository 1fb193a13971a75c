#ifndef SALRANK_PGM_HPP
#define SALRANK_PGM_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "salrank/types.hpp"

namespace salrank {

// Binary 8-bit PGM (P5, maxval 255). Byte v maps to intensity v/255;
// writing rounds to the nearest 1/255 step.
SaliencyMap decode_pgm(const std::vector<std::uint8_t>& bytes, const std::string& origin = "<memory>");
std::vector<std::uint8_t> encode_pgm(const SaliencyMap& map);

SaliencyMap read_map(const std::string& path);
void write_map(const SaliencyMap& map, const std::string& path);

std::uint8_t quantize_intensity(float v);

}  // namespace salrank

#endif  // SALRANK_PGM_HPP
