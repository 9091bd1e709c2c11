#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include "vchange/raster.hpp"

namespace vchange {

// FR32 float raster file: magic "FR32", u32 LE width, u32 LE height, then
// width*height little-endian IEEE-754 32-bit values, row-major.
std::vector<uint8_t> encode_fr32(const FloatRaster& raster);
FloatRaster decode_fr32(const std::vector<uint8_t>& bytes);

// Binary masks travel as 8-bit grayscale PNG: 0 = no change, 255 = change.
// On decode any gray value >= 128 counts as change.
std::vector<uint8_t> encode_mask_png(const BinaryMask& mask);
BinaryMask decode_mask_png(const std::vector<uint8_t>& bytes);

std::vector<uint8_t> encode_rgb_png(const RgbImage& image);
RgbImage decode_rgb_png(const std::vector<uint8_t>& bytes);

using DecodedRaster = std::variant<FloatRaster, BinaryMask>;

// Sniffs the magic bytes: FR32 -> FloatRaster, PNG -> BinaryMask.
DecodedRaster decode_raster(const std::vector<uint8_t>& bytes);
std::vector<uint8_t> encode_raster(const DecodedRaster& raster);

std::vector<uint8_t> read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::vector<uint8_t>& bytes);
void write_file(const std::filesystem::path& path, const std::string& text);

}  // namespace vchange
