#pragma once

#include "qnnv/core/integer.hpp"

#include <cstdint>
#include <filesystem>
#include <span>
#include <string_view>
#include <vector>

namespace qnnv {

/// One labelled image with raw 8-bit pixels.
struct Sample {
  std::vector<std::uint8_t> pixels;
  std::size_t label = 0;
};

/// Reads an IDX image file (magic 0x00000803) and its label file (magic
/// 0x00000801).  Errors name the offending file and, for truncation, the
/// expected and actual byte counts.
std::vector<Sample> load_idx_dataset(const std::filesystem::path& images, const std::filesystem::path& labels);
std::vector<Sample> parse_idx_dataset(std::string_view images, std::string_view labels);

/// Writes samples as IDX files with rows x cols images.
void save_idx_dataset(const std::filesystem::path& images, const std::filesystem::path& labels,
                      std::span<const Sample> samples, std::uint32_t rows, std::uint32_t cols);

/// Keeps the k_in most significant bits of every pixel: p >> (8 - k_in).
IntVector quantize_pixels(std::span<const std::uint8_t> pixels, unsigned k_in);

} // namespace qnnv
