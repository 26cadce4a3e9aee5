#include "qnnv/harness/dataset.hpp"
#include "qnnv/core/error.hpp"

#include <fstream>
#include <sstream>

namespace qnnv {

namespace {

constexpr std::uint32_t kImageMagic = 0x00000803;
constexpr std::uint32_t kLabelMagic = 0x00000801;

std::uint32_t be32(std::string_view bytes, std::size_t at) {
  std::uint32_t v = 0;
  for (std::size_t i = 0; i < 4; ++i) v = (v << 8) | static_cast<unsigned char>(bytes[at + i]);
  return v;
}

void put_be32(std::string& out, std::uint32_t v) {
  for (int s = 24; s >= 0; s -= 8) out.push_back(static_cast<char>((v >> s) & 0xff));
}

void require_size(std::string_view bytes, std::size_t expected, const char* what) {
  if (bytes.size() < expected)
    throw Error(Errc::parse_error, std::string(what) + " file truncated: expected " + std::to_string(expected) +
                                       " bytes, found " + std::to_string(bytes.size()));
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io_error, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

} // namespace

std::vector<Sample> parse_idx_dataset(std::string_view images, std::string_view labels) {
  require_size(images, 16, "image");
  require_size(labels, 8, "label");
  if (be32(images, 0) != kImageMagic) throw Error(Errc::parse_error, "image file: bad magic number");
  if (be32(labels, 0) != kLabelMagic) throw Error(Errc::parse_error, "label file: bad magic number");

  const std::size_t count = be32(images, 4);
  const std::size_t pixels = std::size_t{be32(images, 8)} * be32(images, 12);
  const std::size_t label_count = be32(labels, 4);
  if (count != label_count)
    throw Error(Errc::parse_error, "image/label count mismatch: " + std::to_string(count) + " images, " +
                                       std::to_string(label_count) + " labels");
  require_size(images, 16 + count * pixels, "image");
  require_size(labels, 8 + count, "label");

  std::vector<Sample> out(count);
  for (std::size_t i = 0; i < count; ++i) {
    const char* p = images.data() + 16 + i * pixels;
    out[i].pixels.assign(reinterpret_cast<const std::uint8_t*>(p), reinterpret_cast<const std::uint8_t*>(p) + pixels);
    out[i].label = static_cast<unsigned char>(labels[8 + i]);
  }
  return out;
}

std::vector<Sample> load_idx_dataset(const std::filesystem::path& images, const std::filesystem::path& labels) {
  return parse_idx_dataset(slurp(images), slurp(labels));
}

void save_idx_dataset(const std::filesystem::path& images, const std::filesystem::path& labels,
                      std::span<const Sample> samples, std::uint32_t rows, std::uint32_t cols) {
  std::string img, lab;
  put_be32(img, kImageMagic);
  put_be32(img, static_cast<std::uint32_t>(samples.size()));
  put_be32(img, rows);
  put_be32(img, cols);
  put_be32(lab, kLabelMagic);
  put_be32(lab, static_cast<std::uint32_t>(samples.size()));
  for (const auto& s : samples) {
    if (s.pixels.size() != std::size_t{rows} * cols) throw Error(Errc::shape_mismatch, "sample size differs from rows*cols");
    img.append(s.pixels.begin(), s.pixels.end());
    lab.push_back(static_cast<char>(s.label));
  }
  std::ofstream(images, std::ios::binary).write(img.data(), static_cast<std::streamsize>(img.size()));
  std::ofstream(labels, std::ios::binary).write(lab.data(), static_cast<std::streamsize>(lab.size()));
}

IntVector quantize_pixels(std::span<const std::uint8_t> pixels, unsigned k_in) {
  if (k_in == 0 || k_in > 8) throw Error(Errc::invalid_input, "pixel quantization needs 1 <= k_in <= 8");
  IntVector out;
  out.reserve(pixels.size());
  for (std::uint8_t p : pixels) out.emplace_back(p >> (8 - k_in));
  return out;
}

} // namespace qnnv
