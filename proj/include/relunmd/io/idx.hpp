#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iterator>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "relunmd/core/matrix.hpp"

namespace relunmd {

// IDX (MNIST) files: big-endian 32-bit magic, big-endian 32-bit dimension
// sizes, then unsigned bytes. Images use magic 0x00000803 (count, height,
// width); labels use 0x00000801 (count).

inline constexpr std::uint32_t kIdxImageMagic = 0x00000803;
inline constexpr std::uint32_t kIdxLabelMagic = 0x00000801;

class IdxError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class IdxIoError : public IdxError {
 public:
  using IdxError::IdxError;
};
class IdxBadMagicError : public IdxError {
 public:
  using IdxError::IdxError;
};
class IdxTruncatedError : public IdxError {
 public:
  using IdxError::IdxError;
};
class IdxDimensionOverflowError : public IdxError {
 public:
  using IdxError::IdxError;
};
class IdxCountMismatchError : public IdxError {
 public:
  using IdxError::IdxError;
};

struct ImageDataset {
  Matrix matrix;  // one flattened image per row, values in [0, 1]
  Index image_height = 0;
  Index image_width = 0;
  std::optional<std::vector<int>> labels;
};

namespace detail {

inline std::vector<unsigned char> read_file_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IdxIoError("idx: cannot open '" + path + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline std::uint32_t read_be32(const std::vector<unsigned char>& bytes, std::size_t offset,
                               const std::string& path) {
  if (bytes.size() < offset + 4) throw IdxTruncatedError("idx: header truncated in '" + path + "'");
  return (std::uint32_t{bytes[offset]} << 24) | (std::uint32_t{bytes[offset + 1]} << 16) |
         (std::uint32_t{bytes[offset + 2]} << 8) | std::uint32_t{bytes[offset + 3]};
}

inline void append_be32(std::vector<unsigned char>& out, std::uint32_t v) {
  out.push_back(static_cast<unsigned char>(v >> 24));
  out.push_back(static_cast<unsigned char>(v >> 16));
  out.push_back(static_cast<unsigned char>(v >> 8));
  out.push_back(static_cast<unsigned char>(v));
}

inline void write_file_bytes(const std::string& path, const std::vector<unsigned char>& bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IdxIoError("idx: cannot write '" + path + "'");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

}  // namespace detail

inline ImageDataset load_idx(const std::string& images_path,
                             const std::optional<std::string>& labels_path = std::nullopt) {
  const auto bytes = detail::read_file_bytes(images_path);
  const std::uint32_t magic = detail::read_be32(bytes, 0, images_path);
  if (magic != kIdxImageMagic) throw IdxBadMagicError("idx: bad image magic in '" + images_path + "'");
  const std::uint64_t count = detail::read_be32(bytes, 4, images_path);
  const std::uint64_t height = detail::read_be32(bytes, 8, images_path);
  const std::uint64_t width = detail::read_be32(bytes, 12, images_path);

  const std::uint64_t pixels = height * width;
  if (pixels != 0 && count > std::numeric_limits<std::uint64_t>::max() / pixels)
    throw IdxDimensionOverflowError("idx: dimensions overflow in '" + images_path + "'");
  const std::uint64_t payload = count * pixels;
  if (count > static_cast<std::uint64_t>(std::numeric_limits<Index>::max()) ||
      pixels > static_cast<std::uint64_t>(std::numeric_limits<Index>::max()) ||
      payload > static_cast<std::uint64_t>(std::numeric_limits<std::ptrdiff_t>::max()))
    throw IdxDimensionOverflowError("idx: dimensions overflow in '" + images_path + "'");
  if (bytes.size() < 16 + payload) throw IdxTruncatedError("idx: image payload truncated in '" + images_path + "'");

  ImageDataset out;
  out.image_height = static_cast<Index>(height);
  out.image_width = static_cast<Index>(width);
  out.matrix.resize(static_cast<Index>(count), static_cast<Index>(pixels));
  std::size_t at = 16;
  for (Index i = 0; i < out.matrix.rows(); ++i)
    for (Index j = 0; j < out.matrix.cols(); ++j) out.matrix(i, j) = bytes[at++] / 255.0;

  if (labels_path) {
    const auto lbytes = detail::read_file_bytes(*labels_path);
    if (detail::read_be32(lbytes, 0, *labels_path) != kIdxLabelMagic)
      throw IdxBadMagicError("idx: bad label magic in '" + *labels_path + "'");
    const std::uint64_t lcount = detail::read_be32(lbytes, 4, *labels_path);
    if (lcount != count) throw IdxCountMismatchError("idx: image count and label count differ");
    if (lbytes.size() < 8 + lcount) throw IdxTruncatedError("idx: label payload truncated in '" + *labels_path + "'");
    out.labels = std::vector<int>(lbytes.begin() + 8, lbytes.begin() + 8 + static_cast<std::ptrdiff_t>(lcount));
  }
  return out;
}

/// Writes images (rows of `matrix`, values in [0, 1], rounded to bytes) and
/// optional labels. Used for fixtures.
inline void save_idx(const ImageDataset& data, const std::string& images_path,
                     const std::optional<std::string>& labels_path = std::nullopt) {
  if (data.matrix.cols() != data.image_height * data.image_width)
    throw ParameterError("save_idx: cols != height * width");
  std::vector<unsigned char> bytes;
  detail::append_be32(bytes, kIdxImageMagic);
  detail::append_be32(bytes, static_cast<std::uint32_t>(data.matrix.rows()));
  detail::append_be32(bytes, static_cast<std::uint32_t>(data.image_height));
  detail::append_be32(bytes, static_cast<std::uint32_t>(data.image_width));
  for (Index i = 0; i < data.matrix.rows(); ++i)
    for (Index j = 0; j < data.matrix.cols(); ++j) {
      const double v = std::clamp(data.matrix(i, j), 0.0, 1.0);
      bytes.push_back(static_cast<unsigned char>(std::lround(v * 255.0)));
    }
  detail::write_file_bytes(images_path, bytes);

  if (labels_path) {
    if (!data.labels) throw ParameterError("save_idx: no labels to write");
    std::vector<unsigned char> lbytes;
    detail::append_be32(lbytes, kIdxLabelMagic);
    detail::append_be32(lbytes, static_cast<std::uint32_t>(data.labels->size()));
    for (int label : *data.labels) lbytes.push_back(static_cast<unsigned char>(label));
    detail::write_file_bytes(*labels_path, lbytes);
  }
}

}  // namespace relunmd
