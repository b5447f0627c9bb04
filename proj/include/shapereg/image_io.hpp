#pragma once

#include <cstdint>
#include <filesystem>
#include <span>

#include "shapereg/image.hpp"

namespace shapereg {

enum class ImageFormat { Auto, Bmp, Png, Pnm };

/// Loads BMP (8/24/32-bit uncompressed), PNG (any bit depth, expanded to
/// 8-bit RGBA) or plain-ASCII PBM/PGM/PPM. Alpha is flattened against white.
///
/// Throws IoError when the file cannot be read and FormatError when it does
/// not parse; both carry the path, FormatError also the byte offset when known.
RasterImage load_image(const std::filesystem::path& path,
                       ImageFormat format = ImageFormat::Auto);

/// Loads any supported file as a binary image. PBM bits are taken verbatim;
/// everything else goes through luminance and binarize.
BinaryImage load_binary(const std::filesystem::path& path);

/// Decoders over an in-memory buffer. `name` is only used in error messages.
RasterImage decode_image(std::span<const std::uint8_t> bytes,
                         const std::string& name,
                         ImageFormat format = ImageFormat::Auto);
BinaryImage decode_binary(std::span<const std::uint8_t> bytes,
                          const std::string& name);

/// Plain PBM (P1). 1-pixels are written as '1'.
void save_pbm(const BinaryImage& img, const std::filesystem::path& path);
/// 8-bit greyscale PNG with 1-pixels white, so load_binary reads it back.
void save_png(const BinaryImage& img, const std::filesystem::path& path);
/// Chooses PBM or PNG from the file extension (default PBM).
void save_binary(const BinaryImage& img, const std::filesystem::path& path);

}  // namespace shapereg
