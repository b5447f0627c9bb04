#include "shapereg/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <string>
#include <vector>

#include "shapereg/error.hpp"

namespace shapereg {

namespace {

using Bytes = std::span<const std::uint8_t>;

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path.string(), "cannot open file");
  std::vector<std::uint8_t> data((std::istreambuf_iterator<char>(in)),
                                 std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError(path.string(), "read failed");
  return data;
}

ImageFormat sniff(Bytes bytes, const std::string& name) {
  static constexpr std::uint8_t kPngMagic[8] = {0x89, 'P', 'N', 'G',
                                                '\r', '\n', 0x1a, '\n'};
  if (bytes.size() >= 2 && bytes[0] == 'B' && bytes[1] == 'M') return ImageFormat::Bmp;
  if (bytes.size() >= 8 && std::equal(kPngMagic, kPngMagic + 8, bytes.begin())) {
    return ImageFormat::Png;
  }
  if (bytes.size() >= 2 && bytes[0] == 'P' && bytes[1] >= '1' && bytes[1] <= '3') {
    return ImageFormat::Pnm;
  }
  throw FormatError(name, "unrecognised image signature", 0);
}

// ---------------------------------------------------------------------------
// Plain PNM

class PnmReader {
 public:
  PnmReader(Bytes bytes, const std::string& name) : bytes_(bytes), name_(name) {}

  std::size_t pos() const { return pos_; }

  void skip_space() {
    while (pos_ < bytes_.size()) {
      const auto c = bytes_[pos_];
      if (c == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else if (std::isspace(c)) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  long number(long max_value) {
    skip_space();
    const std::size_t start = pos_;
    long value = 0;
    while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
      value = value * 10 + (bytes_[pos_] - '0');
      if (value > max_value) throw FormatError(name_, "value out of range", start);
      ++pos_;
    }
    if (pos_ == start) {
      throw FormatError(name_,
                        pos_ >= bytes_.size() ? "unexpected end of file"
                                              : "expected a decimal number",
                        start);
    }
    return value;
  }

  // Plain PBM allows bits without separating whitespace.
  int bit() {
    skip_space();
    if (pos_ >= bytes_.size()) throw FormatError(name_, "unexpected end of file", pos_);
    const auto c = bytes_[pos_];
    if (c != '0' && c != '1') throw FormatError(name_, "expected 0 or 1", pos_);
    ++pos_;
    return c - '0';
  }

 private:
  Bytes bytes_;
  const std::string& name_;
  std::size_t pos_ = 2;
};

constexpr long kMaxDimension = 1 << 16;

struct PnmHeader {
  char kind;
  int width;
  int height;
  long maxval;
};

PnmHeader read_pnm_header(PnmReader& reader, Bytes bytes) {
  PnmHeader h{static_cast<char>(bytes[1]), 0, 0, 1};
  const std::size_t dim_at = reader.pos();
  h.width = static_cast<int>(reader.number(kMaxDimension));
  h.height = static_cast<int>(reader.number(kMaxDimension));
  if (h.width < 1 || h.height < 1) {
    throw FormatError("", "zero image dimension", dim_at);
  }
  if (h.kind != '1') h.maxval = reader.number(65535);
  if (h.maxval < 1) throw FormatError("", "maxval must be positive", reader.pos());
  return h;
}

std::uint8_t scale_sample(long v, long maxval) {
  return static_cast<std::uint8_t>((v * 255 + maxval / 2) / maxval);
}

BinaryImage decode_pbm(Bytes bytes, const std::string& name) {
  PnmReader reader(bytes, name);
  PnmHeader h;
  try {
    h = read_pnm_header(reader, bytes);
  } catch (const FormatError& e) {
    throw FormatError(name, "malformed PBM header", e.offset());
  }
  BinaryImage img(h.width, h.height);
  for (int y = 0; y < h.height; ++y) {
    for (int x = 0; x < h.width; ++x) img.set(x, y, reader.bit() == 1);
  }
  return img;
}

RasterImage decode_pnm(Bytes bytes, const std::string& name) {
  if (bytes[1] == '1') {
    const BinaryImage bin = decode_pbm(bytes, name);
    // PBM 1 is foreground; map it to the grey level that binarizes to 1.
    RasterImage out(bin.width(), bin.height());
    for (int y = 0; y < bin.height(); ++y) {
      for (int x = 0; x < bin.width(); ++x) {
        const std::uint8_t v = bin.at(x, y) ? 255 : 0;
        out.set(x, y, {v, v, v});
      }
    }
    return out;
  }
  PnmReader reader(bytes, name);
  PnmHeader h;
  try {
    h = read_pnm_header(reader, bytes);
  } catch (const FormatError& e) {
    throw FormatError(name, "malformed PNM header", e.offset());
  }
  RasterImage out(h.width, h.height);
  for (int y = 0; y < h.height; ++y) {
    for (int x = 0; x < h.width; ++x) {
      if (h.kind == '2') {
        const auto v = scale_sample(reader.number(h.maxval), h.maxval);
        out.set(x, y, {v, v, v});
      } else {
        const auto r = scale_sample(reader.number(h.maxval), h.maxval);
        const auto g = scale_sample(reader.number(h.maxval), h.maxval);
        const auto b = scale_sample(reader.number(h.maxval), h.maxval);
        out.set(x, y, {r, g, b});
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// BMP

std::uint32_t le32(Bytes b, std::size_t at) {
  return static_cast<std::uint32_t>(b[at]) | (static_cast<std::uint32_t>(b[at + 1]) << 8) |
         (static_cast<std::uint32_t>(b[at + 2]) << 16) |
         (static_cast<std::uint32_t>(b[at + 3]) << 24);
}

std::uint16_t le16(Bytes b, std::size_t at) {
  return static_cast<std::uint16_t>(b[at] | (b[at + 1] << 8));
}

RasterImage decode_bmp(Bytes bytes, const std::string& name) {
  constexpr std::size_t kFileHeader = 14;
  if (bytes.size() < kFileHeader + 40) {
    throw FormatError(name, "truncated BMP header", bytes.size());
  }
  const std::uint32_t data_offset = le32(bytes, 10);
  const std::uint32_t dib_size = le32(bytes, 14);
  if (dib_size < 40) throw FormatError(name, "unsupported BMP core header", 14);
  const auto width = static_cast<std::int32_t>(le32(bytes, 18));
  const auto raw_height = static_cast<std::int32_t>(le32(bytes, 22));
  const std::uint16_t bpp = le16(bytes, 28);
  const std::uint32_t compression = le32(bytes, 30);
  const std::uint32_t colors_used = le32(bytes, 46);

  if (width < 1 || width > kMaxDimension || raw_height == 0 ||
      raw_height > kMaxDimension || raw_height < -kMaxDimension) {
    throw FormatError(name, "invalid BMP dimensions", 18);
  }
  // BI_RGB, or BI_BITFIELDS for 32-bit files with the default BGRA masks.
  if (compression != 0 && !(compression == 3 && bpp == 32)) {
    throw FormatError(name, "compressed BMP not supported", 30);
  }
  if (bpp != 8 && bpp != 24 && bpp != 32) {
    throw FormatError(name, "unsupported BMP bit depth " + std::to_string(bpp), 28);
  }

  const bool top_down = raw_height < 0;
  const int height = top_down ? -raw_height : raw_height;

  std::vector<Rgb> palette;
  if (bpp == 8) {
    const std::size_t entries = colors_used ? colors_used : 256;
    const std::size_t at = kFileHeader + dib_size;
    if (entries > 256 || at + entries * 4 > bytes.size()) {
      throw FormatError(name, "truncated BMP palette", at);
    }
    for (std::size_t i = 0; i < entries; ++i) {
      palette.push_back({bytes[at + 4 * i + 2], bytes[at + 4 * i + 1], bytes[at + 4 * i]});
    }
  }

  const std::size_t row_bytes = ((static_cast<std::size_t>(width) * bpp + 31) / 32) * 4;
  const std::size_t needed = data_offset + row_bytes * height;
  if (data_offset > bytes.size() || needed > bytes.size()) {
    throw FormatError(name, "truncated BMP pixel data", bytes.size());
  }

  RasterImage out(width, height);
  for (int row = 0; row < height; ++row) {
    const int y = top_down ? row : height - 1 - row;
    const std::size_t base = data_offset + row_bytes * row;
    for (int x = 0; x < width; ++x) {
      if (bpp == 8) {
        const std::uint8_t idx = bytes[base + x];
        if (idx >= palette.size()) {
          throw FormatError(name, "palette index out of range", base + x);
        }
        out.set(x, y, palette[idx]);
      } else {
        const std::size_t at = base + static_cast<std::size_t>(x) * (bpp / 8);
        out.set(x, y, {bytes[at + 2], bytes[at + 1], bytes[at]});
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// PNG

RasterImage decode_png(Bytes bytes, const std::string& name) {
  png_image image;
  std::memset(&image, 0, sizeof image);
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size())) {
    throw FormatError(name, std::string("malformed PNG: ") + image.message);
  }
  image.format = PNG_FORMAT_RGBA;
  if (image.width < 1 || image.height < 1 || image.width > kMaxDimension ||
      image.height > kMaxDimension) {
    png_image_free(&image);
    throw FormatError(name, "invalid PNG dimensions");
  }
  std::vector<std::uint8_t> buffer(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, buffer.data(), 0, nullptr)) {
    const std::string msg = image.message;
    png_image_free(&image);
    throw FormatError(name, "malformed PNG: " + msg);
  }
  const int width = static_cast<int>(image.width);
  const int height = static_cast<int>(image.height);
  RasterImage out(width, height);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const std::uint8_t* px = &buffer[(static_cast<std::size_t>(y) * width + x) * 4];
      const unsigned a = px[3];
      auto over_white = [a](unsigned c) {
        return static_cast<std::uint8_t>((c * a + 255u * (255u - a) + 127u) / 255u);
      };
      out.set(x, y, {over_white(px[0]), over_white(px[1]), over_white(px[2])});
    }
  }
  return out;
}

}  // namespace

RasterImage decode_image(std::span<const std::uint8_t> bytes, const std::string& name,
                         ImageFormat format) {
  if (bytes.empty()) throw FormatError(name, "empty file", 0);
  if (format == ImageFormat::Auto) format = sniff(bytes, name);
  switch (format) {
    case ImageFormat::Bmp:
      return decode_bmp(bytes, name);
    case ImageFormat::Png:
      return decode_png(bytes, name);
    case ImageFormat::Pnm:
      if (bytes.size() < 2 || bytes[0] != 'P') {
        throw FormatError(name, "missing PNM magic", 0);
      }
      return decode_pnm(bytes, name);
    case ImageFormat::Auto:
      break;
  }
  throw FormatError(name, "unknown format");
}

BinaryImage decode_binary(std::span<const std::uint8_t> bytes, const std::string& name) {
  if (bytes.size() >= 2 && bytes[0] == 'P' && bytes[1] == '1') {
    return decode_pbm(bytes, name);
  }
  return to_binary(decode_image(bytes, name));
}

RasterImage load_image(const std::filesystem::path& path, ImageFormat format) {
  const auto data = read_file(path);
  return decode_image(data, path.string(), format);
}

BinaryImage load_binary(const std::filesystem::path& path) {
  const auto data = read_file(path);
  return decode_binary(data, path.string());
}

void save_pbm(const BinaryImage& img, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(path.string(), "cannot open for writing");
  out << "P1\n" << img.width() << ' ' << img.height() << '\n';
  for (int y = 0; y < img.height(); ++y) {
    int column = 0;
    for (int x = 0; x < img.width(); ++x) {
      // Plain PBM lines should stay under 70 characters.
      if (column == 69) {
        out << '\n';
        column = 0;
      }
      out << (img.at(x, y) ? '1' : '0');
      ++column;
    }
    out << '\n';
  }
  if (!out) throw IoError(path.string(), "write failed");
}

void save_png(const BinaryImage& img, const std::filesystem::path& path) {
  std::vector<std::uint8_t> gray(static_cast<std::size_t>(img.width()) * img.height());
  std::transform(img.bits().begin(), img.bits().end(), gray.begin(),
                 [](std::uint8_t b) { return static_cast<std::uint8_t>(b ? 255 : 0); });
  png_image image;
  std::memset(&image, 0, sizeof image);
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(img.width());
  image.height = static_cast<png_uint_32>(img.height());
  image.format = PNG_FORMAT_GRAY;
  if (!png_image_write_to_file(&image, path.string().c_str(), 0, gray.data(), 0,
                               nullptr)) {
    throw IoError(path.string(), std::string("PNG write failed: ") + image.message);
  }
}

void save_binary(const BinaryImage& img, const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (ext == ".png") {
    save_png(img, path);
  } else {
    save_pbm(img, path);
  }
}

}  // namespace shapereg
