#include "furrow/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <memory>
#include <string>
#include <vector>

namespace furrow {
namespace {

namespace fs = std::filesystem;

struct DecodedImage {
  int width = 0;
  int height = 0;
  int channels = 0;
  int bit_depth = 0;
  std::vector<std::uint16_t> samples;
};

struct FileCloser {
  void operator()(std::FILE* f) const noexcept {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_file(const fs::path& path, const char* mode) {
  FilePtr f(std::fopen(path.c_str(), mode));
  if (!f) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  return f;
}

bool has_extension(const fs::path& path, std::string_view a, std::string_view b = {}) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext == a || (!b.empty() && ext == b);
}

bool is_pnm(const fs::path& path) { return has_extension(path, ".pgm", ".ppm") || has_extension(path, ".pnm"); }

// libpng reports errors through longjmp; everything with a destructor lives
// outside the setjmp scope.
DecodedImage read_png(const fs::path& path) {
  FilePtr file = open_file(path, "rb");
  png_byte sig[8];
  if (std::fread(sig, 1, 8, file.get()) != 8 || png_sig_cmp(sig, 0, 8) != 0) {
    throw Error(ErrorCode::kFormat, path.string() + " is not a PNG file");
  }
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw Error(ErrorCode::kIo, "png_create_read_struct failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw Error(ErrorCode::kIo, "png_create_info_struct failed");
  }

  DecodedImage out;
  std::vector<png_byte> buffer;
  std::vector<png_bytep> rows;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw Error(ErrorCode::kFormat, "corrupt PNG " + path.string());
  }
  png_init_io(png, file.get());
  png_set_sig_bytes(png, 8);
  png_read_info(png, info);

  const png_byte color = png_get_color_type(png, info);
  const int depth = png_get_bit_depth(png, info);
  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (color & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
  png_read_update_info(png, info);

  out.width = static_cast<int>(png_get_image_width(png, info));
  out.height = static_cast<int>(png_get_image_height(png, info));
  out.channels = png_get_channels(png, info);
  out.bit_depth = png_get_bit_depth(png, info);
  const std::size_t stride = png_get_rowbytes(png, info);
  buffer.resize(stride * out.height);
  rows.resize(out.height);
  for (int y = 0; y < out.height; ++y) rows[y] = buffer.data() + stride * y;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);

  const std::size_t n = static_cast<std::size_t>(out.width) * out.height * out.channels;
  out.samples.resize(n);
  if (out.bit_depth == 16) {
    for (std::size_t i = 0; i < n; ++i) {
      out.samples[i] = static_cast<std::uint16_t>((buffer[2 * i] << 8) | buffer[2 * i + 1]);
    }
  } else {
    std::copy(buffer.begin(), buffer.begin() + static_cast<std::ptrdiff_t>(n), out.samples.begin());
  }
  return out;
}

void write_png(const fs::path& path, const DecodedImage& img) {
  FilePtr file = open_file(path, "wb");
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw Error(ErrorCode::kIo, "png_create_write_struct failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw Error(ErrorCode::kIo, "png_create_info_struct failed");
  }

  const int bytes = img.bit_depth == 16 ? 2 : 1;
  const std::size_t stride = static_cast<std::size_t>(img.width) * img.channels * bytes;
  std::vector<png_byte> buffer(stride * img.height);
  for (std::size_t i = 0; i < img.samples.size(); ++i) {
    if (bytes == 2) {
      buffer[2 * i] = static_cast<png_byte>(img.samples[i] >> 8);
      buffer[2 * i + 1] = static_cast<png_byte>(img.samples[i] & 0xff);
    } else {
      buffer[i] = static_cast<png_byte>(img.samples[i]);
    }
  }
  std::vector<png_bytep> rows(img.height);
  for (int y = 0; y < img.height; ++y) rows[y] = buffer.data() + stride * y;

  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw Error(ErrorCode::kIo, "failed writing PNG " + path.string());
  }
  png_init_io(png, file.get());
  png_set_IHDR(png, info, img.width, img.height, img.bit_depth,
               img.channels == 3 ? PNG_COLOR_TYPE_RGB : PNG_COLOR_TYPE_GRAY,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

// Next header token of a binary PNM, skipping whitespace and '#' comments.
std::string pnm_token(std::istream& in) {
  std::string tok;
  int c = in.get();
  while (c != EOF) {
    if (c == '#') {
      while (c != EOF && c != '\n') c = in.get();
    } else if (!std::isspace(c)) {
      break;
    }
    c = in.get();
  }
  while (c != EOF && !std::isspace(c)) {
    tok.push_back(static_cast<char>(c));
    c = in.get();
  }
  return tok;
}

DecodedImage read_pnm(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  const std::string magic = pnm_token(in);
  DecodedImage out;
  if (magic == "P5") {
    out.channels = 1;
  } else if (magic == "P6") {
    out.channels = 3;
  } else {
    throw Error(ErrorCode::kFormat, path.string() + " is not a binary PGM/PPM");
  }
  try {
    out.width = std::stoi(pnm_token(in));
    out.height = std::stoi(pnm_token(in));
    const int maxval = std::stoi(pnm_token(in));
    if (maxval <= 0 || maxval > 65535) throw std::out_of_range("maxval");
    out.bit_depth = maxval > 255 ? 16 : 8;
  } catch (const std::logic_error&) {
    throw Error(ErrorCode::kFormat, "malformed PNM header in " + path.string());
  }
  if (out.width <= 0 || out.height <= 0) {
    throw Error(ErrorCode::kFormat, "invalid PNM size in " + path.string());
  }
  const std::size_t n = static_cast<std::size_t>(out.width) * out.height * out.channels;
  const std::size_t bytes = out.bit_depth == 16 ? 2 : 1;
  std::vector<unsigned char> raw(n * bytes);
  in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (static_cast<std::size_t>(in.gcount()) != raw.size()) {
    throw Error(ErrorCode::kFormat, "truncated PNM data in " + path.string());
  }
  out.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.samples[i] = bytes == 2 ? static_cast<std::uint16_t>((raw[2 * i] << 8) | raw[2 * i + 1])
                                : raw[i];
  }
  return out;
}

void write_pnm(const fs::path& path, const DecodedImage& img) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  out << (img.channels == 3 ? "P6" : "P5") << '\n'
      << img.width << ' ' << img.height << '\n'
      << (img.bit_depth == 16 ? 65535 : 255) << '\n';
  std::vector<unsigned char> raw;
  raw.reserve(img.samples.size() * 2);
  for (std::uint16_t s : img.samples) {
    if (img.bit_depth == 16) raw.push_back(static_cast<unsigned char>(s >> 8));
    raw.push_back(static_cast<unsigned char>(s & 0xff));
  }
  out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (!out) throw Error(ErrorCode::kIo, "failed writing " + path.string());
}

DecodedImage read_any(const fs::path& path) {
  if (!fs::exists(path)) throw Error(ErrorCode::kIo, "no such file: " + path.string());
  return is_pnm(path) ? read_pnm(path) : read_png(path);
}

void write_any(const fs::path& path, const DecodedImage& img) {
  if (is_pnm(path)) {
    write_pnm(path, img);
  } else {
    write_png(path, img);
  }
}

DecodedImage single_channel_8bit(const fs::path& path) {
  DecodedImage img = read_any(path);
  if (img.channels != 1 || img.bit_depth != 8) {
    throw Error(ErrorCode::kFormat, path.string() + ": expected 8-bit single-channel image");
  }
  return img;
}

}  // namespace

DepthMap load_depth(const fs::path& path, double scale) {
  if (!(scale > 0.0)) throw Error(ErrorCode::kInvalidArgument, "depth scale must be positive");
  DecodedImage img = read_any(path);
  if (img.channels != 1) {
    throw Error(ErrorCode::kFormat, path.string() + ": depth must be single-channel");
  }
  if (img.bit_depth != 16) {
    throw Error(ErrorCode::kFormat, path.string() + ": unsupported bit depth " +
                                        std::to_string(img.bit_depth) + " for depth");
  }
  std::vector<double> meters(img.samples.size());
  std::transform(img.samples.begin(), img.samples.end(), meters.begin(),
                 [scale](std::uint16_t u) { return u == 0 ? kInvalidDepth : u * scale; });
  return DepthMap(img.width, img.height, std::move(meters));
}

void save_depth(const DepthMap& map, const fs::path& path, double scale) {
  if (!(scale > 0.0)) throw Error(ErrorCode::kInvalidArgument, "depth scale must be positive");
  DecodedImage img{map.width(), map.height(), 1, 16, {}};
  img.samples.reserve(map.pixel_count());
  for (double v : map.data()) {
    const double units = std::round(v / scale);
    if (!(units >= 0.0) || units > 65535.0) {
      throw Error(ErrorCode::kOverflow,
                  "depth " + std::to_string(v) + " m does not fit 16 bits at this scale");
    }
    img.samples.push_back(static_cast<std::uint16_t>(units));
  }
  write_any(path, img);
}

RgbImage load_rgb(const fs::path& path) {
  DecodedImage img = read_any(path);
  if (img.bit_depth == 16) {
    for (auto& s : img.samples) s = static_cast<std::uint16_t>(s >> 8);
  }
  std::vector<std::uint8_t> data;
  data.reserve(static_cast<std::size_t>(img.width) * img.height * 3);
  if (img.channels == 3) {
    for (std::uint16_t s : img.samples) data.push_back(static_cast<std::uint8_t>(s));
  } else if (img.channels == 1) {
    for (std::uint16_t s : img.samples) data.insert(data.end(), 3, static_cast<std::uint8_t>(s));
  } else {
    throw Error(ErrorCode::kFormat, path.string() + ": unsupported channel count");
  }
  return RgbImage(img.width, img.height, std::move(data));
}

void save_rgb(const RgbImage& img, const fs::path& path) {
  DecodedImage out{img.width(), img.height(), 3, 8, {img.data().begin(), img.data().end()}};
  write_any(path, out);
}

EdgeMask load_mask(const fs::path& path) {
  DecodedImage img = single_channel_8bit(path);
  std::vector<std::uint8_t> data(img.samples.size());
  std::transform(img.samples.begin(), img.samples.end(), data.begin(),
                 [](std::uint16_t s) { return static_cast<std::uint8_t>(s != 0); });
  return EdgeMask(img.width, img.height, std::move(data));
}

void save_mask(const EdgeMask& mask, const fs::path& path) {
  DecodedImage out{mask.width(), mask.height(), 1, 8, {}};
  out.samples.reserve(mask.pixel_count());
  for (std::uint8_t v : mask.data()) out.samples.push_back(v ? 255 : 0);
  write_any(path, out);
}

SoftMask load_soft_mask(const fs::path& path) {
  DecodedImage img = single_channel_8bit(path);
  std::vector<float> data(img.samples.size());
  std::transform(img.samples.begin(), img.samples.end(), data.begin(),
                 [](std::uint16_t s) { return static_cast<float>(s) / 255.0f; });
  return SoftMask(img.width, img.height, std::move(data));
}

void save_soft_mask(const SoftMask& mask, const fs::path& path) {
  DecodedImage out{mask.width(), mask.height(), 1, 8, {}};
  out.samples.reserve(mask.pixel_count());
  for (float p : mask.data()) {
    out.samples.push_back(static_cast<std::uint16_t>(std::lround(std::clamp(p, 0.0f, 1.0f) * 255.0f)));
  }
  write_any(path, out);
}

}  // namespace furrow
