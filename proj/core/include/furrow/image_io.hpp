#pragma once

#include <filesystem>

#include "furrow/image.hpp"

namespace furrow {

inline constexpr double kDefaultDepthScale = 0.001;  // meters per stored unit

/// Reads a 16-bit single-channel PNG or PGM; stored unit u becomes u * scale
/// meters and 0 stays invalid.
DepthMap load_depth(const std::filesystem::path& path, double scale = kDefaultDepthScale);

/// Writes a 16-bit PNG (or PGM for .pgm paths). Throws kOverflow when a value
/// does not fit in 16 bits after rounding at `scale`.
void save_depth(const DepthMap& map, const std::filesystem::path& path,
                double scale = kDefaultDepthScale);

/// 8-bit RGB PNG or PPM. Gray PNGs are expanded to three channels.
RgbImage load_rgb(const std::filesystem::path& path);
void save_rgb(const RgbImage& img, const std::filesystem::path& path);

/// 8-bit single-channel PNG/PGM; any nonzero sample is an edge.
EdgeMask load_mask(const std::filesystem::path& path);
/// Writes {0, 255}.
void save_mask(const EdgeMask& mask, const std::filesystem::path& path);

/// 8-bit single-channel PNG/PGM holding probability x 255.
SoftMask load_soft_mask(const std::filesystem::path& path);
void save_soft_mask(const SoftMask& mask, const std::filesystem::path& path);

}  // namespace furrow
