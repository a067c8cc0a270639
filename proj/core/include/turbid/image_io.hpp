#pragma once

#include <filesystem>

#include "turbid/image.hpp"

namespace turbid {

/// Portable float map, single channel, little endian, stored bottom row
/// first as the format requires. Values are written as 32-bit floats.
void write_pfm(const std::filesystem::path& path, const ImageD& image);
ImageD read_pfm(const std::filesystem::path& path);

/// 8-bit grayscale PNG of `image` mapped linearly from [0, white] to
/// [0, 255] and clamped.
void write_png(const std::filesystem::path& path, const ImageD& image, double white);

}  // namespace turbid
