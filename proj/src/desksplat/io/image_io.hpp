#pragma once

#include <string>

#include "desksplat/core/image.hpp"

namespace desksplat {

// 8-bit PNG. Grayscale files load as 1-channel, color as 3-channel (alpha
// dropped); values scaled to [0,1]. Writing accepts 1 or 3 channels and
// clamps/rounds to 8 bits.
Image read_png(const std::string& path);
void write_png(const std::string& path, const Image& img);

// PFM float maps: "Pf" = 1 channel, "PF" = 3 channels; negative scale means
// little-endian; scanlines stored bottom-up (converted to top-down in memory).
Image read_pfm(const std::string& path);
void write_pfm(const std::string& path, const Image& img);

}  // namespace desksplat
