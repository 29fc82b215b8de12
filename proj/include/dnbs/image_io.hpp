#pragma once

#include "dnbs/haar.hpp"

#include <cstdint>
#include <filesystem>
#include <vector>

namespace dnbs {

/// Binary PGM (P5), 8-bit. Comments in the header are skipped.
Image load_pgm(const std::filesystem::path& path);

/// PNG of any color type; color is converted to luma (0.299 R + 0.587 G + 0.114 B).
Image load_png(const std::filesystem::path& path);

/// Dispatches on extension (.pgm / .png, case-insensitive).
Image load_image(const std::filesystem::path& path);

/// Pixels are rounded and clamped to [0, 255].
void save_pgm(const Image& image, const std::filesystem::path& path);
void save_png(const Image& image, const std::filesystem::path& path);

/// 8-bit RGB raster for annotated output.
struct RgbImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> rgb;  // row-major, 3 bytes per pixel

    static RgbImage from_gray(const Image& gray);
    /// 1-pixel rectangle outline, 0-based top-left; clipped to the raster.
    void draw_rect(int x, int y, int w, int h, std::uint8_t r, std::uint8_t g, std::uint8_t b);
};

void save_png(const RgbImage& image, const std::filesystem::path& path);

}  // namespace dnbs
