#pragma once

#include <array>
#include <filesystem>

#include "stripid/raster.hpp"

namespace stripid {

inline constexpr int kCanonicalSize = 256;

/// Decodes a PNG, JPEG or BMP file into R,G,B order.
/// Throws FileNotFound, UnsupportedFormat or CorruptImage.
Image load_image(const std::filesystem::path& path);

/// Lossless encoders. Throw Io when the file cannot be written.
void save_png(const Image& img, const std::filesystem::path& path);
void save_bmp(const Image& img, const std::filesystem::path& path);

/// Bilinear resampling with pixel-center alignment and round-half-up.
/// Returns an identical copy when the size already matches.
Image resize(const Image& img, int width, int height);

std::array<Plane, 3> split_planes(const Image& img);

/// Inverse of split_planes; values are rounded and clamped to [0, 255].
Image merge_planes(const Plane& r, const Plane& g, const Plane& b);

/// Luminance 0.299 R + 0.587 G + 0.114 B, unrounded.
Plane to_gray(const Image& img);

/// k x k median with edge replication. k must be odd and positive.
Plane median_filter(const Plane& p, int k);

}  // namespace stripid
