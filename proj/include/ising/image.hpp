#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "ising/lattice.hpp"

namespace ising
{

using Rgb = std::array<std::uint8_t, 3>;

/// Spin-up sites render blue, spin-down sites yellow.
inline constexpr Rgb spin_up_color{31, 119, 180};
inline constexpr Rgb spin_down_color{255, 221, 51};

/// 8-bit RGB raster, row-major, 3 bytes per pixel.
struct RgbImage
{
    std::size_t width = 0;
    std::size_t height = 0;
    std::vector<std::uint8_t> pixels;

    Rgb pixel(std::size_t x, std::size_t y) const
    {
        const std::size_t i = 3 * (y * width + x);
        return {pixels[i], pixels[i + 1], pixels[i + 2]};
    }

    friend bool operator==(const RgbImage&, const RgbImage&) = default;
};

/// One pixel per site; image row r is lattice row r.
RgbImage render_image(const Lattice& lattice);

/// Inverse of render_image. Throws std::runtime_error on a pixel that is neither palette color.
Lattice lattice_from_image(const RgbImage& image);

/// Lossless PNG encoding (8-bit RGB, no ancillary chunks); the same image always encodes to the same bytes.
std::vector<std::uint8_t> encode_png(const RgbImage& image);
RgbImage decode_png(std::span<const std::uint8_t> bytes);

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
/// Writes via a temporary sibling and renames, so an interrupted write never leaves a truncated file.
void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

} // namespace ising
