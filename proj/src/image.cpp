#include "ising/image.hpp"

#include <png.h>

#include <cstring>
#include <fstream>
#include <iterator>
#include <stdexcept>
#include <string>

namespace ising
{

RgbImage render_image(const Lattice& lattice)
{
    RgbImage image{lattice.cols(), lattice.rows(), {}};
    image.pixels.reserve(3 * lattice.size());
    for (Spin s : lattice.spins())
    {
        const Rgb& color = s == Spin::Up ? spin_up_color : spin_down_color;
        image.pixels.insert(image.pixels.end(), color.begin(), color.end());
    }
    return image;
}

Lattice lattice_from_image(const RgbImage& image)
{
    if (image.pixels.size() != 3 * image.width * image.height)
        throw std::runtime_error("image buffer size does not match its dimensions");
    std::vector<Spin> spins;
    spins.reserve(image.width * image.height);
    for (std::size_t y = 0; y < image.height; ++y)
    {
        for (std::size_t x = 0; x < image.width; ++x)
        {
            const Rgb px = image.pixel(x, y);
            if (px == spin_up_color)
                spins.push_back(Spin::Up);
            else if (px == spin_down_color)
                spins.push_back(Spin::Down);
            else
                throw std::runtime_error("pixel (" + std::to_string(x) + "," + std::to_string(y) +
                                         ") is not a spin color");
        }
    }
    return Lattice(image.height, image.width, std::move(spins));
}

std::vector<std::uint8_t> encode_png(const RgbImage& image)
{
    png_image desc;
    std::memset(&desc, 0, sizeof desc);
    desc.version = PNG_IMAGE_VERSION;
    desc.width = static_cast<png_uint_32>(image.width);
    desc.height = static_cast<png_uint_32>(image.height);
    desc.format = PNG_FORMAT_RGB;

    png_alloc_size_t size = 0;
    if (!png_image_write_to_memory(&desc, nullptr, &size, 0, image.pixels.data(), 0, nullptr))
        throw std::runtime_error(std::string("png encode: ") + desc.message);
    std::vector<std::uint8_t> out(size);
    if (!png_image_write_to_memory(&desc, out.data(), &size, 0, image.pixels.data(), 0, nullptr))
        throw std::runtime_error(std::string("png encode: ") + desc.message);
    out.resize(size);
    return out;
}

RgbImage decode_png(std::span<const std::uint8_t> bytes)
{
    png_image desc;
    std::memset(&desc, 0, sizeof desc);
    desc.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_memory(&desc, bytes.data(), bytes.size()))
        throw std::runtime_error(std::string("png decode: ") + desc.message);
    desc.format = PNG_FORMAT_RGB;
    RgbImage image{desc.width, desc.height, std::vector<std::uint8_t>(PNG_IMAGE_SIZE(desc))};
    if (!png_image_finish_read(&desc, nullptr, image.pixels.data(), 0, nullptr))
    {
        png_image_free(&desc);
        throw std::runtime_error(std::string("png decode: ") + desc.message);
    }
    return image;
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot open " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes)
{
    std::filesystem::path tmp = path;
    tmp += ".partial";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw std::runtime_error("cannot write " + tmp.string());
        out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
        if (!out)
            throw std::runtime_error("write failed for " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec)
        throw std::runtime_error("cannot rename " + tmp.string() + ": " + ec.message());
}

} // namespace ising
