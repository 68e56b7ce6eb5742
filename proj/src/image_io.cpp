#include <png.h>

#include <algorithm>
#include <cctype>
#include <fstream>
#include <stdexcept>
#include <string>

#include "ppct/image.hpp"

namespace ppct {

namespace {

std::string lower_extension(const std::filesystem::path& path)
{
    std::string ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    return ext;
}

std::runtime_error io_error(const std::filesystem::path& path, const std::string& what)
{
    return std::runtime_error(path.string() + ": " + what);
}

// PGM header tokens may be separated by arbitrary whitespace and '#' comments.
int read_pgm_int(std::istream& in, const std::filesystem::path& path)
{
    int ch = in.get();
    while (ch != EOF) {
        if (ch == '#') {
            while (ch != EOF && ch != '\n')
                ch = in.get();
        } else if (!std::isspace(ch)) {
            break;
        }
        ch = in.get();
    }
    if (ch == EOF || !std::isdigit(ch))
        throw io_error(path, "malformed PGM header");
    int value = 0;
    while (ch != EOF && std::isdigit(ch)) {
        value = value * 10 + (ch - '0');
        if (value > (1 << 24))
            throw io_error(path, "PGM header value out of range");
        ch = in.get();
    }
    // exactly one whitespace byte terminates the last header token
    if (ch != EOF && !std::isspace(ch))
        in.unget();
    return value;
}

Image load_pgm(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw io_error(path, "cannot open file");
    char magic[2] = {};
    in.read(magic, 2);
    if (!in || magic[0] != 'P' || (magic[1] != '2' && magic[1] != '5'))
        throw io_error(path, "not a P2/P5 PGM file");
    const bool binary = magic[1] == '5';
    const int width = read_pgm_int(in, path);
    const int height = read_pgm_int(in, path);
    const int maxval = read_pgm_int(in, path);
    if (width <= 0 || height <= 0)
        throw io_error(path, "PGM dimensions must be positive");
    if (maxval != 255)
        throw io_error(path, "unsupported PGM maxval " + std::to_string(maxval) + " (only 255)");

    std::vector<double> pixels(static_cast<std::size_t>(width) * height);
    if (binary) {
        std::vector<unsigned char> raw(pixels.size());
        in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
        if (in.gcount() != static_cast<std::streamsize>(raw.size()))
            throw io_error(path, "truncated PGM pixel data");
        std::copy(raw.begin(), raw.end(), pixels.begin());
    } else {
        for (double& p : pixels) {
            int v;
            if (!(in >> v))
                throw io_error(path, "truncated PGM pixel data");
            if (v < 0 || v > maxval)
                throw io_error(path, "PGM sample out of range");
            p = v;
        }
    }
    return Image(width, height, std::move(pixels));
}

void save_pgm(const Image& image, const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw io_error(path, "cannot open file for writing");
    out << "P5\n" << image.width() << ' ' << image.height() << "\n255\n";
    std::vector<unsigned char> raw(image.size());
    std::transform(image.pixels().begin(), image.pixels().end(), raw.begin(), quantize_pixel);
    out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (!out)
        throw io_error(path, "write failed");
}

Image load_png(const std::filesystem::path& path)
{
    png_image png{};
    png.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_file(&png, path.c_str()))
        throw io_error(path, std::string("cannot decode PNG: ") + png.message);
    if (png.format & PNG_FORMAT_FLAG_LINEAR) {
        png_image_free(&png);
        throw io_error(path, "16-bit PNG is not supported");
    }
    const bool color = (png.format & PNG_FORMAT_FLAG_COLOR) != 0;
    png.format = color ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
    const int width = static_cast<int>(png.width);
    const int height = static_cast<int>(png.height);
    const int channels = color ? 3 : 1;
    std::vector<unsigned char> raw(PNG_IMAGE_SIZE(png));
    if (!png_image_finish_read(&png, nullptr, raw.data(), 0, nullptr)) {
        const std::string msg = png.message;
        png_image_free(&png);
        throw io_error(path, "cannot decode PNG: " + msg);
    }

    std::vector<double> pixels(static_cast<std::size_t>(width) * height);
    for (std::size_t i = 0; i < pixels.size(); ++i) {
        const unsigned char* px = raw.data() + i * channels;
        pixels[i] = color ? bt601_luma(px[0], px[1], px[2]) : px[0];
    }
    return Image(width, height, std::move(pixels));
}

void save_png(const Image& image, const std::filesystem::path& path)
{
    std::vector<unsigned char> raw(image.size());
    std::transform(image.pixels().begin(), image.pixels().end(), raw.begin(), quantize_pixel);
    png_image png{};
    png.version = PNG_IMAGE_VERSION;
    png.width = static_cast<png_uint_32>(image.width());
    png.height = static_cast<png_uint_32>(image.height());
    png.format = PNG_FORMAT_GRAY;
    if (!png_image_write_to_file(&png, path.c_str(), 0, raw.data(), 0, nullptr))
        throw io_error(path, std::string("cannot write PNG: ") + png.message);
}

}  // namespace

Image load_image(const std::filesystem::path& path)
{
    if (!std::filesystem::exists(path))
        throw io_error(path, "file does not exist");
    const std::string ext = lower_extension(path);
    if (ext == ".pgm")
        return load_pgm(path);
    if (ext == ".png")
        return load_png(path);
    throw io_error(path, "unsupported image format '" + ext + "' (expected .pgm or .png)");
}

void save_image(const Image& image, const std::filesystem::path& path)
{
    const std::string ext = lower_extension(path);
    if (ext == ".pgm")
        save_pgm(image, path);
    else if (ext == ".png")
        save_png(image, path);
    else
        throw io_error(path, "unsupported image format '" + ext + "' (expected .pgm or .png)");
}

}  // namespace ppct
