#include "dnbs/image_io.hpp"

#include "dnbs/errors.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <string>

namespace dnbs {
namespace {

std::uint8_t to_byte(double v) {
    return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
}

// Reads the next header token, skipping whitespace and '#' comments.
std::string pgm_token(std::istream& in) {
    std::string token;
    int c = in.get();
    while (c != EOF) {
        if (c == '#') {
            while (c != EOF && c != '\n') c = in.get();
        } else if (std::isspace(c)) {
            if (!token.empty()) break;
        } else {
            token.push_back(static_cast<char>(c));
        }
        c = in.get();
    }
    return token;
}

void write_png_raw(const std::filesystem::path& path, int width, int height, png_uint_32 format,
                   const std::uint8_t* data) {
    png_image img{};
    img.version = PNG_IMAGE_VERSION;
    img.width = static_cast<png_uint_32>(width);
    img.height = static_cast<png_uint_32>(height);
    img.format = format;
    if (!png_image_write_to_file(&img, path.c_str(), 0, data, 0, nullptr)) {
        const std::string message = img.message;
        png_image_free(&img);
        throw IoError("png write " + path.string() + ": " + message);
    }
}

}  // namespace

Image load_pgm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    if (pgm_token(in) != "P5") throw IoError(path.string() + ": not a binary PGM (P5)");
    int width = 0, height = 0, maxval = 0;
    try {
        width = std::stoi(pgm_token(in));
        height = std::stoi(pgm_token(in));
        maxval = std::stoi(pgm_token(in));
    } catch (const std::exception&) {
        throw IoError(path.string() + ": malformed PGM header");
    }
    if (width < 1 || height < 1 || maxval < 1 || maxval > 255) {
        throw IoError(path.string() + ": unsupported PGM geometry or depth");
    }
    std::vector<unsigned char> raw(static_cast<std::size_t>(width) * height);
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (in.gcount() != static_cast<std::streamsize>(raw.size())) throw IoError(path.string() + ": truncated PGM");
    std::vector<double> pixels(raw.begin(), raw.end());
    return Image(width, height, std::move(pixels));
}

Image load_png(const std::filesystem::path& path) {
    png_image img{};
    img.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_file(&img, path.c_str())) {
        throw IoError("png read " + path.string() + ": " + img.message);
    }
    const bool color = (img.format & PNG_FORMAT_FLAG_COLOR) != 0;
    img.format = color ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
    const int width = static_cast<int>(img.width);
    const int height = static_cast<int>(img.height);
    std::vector<std::uint8_t> raw(PNG_IMAGE_SIZE(img));
    if (!png_image_finish_read(&img, nullptr, raw.data(), 0, nullptr)) {
        const std::string message = img.message;
        png_image_free(&img);
        throw IoError("png read " + path.string() + ": " + message);
    }
    std::vector<double> pixels(static_cast<std::size_t>(width) * height);
    for (std::size_t i = 0; i < pixels.size(); ++i) {
        pixels[i] = color ? 0.299 * raw[3 * i] + 0.587 * raw[3 * i + 1] + 0.114 * raw[3 * i + 2]
                          : static_cast<double>(raw[i]);
    }
    return Image(width, height, std::move(pixels));
}

Image load_image(const std::filesystem::path& path) {
    std::string ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    if (ext == ".pgm") return load_pgm(path);
    if (ext == ".png") return load_png(path);
    throw IoError("unsupported image format: " + path.string());
}

void save_pgm(const Image& image, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << "P5\n" << image.width() << " " << image.height() << "\n255\n";
    std::vector<char> raw(image.size());
    std::transform(image.pixels().begin(), image.pixels().end(), raw.begin(),
                   [](double v) { return static_cast<char>(to_byte(v)); });
    out.write(raw.data(), static_cast<std::streamsize>(raw.size()));
    if (!out) throw IoError("write failed: " + path.string());
}

void save_png(const Image& image, const std::filesystem::path& path) {
    std::vector<std::uint8_t> raw(image.size());
    std::transform(image.pixels().begin(), image.pixels().end(), raw.begin(), to_byte);
    write_png_raw(path, image.width(), image.height(), PNG_FORMAT_GRAY, raw.data());
}

RgbImage RgbImage::from_gray(const Image& gray) {
    RgbImage out{gray.width(), gray.height(), {}};
    out.rgb.resize(gray.size() * 3);
    for (std::size_t i = 0; i < gray.size(); ++i) {
        const std::uint8_t v = to_byte(gray.pixels()[i]);
        out.rgb[3 * i] = out.rgb[3 * i + 1] = out.rgb[3 * i + 2] = v;
    }
    return out;
}

void RgbImage::draw_rect(int x, int y, int w, int h, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
    auto put = [&](int px, int py) {
        if (px < 0 || py < 0 || px >= width || py >= height) return;
        std::uint8_t* p = rgb.data() + (static_cast<std::size_t>(py) * width + px) * 3;
        p[0] = r;
        p[1] = g;
        p[2] = b;
    };
    for (int i = 0; i < w; ++i) {
        put(x + i, y);
        put(x + i, y + h - 1);
    }
    for (int j = 0; j < h; ++j) {
        put(x, y + j);
        put(x + w - 1, y + j);
    }
}

void save_png(const RgbImage& image, const std::filesystem::path& path) {
    write_png_raw(path, image.width, image.height, PNG_FORMAT_RGB, image.rgb.data());
}

}  // namespace dnbs
