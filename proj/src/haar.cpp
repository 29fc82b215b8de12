#include "dnbs/haar.hpp"

#include "dnbs/errors.hpp"
#include "dnbs/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace dnbs {

Image::Image(int width, int height, double fill) {
    if (width < 1 || height < 1) {
        throw InvalidArgument("image dimensions must be positive, got " + std::to_string(width) + "x" +
                              std::to_string(height));
    }
    width_ = width;
    height_ = height;
    pixels_.assign(static_cast<std::size_t>(width) * height, fill);
}

Image::Image(int width, int height, std::vector<double> pixels) {
    if (width < 1 || height < 1) {
        throw InvalidArgument("image dimensions must be positive");
    }
    if (pixels.size() != static_cast<std::size_t>(width) * height) {
        throw InvalidArgument("pixel count does not match " + std::to_string(width) + "x" +
                              std::to_string(height));
    }
    for (double p : pixels) {
        if (!std::isfinite(p)) throw InvalidArgument("image contains a non-finite pixel");
    }
    width_ = width;
    height_ = height;
    pixels_ = std::move(pixels);
}

Image Image::crop(int x, int y, int w, int h) const {
    if (w < 1 || h < 1 || x < 0 || y < 0 || x + w > width_ || y + h > height_) {
        throw InvalidArgument("crop window " + std::to_string(w) + "x" + std::to_string(h) + " at (" +
                              std::to_string(x) + "," + std::to_string(y) + ") leaves the " +
                              std::to_string(width_) + "x" + std::to_string(height_) + " image");
    }
    Image out(w, h);
    for (int r = 0; r < h; ++r) {
        const double* src = data() + static_cast<std::size_t>(y + r) * width_ + x;
        std::copy(src, src + w, out.data() + static_cast<std::size_t>(r) * w);
    }
    return out;
}

void require_same_shape(const Image& a, const Image& b, const char* what) {
    if (!a.same_shape(b)) {
        throw InvalidArgument(std::string(what) + ": shape mismatch " + std::to_string(a.width()) + "x" +
                              std::to_string(a.height()) + " vs " + std::to_string(b.width()) + "x" +
                              std::to_string(b.height()));
    }
}

double dot(const Image& a, const Image& b) {
    require_same_shape(a, b, "dot");
    return kernels::active().dot(a.data(), b.data(), a.size());
}

double squared_norm(const Image& a) { return kernels::active().dot(a.data(), a.data(), a.size()); }

IntegralImage::IntegralImage(const Image& image) : IntegralImage(image, false) {}

IntegralImage IntegralImage::of_squares(const Image& image) { return IntegralImage(image, true); }

IntegralImage::IntegralImage(const Image& image, bool squares) {
    if (image.empty()) throw InvalidArgument("integral image of an empty image");
    width_ = image.width();
    height_ = image.height();
    const std::size_t stride = static_cast<std::size_t>(width_) + 1;
    table_.assign(stride * (static_cast<std::size_t>(height_) + 1), 0.0);
    for (int v = 1; v <= height_; ++v) {
        double row = 0.0;
        const double* src = image.data() + static_cast<std::size_t>(v - 1) * width_;
        double* above = table_.data() + (v - 1) * stride;
        double* cur = table_.data() + v * stride;
        for (int u = 1; u <= width_; ++u) {
            const double p = src[u - 1];
            row += squares ? p * p : p;
            cur[u] = above[u] + row;
        }
    }
}

double box_sum(const IntegralImage& ii, const HaarBox& b) {
    if (!b.fits(ii.width(), ii.height())) {
        throw InvalidArgument("box (" + std::to_string(b.u0) + "," + std::to_string(b.v0) + "," +
                              std::to_string(b.w) + "," + std::to_string(b.h) + ") outside " +
                              std::to_string(ii.width()) + "x" + std::to_string(ii.height()));
    }
    const int u1 = b.u1();
    const int v1 = b.v1();
    return ii.at(u1, v1) - ii.at(b.u0 - 1, v1) - ii.at(u1, b.v0 - 1) + ii.at(b.u0 - 1, b.v0 - 1);
}

double haar_dot_image(const HaarBox& b, const IntegralImage& ii) {
    return box_sum(ii, b) * (1.0 / std::sqrt(static_cast<double>(b.area())));
}

int common_area(const HaarBox& a, const HaarBox& b) noexcept {
    const int w = std::min(a.u1(), b.u1()) - std::max(a.u0, b.u0) + 1;
    const int h = std::min(a.v1(), b.v1()) - std::max(a.v0, b.v0) + 1;
    return (w > 0 && h > 0) ? w * h : 0;
}

double haar_dot_haar(const HaarBox& a, const HaarBox& b) {
    const int common = common_area(a, b);
    if (common == 0) return 0.0;
    // sqrt of the exact integer product, so a == b gives exactly 1.
    return static_cast<double>(common) /
           std::sqrt(static_cast<double>(a.area()) * static_cast<double>(b.area()));
}

Image box_image(const HaarBox& b, int width, int height) {
    if (!b.fits(width, height)) throw InvalidArgument("box outside frame");
    Image out(width, height);
    const double value = 1.0 / std::sqrt(static_cast<double>(b.area()));
    for (int v = b.v0; v <= b.v1(); ++v) {
        for (int u = b.u0; u <= b.u1(); ++u) out.at(u - 1, v - 1) = value;
    }
    return out;
}

std::uint64_t Dictionary::expected_count(int width, int height) noexcept {
    const auto w = static_cast<std::uint64_t>(width);
    const auto h = static_cast<std::uint64_t>(height);
    return w * (w + 1) * h * (h + 1) / 4;
}

Dictionary::Dictionary(int width, int height) : width_(width), height_(height) {
    if (width < 1 || height < 1) {
        throw InvalidArgument("dictionary dimensions must be positive, got " + std::to_string(width) +
                              "x" + std::to_string(height));
    }
    const std::size_t n = expected_count(width, height);
    atoms_.reserve(n);
    corner_offset_.resize(static_cast<std::size_t>(width) * height);
    for (int u0 = 1; u0 <= width; ++u0) {
        for (int v0 = 1; v0 <= height; ++v0) {
            corner_offset_[static_cast<std::size_t>(u0 - 1) * height + (v0 - 1)] = atoms_.size();
            for (int w = 1; u0 + w - 1 <= width; ++w) {
                for (int h = 1; v0 + h - 1 <= height; ++h) atoms_.push_back(HaarBox{u0, v0, w, h});
            }
        }
    }

    const std::int32_t stride = width + 1;
    table_.br.resize(n);
    table_.bl.resize(n);
    table_.tr.resize(n);
    table_.tl.resize(n);
    table_.inv_norm.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const HaarBox& b = atoms_[i];
        table_.br[i] = b.v1() * stride + b.u1();
        table_.bl[i] = b.v1() * stride + (b.u0 - 1);
        table_.tr[i] = (b.v0 - 1) * stride + b.u1();
        table_.tl[i] = (b.v0 - 1) * stride + (b.u0 - 1);
        table_.inv_norm[i] = 1.0 / std::sqrt(static_cast<double>(b.area()));
    }
}

std::size_t Dictionary::index_of(const HaarBox& b) const {
    if (!b.fits(width_, height_)) throw InvalidArgument("box not in dictionary frame");
    const std::size_t base = corner_offset_[static_cast<std::size_t>(b.u0 - 1) * height_ + (b.v0 - 1)];
    const std::size_t heights = static_cast<std::size_t>(height_ - b.v0 + 1);
    return base + static_cast<std::size_t>(b.w - 1) * heights + static_cast<std::size_t>(b.h - 1);
}

Dictionary build_dictionary(int width, int height) { return Dictionary(width, height); }

}  // namespace dnbs
