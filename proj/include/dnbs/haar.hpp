#pragma once

// Haar-like box features, the box dictionary, and integral images.
//
// Boxes use 1-based (u0 = column, v0 = row) coordinates. A box feature is
// treated as a unit-norm vector: 1/sqrt(w*h) inside the box, 0 outside. Only
// geometry is stored; every inner product divides by sqrt(w*h).

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace dnbs {

/// Row-major grayscale image of doubles. Used both for templates and frames.
class Image {
public:
    Image() = default;
    Image(int width, int height, double fill = 0.0);
    Image(int width, int height, std::vector<double> pixels);

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    std::size_t size() const noexcept { return pixels_.size(); }
    bool empty() const noexcept { return pixels_.empty(); }

    // 0-based column/row.
    double& at(int col, int row) { return pixels_[static_cast<std::size_t>(row) * width_ + col]; }
    double at(int col, int row) const { return pixels_[static_cast<std::size_t>(row) * width_ + col]; }

    std::span<double> pixels() noexcept { return pixels_; }
    std::span<const double> pixels() const noexcept { return pixels_; }
    double* data() noexcept { return pixels_.data(); }
    const double* data() const noexcept { return pixels_.data(); }

    /// Sub-image with 0-based top-left (x, y). Throws InvalidArgument when the
    /// window leaves the image.
    Image crop(int x, int y, int w, int h) const;

    bool same_shape(const Image& other) const noexcept {
        return width_ == other.width_ && height_ == other.height_;
    }

    friend bool operator==(const Image&, const Image&) = default;

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<double> pixels_;
};

double dot(const Image& a, const Image& b);
double squared_norm(const Image& a);
/// Throws InvalidArgument when the shapes differ.
void require_same_shape(const Image& a, const Image& b, const char* what);

struct HaarBox {
    int u0 = 1;  // column, 1-based
    int v0 = 1;  // row, 1-based
    int w = 1;
    int h = 1;

    int area() const noexcept { return w * h; }
    int u1() const noexcept { return u0 + w - 1; }
    int v1() const noexcept { return v0 + h - 1; }
    bool fits(int width, int height) const noexcept {
        return u0 >= 1 && v0 >= 1 && w >= 1 && h >= 1 && u1() <= width && v1() <= height;
    }

    friend bool operator==(const HaarBox&, const HaarBox&) = default;
    friend auto operator<=>(const HaarBox&, const HaarBox&) = default;
};

/// Summed-area table with a zero guard row and column:
/// S(u, v) = sum of x(u', v') for 1 <= u' <= u, 1 <= v' <= v.
class IntegralImage {
public:
    IntegralImage() = default;
    explicit IntegralImage(const Image& image);

    /// Integral image of the squared pixel values.
    static IntegralImage of_squares(const Image& image);

    int width() const noexcept { return width_; }    // source width W
    int height() const noexcept { return height_; }  // source height H
    std::ptrdiff_t stride() const noexcept { return width_ + 1; }

    double at(int u, int v) const noexcept { return table_[static_cast<std::size_t>(v) * (width_ + 1) + u]; }
    const double* data() const noexcept { return table_.data(); }

private:
    IntegralImage(const Image& image, bool squares);

    int width_ = 0;
    int height_ = 0;
    std::vector<double> table_;
};

/// Raw sum over the box; exactly four table lookups.
double box_sum(const IntegralImage& ii, const HaarBox& b);

/// <psi_b, x> for the unit-normalized box feature, given the integral image of x.
double haar_dot_image(const HaarBox& b, const IntegralImage& ii);

/// <psi_a, psi_b> = CommonArea / sqrt(Area(a) * Area(b)).
double haar_dot_haar(const HaarBox& a, const HaarBox& b);

int common_area(const HaarBox& a, const HaarBox& b) noexcept;

/// Dense W x H image of the unit-normalized feature.
Image box_image(const HaarBox& b, int width, int height);

/// Corner offsets of every atom into a (W+1)-stride integral table, laid out
/// structure-of-arrays for the scoring kernels.
struct AtomTable {
    std::vector<std::int32_t> br, bl, tr, tl;
    std::vector<double> inv_norm;
};

/// Every legal box in a W x H frame, in lexicographic (u0, v0, w, h) order.
class Dictionary {
public:
    Dictionary(int width, int height);

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    std::size_t size() const noexcept { return atoms_.size(); }
    const HaarBox& operator[](std::size_t i) const noexcept { return atoms_[i]; }
    std::span<const HaarBox> atoms() const noexcept { return atoms_; }
    const AtomTable& table() const noexcept { return table_; }

    /// Position of a box in the atom order; O(1).
    std::size_t index_of(const HaarBox& b) const;

    /// W(W+1)H(H+1)/4.
    static std::uint64_t expected_count(int width, int height) noexcept;

private:
    int width_;
    int height_;
    std::vector<HaarBox> atoms_;
    AtomTable table_;
    std::vector<std::size_t> corner_offset_;  // first index for each (u0, v0)
};

Dictionary build_dictionary(int width, int height);

}  // namespace dnbs
