#pragma once

// Non-orthogonal binary subspace: the span of selected box features, kept
// together with its Gram-Schmidt residuals phi_bar_k = phi_k - R_{k-1}(phi_k)
// so reconstruction never forms (Phi^T Phi)^-1 explicitly.

#include "dnbs/haar.hpp"

#include <filesystem>
#include <optional>
#include <vector>

namespace dnbs {

struct SampleSet {
    std::vector<Image> foregrounds;
    std::vector<Image> backgrounds;

    int width() const { return foregrounds.empty() ? 0 : foregrounds.front().width(); }
    int height() const { return foregrounds.empty() ? 0 : foregrounds.front().height(); }

    /// Throws InvalidArgument unless there is at least one foreground and all
    /// samples share one shape.
    void validate() const;
};

class Subspace {
public:
    Subspace(int width, int height);

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    std::size_t size() const noexcept { return bases_.size(); }
    bool empty() const noexcept { return bases_.empty(); }

    const std::vector<HaarBox>& bases() const noexcept { return bases_; }
    const Image& ortho(std::size_t k) const { return ortho_.at(k); }
    const IntegralImage& ortho_integral(std::size_t k) const { return ortho_ii_.at(k); }
    /// u_k = ||phi_bar_k||^2.
    double ortho_norm2(std::size_t k) const { return ortho_norm2_.at(k); }

    /// u_k below this rejects a basis as linearly dependent: 1e-10 * W * H.
    double dependence_tolerance() const noexcept { return 1e-10 * width_ * height_; }

    /// Orthogonalizes b against the current bases and appends it. Throws
    /// LinearDependence when the residual energy is below tolerance; the
    /// subspace is unchanged in that case.
    void append(const HaarBox& b);

    Image reconstruct(const Image& x) const;
    Image residual(const Image& x) const;

    /// c with sum_i c_i phi_i = reconstruct(x), phi_i unit-normalized. Solves
    /// the K x K Gram system built from haar_dot_haar.
    std::vector<double> coefficients(const Image& x) const;

private:
    void require_frame(const Image& x, const char* what) const;

    int width_;
    int height_;
    std::vector<HaarBox> bases_;
    std::vector<Image> ortho_;
    std::vector<IntegralImage> ortho_ii_;
    std::vector<double> ortho_norm2_;
};

/// Value-returning form of Subspace::append.
Subspace append_basis(Subspace s, const HaarBox& b);

/// sum_i c_i phi_i as a dense image.
Image synthesize(const std::vector<HaarBox>& bases, const std::vector<double>& coeffs, int width,
                 int height);

/// Flat record written by `train` and read back to resume tracking.
struct SubspaceRecord {
    int width = 0;
    int height = 0;
    std::vector<HaarBox> bases;
    std::vector<double> coefficients;  // empty when no reference template was given

    Subspace to_subspace() const;
};

void save_subspace(const SubspaceRecord& record, const std::filesystem::path& path);
SubspaceRecord load_subspace(const std::filesystem::path& path);

}  // namespace dnbs
