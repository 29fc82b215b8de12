#include "dnbs/subspace.hpp"

#include "dnbs/errors.hpp"
#include "dnbs/kernels.hpp"

#include <Eigen/Dense>
#include "json.hpp"

#include <cmath>
#include <fstream>
#include <string>

namespace dnbs {

void SampleSet::validate() const {
    if (foregrounds.empty()) throw InvalidArgument("sample set needs at least one foreground");
    const Image& ref = foregrounds.front();
    for (const Image& f : foregrounds) require_same_shape(ref, f, "foreground samples");
    for (const Image& b : backgrounds) require_same_shape(ref, b, "background samples");
}

Subspace::Subspace(int width, int height) : width_(width), height_(height) {
    if (width < 1 || height < 1) throw InvalidArgument("subspace frame must be positive");
}

void Subspace::require_frame(const Image& x, const char* what) const {
    if (x.width() != width_ || x.height() != height_) {
        throw InvalidArgument(std::string(what) + ": image is " + std::to_string(x.width()) + "x" +
                              std::to_string(x.height()) + ", subspace frame is " + std::to_string(width_) +
                              "x" + std::to_string(height_));
    }
}

void Subspace::append(const HaarBox& b) {
    if (!b.fits(width_, height_)) throw InvalidArgument("basis outside the subspace frame");
    const auto& k = kernels::active();
    Image phi = box_image(b, width_, height_);
    // Classical Gram-Schmidt: projections of the raw box onto each phi_bar_j
    // are O(1) lookups on the cached integral images.
    for (std::size_t j = 0; j < bases_.size(); ++j) {
        const double proj = haar_dot_image(b, ortho_ii_[j]) / ortho_norm2_[j];
        k.axpy(-proj, ortho_[j].data(), phi.data(), phi.size());
    }
    const double u = squared_norm(phi);
    if (!(u >= dependence_tolerance())) {
        throw LinearDependence("basis (" + std::to_string(b.u0) + "," + std::to_string(b.v0) + "," +
                               std::to_string(b.w) + "," + std::to_string(b.h) +
                               ") is dependent on the subspace (u = " + std::to_string(u) + ")");
    }
    ortho_ii_.emplace_back(phi);
    ortho_.push_back(std::move(phi));
    ortho_norm2_.push_back(u);
    bases_.push_back(b);
}

Image Subspace::residual(const Image& x) const {
    require_frame(x, "residual");
    const auto& k = kernels::active();
    Image r = x;
    for (std::size_t j = 0; j < bases_.size(); ++j) {
        const double a = k.dot(ortho_[j].data(), r.data(), r.size()) / ortho_norm2_[j];
        k.axpy(-a, ortho_[j].data(), r.data(), r.size());
    }
    return r;
}

Image Subspace::reconstruct(const Image& x) const {
    Image r = residual(x);
    Image out = x;
    kernels::active().axpy(-1.0, r.data(), out.data(), out.size());
    return out;
}

std::vector<double> Subspace::coefficients(const Image& x) const {
    require_frame(x, "coefficients");
    const std::size_t n = bases_.size();
    if (n == 0) return {};
    Eigen::MatrixXd gram(n, n);
    Eigen::VectorXd rhs(n);
    const IntegralImage ii(x);
    for (std::size_t i = 0; i < n; ++i) {
        rhs(i) = haar_dot_image(bases_[i], ii);
        for (std::size_t j = 0; j <= i; ++j) gram(i, j) = gram(j, i) = haar_dot_haar(bases_[i], bases_[j]);
    }
    const Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive() || ldlt.rcond() < 1e-14) {
        throw NumericDegeneracy("Gram system of the subspace bases is singular");
    }
    Eigen::VectorXd c = ldlt.solve(rhs);
    // One refinement step; the Gram matrix of overlapping boxes is often poorly conditioned.
    c += ldlt.solve(rhs - gram * c);
    return {c.data(), c.data() + n};
}

Subspace append_basis(Subspace s, const HaarBox& b) {
    s.append(b);
    return s;
}

Image synthesize(const std::vector<HaarBox>& bases, const std::vector<double>& coeffs, int width,
                 int height) {
    if (bases.size() != coeffs.size()) throw InvalidArgument("basis/coefficient count mismatch");
    Image out(width, height);
    for (std::size_t i = 0; i < bases.size(); ++i) {
        const HaarBox& b = bases[i];
        if (!b.fits(width, height)) throw InvalidArgument("basis outside frame");
        const double v = coeffs[i] / std::sqrt(static_cast<double>(b.area()));
        for (int r = b.v0; r <= b.v1(); ++r) {
            for (int c = b.u0; c <= b.u1(); ++c) out.at(c - 1, r - 1) += v;
        }
    }
    return out;
}

Subspace SubspaceRecord::to_subspace() const {
    Subspace s(width, height);
    for (const HaarBox& b : bases) s.append(b);
    return s;
}

void save_subspace(const SubspaceRecord& record, const std::filesystem::path& path) {
    nlohmann::json j;
    j["width"] = record.width;
    j["height"] = record.height;
    j["K"] = record.bases.size();
    auto& bases = j["bases"] = nlohmann::json::array();
    for (const HaarBox& b : record.bases) bases.push_back({b.u0, b.v0, b.w, b.h});
    j["coefficients"] = record.coefficients;
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out << j.dump(2) << "\n";
}

SubspaceRecord load_subspace(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    SubspaceRecord rec;
    try {
        const nlohmann::json j = nlohmann::json::parse(in);
        rec.width = j.at("width").get<int>();
        rec.height = j.at("height").get<int>();
        for (const auto& b : j.at("bases")) {
            rec.bases.push_back(HaarBox{b.at(0).get<int>(), b.at(1).get<int>(), b.at(2).get<int>(), b.at(3).get<int>()});
        }
        rec.coefficients = j.value("coefficients", std::vector<double>{});
        if (j.at("K").get<std::size_t>() != rec.bases.size()) throw ParseError("K does not match basis count");
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
    if (!rec.coefficients.empty() && rec.coefficients.size() != rec.bases.size()) {
        throw ParseError(path.string() + ": coefficient count does not match basis count");
    }
    return rec;
}

}  // namespace dnbs
