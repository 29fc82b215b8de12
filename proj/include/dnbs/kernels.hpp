#pragma once

// Data-parallel inner loops. Each kernel has a scalar reference and, on x86-64,
// an AVX2 variant; the active set is chosen at runtime from CPU support and can
// be pinned with DNBS_ISA=scalar|avx2 or set_active_isa().
//
// The per-candidate kernels (box dots, norm/score updates, SSD rows) perform
// the same IEEE operations in the same order in every variant, so their results
// are bit-identical across ISAs. dot() reduces in a different order per ISA and
// is only equal to rounding.

#include <cstddef>
#include <cstdint>
#include <limits>
#include <string_view>

namespace dnbs::kernels {

inline constexpr double kExcluded = -std::numeric_limits<double>::infinity();

enum class Isa { scalar, avx2 };

struct AtomView {
    const std::int32_t* br = nullptr;
    const std::int32_t* bl = nullptr;
    const std::int32_t* tr = nullptr;
    const std::int32_t* tl = nullptr;
    const double* inv_norm = nullptr;
    std::size_t size = 0;
};

/// One basis in an SSD row sweep: corner offsets relative to the candidate's
/// top-left table position, and weight = c_i / sqrt(area_i).
struct SsdTerm {
    std::ptrdiff_t br, bl, tr, tl;
    double weight;
};

struct SsdRowArgs {
    const double* table;      // frame integral image, already offset to the row's first candidate
    const double* sq_table;   // squared-frame integral image, same offset
    const SsdTerm* terms;
    std::size_t term_count;
    std::ptrdiff_t sq_br, sq_bl, sq_tr, sq_tl;  // template-sized box on the squared table
    double xhat_sq_norm;
    std::size_t count;        // candidates along the row
    double* out;
};

struct KernelTable {
    Isa isa;
    std::string_view name;

    /// out[i] = <psi_i, x> for i in [begin, end), table = integral image of x.
    void (*box_dots)(const AtomView& atoms, const double* table, std::size_t begin, std::size_t end,
                     double* out);

    /// acc[i] += <psi_i, x>^2.
    void (*accumulate_squares)(const AtomView& atoms, const double* table, std::size_t begin,
                               std::size_t end, double* acc);

    /// acc[i] = <psi_i, x>^2; same bits as accumulate_squares onto zeros.
    void (*store_squares)(const AtomView& atoms, const double* table, std::size_t begin, std::size_t end,
                          double* acc);

    /// d[i] -= <psi_i, phi>^2 / u, where table is the integral image of phi.
    void (*update_norms)(const AtomView& atoms, const double* phi_table, double u, std::size_t begin,
                         std::size_t end, double* d);

    /// score[i] = (fg_weight * fg[i] - bg_weight * bg[i]) / d[i], or kExcluded when d[i] <= tol.
    void (*finish_direct)(const double* fg, const double* bg, const double* d, double fg_weight,
                          double bg_weight, double tol, std::size_t begin, std::size_t end,
                          double* score);

    /// Recursive rescoring step for [begin, end): updates d and L in place.
    void (*iterative_update)(const AtomView& atoms, const double* phi_table, const double* i_table,
                             double u, double s, double tol, std::size_t begin, std::size_t end,
                             double* d, double* score);

    void (*ssd_row)(const SsdRowArgs& args);

    /// Index of the largest value, lowest index on ties; values equal to
    /// kExcluded or NaN never win. Returns n when nothing qualifies.
    std::size_t (*argmax)(const double* values, std::size_t n);

    double (*dot)(const double* a, const double* b, std::size_t n);

    /// y += alpha * x.
    void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
};

bool isa_supported(Isa isa) noexcept;
const KernelTable& kernels_for(Isa isa);
const KernelTable& active();
void set_active_isa(Isa isa);
Isa best_isa() noexcept;
std::string_view isa_name(Isa isa) noexcept;

/// Scalar reference for one candidate of iterative_update; the hierarchical
/// solver replays missed steps through this for single atoms.
inline void iterative_update_one(double br_phi, double bl_phi, double tr_phi, double tl_phi,
                                 double br_i, double bl_i, double tr_i, double tl_i, double inv_norm,
                                 double u, double s, double tol, double& d, double& score) noexcept {
    const double beta = (br_phi - bl_phi - tr_phi + tl_phi) * inv_norm;
    const double d_new = d - (beta * beta) / u;
    const double r = beta / u;
    const double p = (br_i - bl_i - tr_i + tl_i) * inv_norm;
    const double num = d * score - 2.0 * r * p + r * r * s;
    score = d_new > tol ? num / d_new : kExcluded;
    d = d_new;
}

}  // namespace dnbs::kernels
