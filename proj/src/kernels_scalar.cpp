#include "kernels_impl.hpp"

#include <cstddef>

namespace dnbs::kernels::detail {
namespace {

inline double box_at(const AtomView& a, const double* t, std::size_t i) noexcept {
    return (t[a.br[i]] - t[a.bl[i]] - t[a.tr[i]] + t[a.tl[i]]) * a.inv_norm[i];
}

void box_dots(const AtomView& a, const double* t, std::size_t begin, std::size_t end, double* out) {
    for (std::size_t i = begin; i < end; ++i) out[i] = box_at(a, t, i);
}

void accumulate_squares(const AtomView& a, const double* t, std::size_t begin, std::size_t end,
                        double* acc) {
    for (std::size_t i = begin; i < end; ++i) {
        const double v = box_at(a, t, i);
        acc[i] += v * v;
    }
}

void store_squares(const AtomView& a, const double* t, std::size_t begin, std::size_t end, double* acc) {
    for (std::size_t i = begin; i < end; ++i) {
        const double v = box_at(a, t, i);
        acc[i] = v * v;
    }
}

void update_norms(const AtomView& a, const double* phi, double u, std::size_t begin, std::size_t end,
                  double* d) {
    for (std::size_t i = begin; i < end; ++i) {
        const double beta = box_at(a, phi, i);
        d[i] = d[i] - (beta * beta) / u;
    }
}

void finish_direct(const double* fg, const double* bg, const double* d, double fg_weight,
                   double bg_weight, double tol, std::size_t begin, std::size_t end, double* score) {
    for (std::size_t i = begin; i < end; ++i) {
        const double num = fg_weight * fg[i] - bg_weight * bg[i];
        score[i] = d[i] > tol ? num / d[i] : kExcluded;
    }
}

void iterative_update(const AtomView& a, const double* phi, const double* it, double u, double s,
                      double tol, std::size_t begin, std::size_t end, double* d, double* score) {
    for (std::size_t i = begin; i < end; ++i) {
        iterative_update_one(phi[a.br[i]], phi[a.bl[i]], phi[a.tr[i]], phi[a.tl[i]], it[a.br[i]],
                             it[a.bl[i]], it[a.tr[i]], it[a.tl[i]], a.inv_norm[i], u, s, tol, d[i],
                             score[i]);
    }
}

void ssd_row(const SsdRowArgs& args) {
    const std::size_t n = args.count;
    double* out = args.out;
    for (std::size_t x = 0; x < n; ++x) out[x] = 0.0;
    for (std::size_t k = 0; k < args.term_count; ++k) {
        const SsdTerm& term = args.terms[k];
        const double* t = args.table;
        for (std::size_t x = 0; x < n; ++x) {
            out[x] += term.weight * (t[term.br + x] - t[term.bl + x] - t[term.tr + x] + t[term.tl + x]);
        }
    }
    const double* q = args.sq_table;
    for (std::size_t x = 0; x < n; ++x) {
        const double ysq = q[args.sq_br + x] - q[args.sq_bl + x] - q[args.sq_tr + x] + q[args.sq_tl + x];
        out[x] = (args.xhat_sq_norm + ysq) - 2.0 * out[x];
    }
}

std::size_t argmax(const double* v, std::size_t n) {
    std::size_t best = n;
    double best_value = kExcluded;
    for (std::size_t i = 0; i < n; ++i) {
        if (v[i] > best_value) {
            best_value = v[i];
            best = i;
        }
    }
    return best;
}

double dot(const double* a, const double* b, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
    return s;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

}  // namespace

const KernelTable& scalar_table() {
    static const KernelTable table{Isa::scalar,        "scalar",      &box_dots,
                                   &accumulate_squares, &store_squares, &update_norms, &finish_direct,
                                   &iterative_update,  &ssd_row,      &argmax,
                                   &dot,               &axpy};
    return table;
}

}  // namespace dnbs::kernels::detail
