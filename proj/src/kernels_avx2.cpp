// Compiled with -mavx2 (no -mfma): every product and sum rounds exactly as in
// the scalar reference, so per-candidate results match bit for bit.

#include "kernels_impl.hpp"

#include <immintrin.h>

#include <cstddef>

namespace dnbs::kernels::detail {
namespace {

inline __m256d gather(const double* t, const std::int32_t* idx) noexcept {
    return _mm256_i32gather_pd(t, _mm_loadu_si128(reinterpret_cast<const __m128i*>(idx)), 8);
}

inline __m256d box4(const AtomView& a, const double* t, std::size_t i) noexcept {
    const __m256d br = gather(t, a.br + i);
    const __m256d bl = gather(t, a.bl + i);
    const __m256d tr = gather(t, a.tr + i);
    const __m256d tl = gather(t, a.tl + i);
    const __m256d sum = _mm256_add_pd(_mm256_sub_pd(_mm256_sub_pd(br, bl), tr), tl);
    return _mm256_mul_pd(sum, _mm256_loadu_pd(a.inv_norm + i));
}

inline double box_at(const AtomView& a, const double* t, std::size_t i) noexcept {
    return (t[a.br[i]] - t[a.bl[i]] - t[a.tr[i]] + t[a.tl[i]]) * a.inv_norm[i];
}

void box_dots(const AtomView& a, const double* t, std::size_t begin, std::size_t end, double* out) {
    std::size_t i = begin;
    for (; i + 4 <= end; i += 4) _mm256_storeu_pd(out + i, box4(a, t, i));
    for (; i < end; ++i) out[i] = box_at(a, t, i);
}

void accumulate_squares(const AtomView& a, const double* t, std::size_t begin, std::size_t end,
                        double* acc) {
    std::size_t i = begin;
    for (; i + 4 <= end; i += 4) {
        const __m256d v = box4(a, t, i);
        _mm256_storeu_pd(acc + i, _mm256_add_pd(_mm256_loadu_pd(acc + i), _mm256_mul_pd(v, v)));
    }
    for (; i < end; ++i) {
        const double v = box_at(a, t, i);
        acc[i] += v * v;
    }
}

void store_squares(const AtomView& a, const double* t, std::size_t begin, std::size_t end, double* acc) {
    std::size_t i = begin;
    for (; i + 4 <= end; i += 4) {
        const __m256d v = box4(a, t, i);
        _mm256_storeu_pd(acc + i, _mm256_mul_pd(v, v));
    }
    for (; i < end; ++i) {
        const double v = box_at(a, t, i);
        acc[i] = v * v;
    }
}

void update_norms(const AtomView& a, const double* phi, double u, std::size_t begin, std::size_t end,
                  double* d) {
    const __m256d uu = _mm256_set1_pd(u);
    std::size_t i = begin;
    for (; i + 4 <= end; i += 4) {
        const __m256d beta = box4(a, phi, i);
        const __m256d dn = _mm256_sub_pd(_mm256_loadu_pd(d + i), _mm256_div_pd(_mm256_mul_pd(beta, beta), uu));
        _mm256_storeu_pd(d + i, dn);
    }
    for (; i < end; ++i) {
        const double beta = box_at(a, phi, i);
        d[i] = d[i] - (beta * beta) / u;
    }
}

void finish_direct(const double* fg, const double* bg, const double* d, double fg_weight,
                   double bg_weight, double tol, std::size_t begin, std::size_t end, double* score) {
    const __m256d fw = _mm256_set1_pd(fg_weight);
    const __m256d bw = _mm256_set1_pd(bg_weight);
    const __m256d tv = _mm256_set1_pd(tol);
    const __m256d excluded = _mm256_set1_pd(kExcluded);
    std::size_t i = begin;
    for (; i + 4 <= end; i += 4) {
        const __m256d dv = _mm256_loadu_pd(d + i);
        const __m256d num = _mm256_sub_pd(_mm256_mul_pd(fw, _mm256_loadu_pd(fg + i)),
                                          _mm256_mul_pd(bw, _mm256_loadu_pd(bg + i)));
        const __m256d keep = _mm256_cmp_pd(dv, tv, _CMP_GT_OQ);
        _mm256_storeu_pd(score + i, _mm256_blendv_pd(excluded, _mm256_div_pd(num, dv), keep));
    }
    for (; i < end; ++i) {
        const double num = fg_weight * fg[i] - bg_weight * bg[i];
        score[i] = d[i] > tol ? num / d[i] : kExcluded;
    }
}

void iterative_update(const AtomView& a, const double* phi, const double* it, double u, double s,
                      double tol, std::size_t begin, std::size_t end, double* d, double* score) {
    const __m256d uu = _mm256_set1_pd(u);
    const __m256d ss = _mm256_set1_pd(s);
    const __m256d tv = _mm256_set1_pd(tol);
    const __m256d two = _mm256_set1_pd(2.0);
    const __m256d excluded = _mm256_set1_pd(kExcluded);
    std::size_t i = begin;
    for (; i + 4 <= end; i += 4) {
        const __m256d beta = box4(a, phi, i);
        const __m256d dv = _mm256_loadu_pd(d + i);
        const __m256d lv = _mm256_loadu_pd(score + i);
        const __m256d dn = _mm256_sub_pd(dv, _mm256_div_pd(_mm256_mul_pd(beta, beta), uu));
        const __m256d r = _mm256_div_pd(beta, uu);
        const __m256d p = box4(a, it, i);
        const __m256d num = _mm256_add_pd(
            _mm256_sub_pd(_mm256_mul_pd(dv, lv), _mm256_mul_pd(_mm256_mul_pd(two, r), p)),
            _mm256_mul_pd(_mm256_mul_pd(r, r), ss));
        const __m256d keep = _mm256_cmp_pd(dn, tv, _CMP_GT_OQ);
        _mm256_storeu_pd(score + i, _mm256_blendv_pd(excluded, _mm256_div_pd(num, dn), keep));
        _mm256_storeu_pd(d + i, dn);
    }
    for (; i < end; ++i) {
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
        const double* br = args.table + term.br;
        const double* bl = args.table + term.bl;
        const double* tr = args.table + term.tr;
        const double* tl = args.table + term.tl;
        const __m256d w = _mm256_set1_pd(term.weight);
        std::size_t x = 0;
        for (; x + 4 <= n; x += 4) {
            const __m256d box = _mm256_add_pd(
                _mm256_sub_pd(_mm256_sub_pd(_mm256_loadu_pd(br + x), _mm256_loadu_pd(bl + x)),
                              _mm256_loadu_pd(tr + x)),
                _mm256_loadu_pd(tl + x));
            _mm256_storeu_pd(out + x, _mm256_add_pd(_mm256_loadu_pd(out + x), _mm256_mul_pd(w, box)));
        }
        for (; x < n; ++x) out[x] += term.weight * (br[x] - bl[x] - tr[x] + tl[x]);
    }
    const double* q = args.sq_table;
    const __m256d xhat = _mm256_set1_pd(args.xhat_sq_norm);
    const __m256d two = _mm256_set1_pd(2.0);
    std::size_t x = 0;
    for (; x + 4 <= n; x += 4) {
        const __m256d ysq = _mm256_add_pd(
            _mm256_sub_pd(_mm256_sub_pd(_mm256_loadu_pd(q + args.sq_br + x), _mm256_loadu_pd(q + args.sq_bl + x)),
                          _mm256_loadu_pd(q + args.sq_tr + x)),
            _mm256_loadu_pd(q + args.sq_tl + x));
        _mm256_storeu_pd(out + x, _mm256_sub_pd(_mm256_add_pd(xhat, ysq),
                                                _mm256_mul_pd(two, _mm256_loadu_pd(out + x))));
    }
    for (; x < n; ++x) {
        const double ysq = q[args.sq_br + x] - q[args.sq_bl + x] - q[args.sq_tr + x] + q[args.sq_tl + x];
        out[x] = (args.xhat_sq_norm + ysq) - 2.0 * out[x];
    }
}

std::size_t argmax(const double* v, std::size_t n) {
    __m256d best = _mm256_set1_pd(kExcluded);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d x = _mm256_loadu_pd(v + i);
        best = _mm256_blendv_pd(best, x, _mm256_cmp_pd(x, best, _CMP_GT_OQ));
    }
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, best);
    double top = kExcluded;
    for (double lane : lanes) {
        if (lane > top) top = lane;
    }
    for (; i < n; ++i) {
        if (v[i] > top) top = v[i];
    }
    if (!(top > kExcluded)) return n;
    for (std::size_t j = 0; j < n; ++j) {
        if (v[j] == top) return j;
    }
    return n;
}

double dot(const double* a, const double* b, std::size_t n) {
    __m256d s0 = _mm256_setzero_pd();
    __m256d s1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        s0 = _mm256_add_pd(s0, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
        s1 = _mm256_add_pd(s1, _mm256_mul_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4)));
    }
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, _mm256_add_pd(s0, s1));
    double s = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
    for (; i < n; ++i) s += a[i] * b[i];
    return s;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
    const __m256d av = _mm256_set1_pd(alpha);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        _mm256_storeu_pd(y + i, _mm256_add_pd(_mm256_loadu_pd(y + i), _mm256_mul_pd(av, _mm256_loadu_pd(x + i))));
    }
    for (; i < n; ++i) y[i] += alpha * x[i];
}

}  // namespace

const KernelTable& avx2_table() {
    static const KernelTable table{Isa::avx2,          "avx2",        &box_dots,
                                   &accumulate_squares, &store_squares, &update_norms, &finish_direct,
                                   &iterative_update,  &ssd_row,      &argmax,
                                   &dot,               &axpy};
    return table;
}

}  // namespace dnbs::kernels::detail
