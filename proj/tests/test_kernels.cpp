#include "doctest.h"

#include "dnbs/haar.hpp"
#include "dnbs/kernels.hpp"

#include <cstring>
#include <random>

using namespace dnbs;
using namespace dnbs::kernels;

namespace {

Image noise(std::mt19937_64& rng, int w, int h, double lo = -50.0, double hi = 255.0) {
    std::uniform_real_distribution<double> px(lo, hi);
    Image x(w, h);
    for (double& p : x.pixels()) p = px(rng);
    return x;
}

AtomView view_of(const Dictionary& d) {
    const AtomTable& t = d.table();
    return AtomView{t.br.data(), t.bl.data(), t.tr.data(), t.tl.data(), t.inv_norm.data(), d.size()};
}

bool same_bits(const std::vector<double>& a, const std::vector<double>& b) {
    return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

}  // namespace

TEST_CASE("scalar kernels match integral-image lookups") {
    std::mt19937_64 rng(1);
    const Dictionary dict(9, 7);
    const Image x = noise(rng, 9, 7);
    const IntegralImage ii(x);
    const KernelTable& k = kernels_for(Isa::scalar);
    std::vector<double> out(dict.size());
    k.box_dots(view_of(dict), ii.data(), 0, dict.size(), out.data());
    for (std::size_t i = 0; i < dict.size(); ++i) CHECK(out[i] == doctest::Approx(haar_dot_image(dict[i], ii)));
}

TEST_CASE("argmax picks the lowest index and skips excluded values") {
    for (Isa isa : {Isa::scalar, Isa::avx2}) {
        if (!isa_supported(isa)) continue;
        const KernelTable& k = kernels_for(isa);
        std::vector<double> v{1, 3, 3, -2, 3, kExcluded, 0, 3, 1};
        CHECK(k.argmax(v.data(), v.size()) == 1);
        std::vector<double> none(11, kExcluded);
        none[4] = std::nan("");
        CHECK(k.argmax(none.data(), none.size()) == none.size());
        none[9] = -1e300;
        CHECK(k.argmax(none.data(), none.size()) == 9);
        CHECK(k.argmax(v.data(), 0) == 0);
    }
}

TEST_CASE("avx2 kernels are bit-identical to the scalar reference") {
    if (!isa_supported(Isa::avx2)) {
        MESSAGE("AVX2 unavailable; equivalence not exercised");
        return;
    }
    const KernelTable& s = kernels_for(Isa::scalar);
    const KernelTable& a = kernels_for(Isa::avx2);
    std::mt19937_64 rng(42);
    for (int trial = 0; trial < 6; ++trial) {
        const int w = 3 + trial * 3, h = 2 + trial * 4;
        const Dictionary dict(w, h);
        const AtomView atoms = view_of(dict);
        const std::size_t n = dict.size();
        const IntegralImage x(noise(rng, w, h));
        const IntegralImage phi(noise(rng, w, h, -1.0, 1.0));
        const IntegralImage shared(noise(rng, w, h, -30.0, 30.0));
        // Odd ranges exercise the vector tails.
        const std::size_t begin = trial % 3, end = n - (trial % 5);

        std::vector<double> o1(n, 0.5), o2(n, 0.5);
        s.box_dots(atoms, x.data(), begin, end, o1.data());
        a.box_dots(atoms, x.data(), begin, end, o2.data());
        CHECK(same_bits(o1, o2));

        s.accumulate_squares(atoms, x.data(), begin, end, o1.data());
        a.accumulate_squares(atoms, x.data(), begin, end, o2.data());
        CHECK(same_bits(o1, o2));

        std::vector<double> z1(n, 0.0), z2(n, 0.0), z3(n, 0.0);
        s.store_squares(atoms, x.data(), begin, end, z1.data());
        a.store_squares(atoms, x.data(), begin, end, z2.data());
        s.accumulate_squares(atoms, x.data(), begin, end, z3.data());
        CHECK(same_bits(z1, z2));
        CHECK(same_bits(z1, z3));

        std::vector<double> d1(n), d2;
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        for (double& v : d1) v = unit(rng);
        d2 = d1;
        s.update_norms(atoms, phi.data(), 0.7, begin, end, d1.data());
        a.update_norms(atoms, phi.data(), 0.7, begin, end, d2.data());
        CHECK(same_bits(d1, d2));

        std::vector<double> fg(n), bg(n), sc1(n, 9.0), sc2(n, 9.0);
        for (std::size_t i = 0; i < n; ++i) {
            fg[i] = 100.0 * unit(rng);
            bg[i] = 100.0 * unit(rng);
        }
        s.finish_direct(fg.data(), bg.data(), d1.data(), 0.5, 0.1, 0.2, begin, end, sc1.data());
        a.finish_direct(fg.data(), bg.data(), d1.data(), 0.5, 0.1, 0.2, begin, end, sc2.data());
        CHECK(same_bits(sc1, sc2));

        std::vector<double> n1(n), s1(n);
        for (std::size_t i = 0; i < n; ++i) {
            n1[i] = 0.5 + unit(rng);
            s1[i] = 10.0 * (unit(rng) - 0.3);
        }
        std::vector<double> n2 = n1, s2 = s1, n3 = n1, s3 = s1;
        s.iterative_update(atoms, phi.data(), shared.data(), 1.3, -2.5, 0.6, begin, end, n1.data(), s1.data());
        a.iterative_update(atoms, phi.data(), shared.data(), 1.3, -2.5, 0.6, begin, end, n2.data(), s2.data());
        CHECK(same_bits(n1, n2));
        CHECK(same_bits(s1, s2));
        for (std::size_t i = begin; i < end; ++i) {
            iterative_update_one(phi.data()[atoms.br[i]], phi.data()[atoms.bl[i]], phi.data()[atoms.tr[i]],
                                 phi.data()[atoms.tl[i]], shared.data()[atoms.br[i]], shared.data()[atoms.bl[i]],
                                 shared.data()[atoms.tr[i]], shared.data()[atoms.tl[i]], atoms.inv_norm[i], 1.3,
                                 -2.5, 0.6, n3[i], s3[i]);
        }
        CHECK(same_bits(n1, n3));
        CHECK(same_bits(s1, s3));

        CHECK(s.argmax(s1.data(), n) == a.argmax(s1.data(), n));

        std::vector<double> y1(n), y2;
        for (double& v : y1) v = unit(rng);
        y2 = y1;
        s.axpy(-0.37, d1.data(), y1.data(), n);
        a.axpy(-0.37, d1.data(), y2.data(), n);
        CHECK(same_bits(y1, y2));
        CHECK(s.dot(y1.data(), d1.data(), n) == doctest::Approx(a.dot(y1.data(), d1.data(), n)).epsilon(1e-12));
    }
}

TEST_CASE("ssd_row matches across ISAs") {
    if (!isa_supported(Isa::avx2)) return;
    std::mt19937_64 rng(5);
    const Image frame = noise(rng, 40, 30, 0.0, 255.0);
    Image sq(40, 30);
    for (std::size_t i = 0; i < frame.size(); ++i) sq.pixels()[i] = frame.pixels()[i] * frame.pixels()[i];
    const IntegralImage ii(frame), iisq(sq);
    const std::ptrdiff_t stride = ii.stride();
    // Two boxes inside an 8x6 template.
    std::vector<SsdTerm> terms{{6 * stride + 8, 6 * stride, 8, 0, 3.5}, {4 * stride + 5, 4 * stride + 2, stride + 5, stride + 2, -1.25}};
    for (std::size_t count : {1u, 3u, 4u, 7u, 29u}) {
        std::vector<double> o1(count), o2(count);
        SsdRowArgs args{ii.data() + 3 * stride + 2, iisq.data() + 3 * stride + 2, terms.data(), terms.size(),
                        6 * stride + 8, 6 * stride, 8, 0, 77.0, count, o1.data()};
        kernels_for(Isa::scalar).ssd_row(args);
        args.out = o2.data();
        kernels_for(Isa::avx2).ssd_row(args);
        CHECK(same_bits(o1, o2));
    }
}

TEST_CASE("isa selection") {
    CHECK(isa_supported(Isa::scalar));
    const Isa before = active().isa;
    set_active_isa(Isa::scalar);
    CHECK(active().isa == Isa::scalar);
    CHECK(isa_name(Isa::avx2) == "avx2");
    set_active_isa(before);
}
