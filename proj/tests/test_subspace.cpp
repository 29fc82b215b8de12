#include "doctest.h"

#include "dnbs/errors.hpp"
#include "dnbs/subspace.hpp"
#include "support/oracles.hpp"

#include <filesystem>
#include <fstream>
#include <random>

using namespace dnbs;
using namespace dnbs::testing;

TEST_CASE("append_basis orthogonalizes against the existing span") {
    Subspace s(2, 2);
    s.append(HaarBox{1, 1, 2, 2});
    const Subspace t = append_basis(s, HaarBox{1, 1, 1, 1});
    REQUIRE(t.size() == 2);
    const Image& phi = t.ortho(1);
    CHECK(phi.at(0, 0) == doctest::Approx(0.75));
    CHECK(phi.at(1, 0) == doctest::Approx(-0.25));
    CHECK(phi.at(0, 1) == doctest::Approx(-0.25));
    CHECK(phi.at(1, 1) == doctest::Approx(-0.25));
    CHECK(t.ortho_norm2(1) == doctest::Approx(0.75));
    CHECK(s.size() == 1);
}

TEST_CASE("dependent basis is rejected and leaves the subspace unchanged") {
    Subspace s(4, 1);
    s.append(HaarBox{1, 1, 2, 1});
    s.append(HaarBox{3, 1, 2, 1});
    CHECK_THROWS_AS(s.append(HaarBox{1, 1, 4, 1}), LinearDependence);
    CHECK(s.size() == 2);
    CHECK_THROWS_AS(s.append(HaarBox{1, 1, 2, 1}), LinearDependence);
    CHECK_THROWS_AS(s.append(HaarBox{4, 1, 2, 1}), InvalidArgument);
}

TEST_CASE("reconstruction and coefficients on a single full box") {
    Subspace s(2, 2);
    s.append(HaarBox{1, 1, 2, 2});
    const Image x(2, 2, std::vector<double>{5, 1, 1, 1});
    const Image r = s.reconstruct(x);
    for (double p : r.pixels()) CHECK(p == doctest::Approx(2.0));
    const auto c = s.coefficients(x);
    REQUIRE(c.size() == 1);
    CHECK(c[0] == doctest::Approx(4.0));
    const Image e = s.residual(x);
    CHECK(e.at(0, 0) == doctest::Approx(3.0));
    CHECK(e.at(1, 1) == doctest::Approx(-1.0));
}

TEST_CASE("empty subspace reconstructs to zero") {
    const Subspace s(3, 3);
    const Image x(3, 3, 7.0);
    const Image r = s.reconstruct(x);
    for (double p : r.pixels()) CHECK(p == 0.0);
    CHECK(s.residual(x) == x);
    CHECK(s.coefficients(x).empty());
}

TEST_CASE("reconstruction matches the pseudo-inverse oracle and is a projection") {
    std::mt19937_64 rng(17);
    const int w = 7, h = 6;
    const Dictionary dict(w, h);
    std::uniform_int_distribution<std::size_t> pick(0, dict.size() - 1);
    for (int trial = 0; trial < 20; ++trial) {
        Subspace s(w, h);
        while (s.size() < 12) {
            try {
                s.append(dict[pick(rng)]);
            } catch (const LinearDependence&) {
            }
        }
        const Image x = random_template(rng, w, h);
        const Image r = s.reconstruct(x);
        const Eigen::VectorXd oracle = pinv_reconstruct(s.bases(), to_vector(x), w, h);
        CHECK((to_vector(r) - oracle).norm() <= 1e-9 * oracle.norm());

        // Idempotent, residual orthogonal to every basis.
        const Image rr = s.reconstruct(r);
        CHECK((to_vector(rr) - to_vector(r)).norm() <= 1e-9 * to_vector(r).norm());
        const Image e = s.residual(x);
        const IntegralImage eii(e);
        for (const HaarBox& b : s.bases()) CHECK(std::abs(haar_dot_image(b, eii)) <= 1e-9 * to_vector(x).norm());

        // Coefficients synthesize the reconstruction.
        const Image syn = synthesize(s.bases(), s.coefficients(x), w, h);
        CHECK((to_vector(syn) - oracle).norm() <= 1e-7 * oracle.norm());
    }
}

TEST_CASE("reconstruction rejects a foreign frame") {
    Subspace s(3, 3);
    s.append(HaarBox{1, 1, 1, 1});
    CHECK_THROWS_AS(s.reconstruct(Image(3, 4)), InvalidArgument);
    CHECK_THROWS_AS(s.coefficients(Image(2, 3)), InvalidArgument);
}

TEST_CASE("subspace file round trip") {
    const auto path = std::filesystem::temp_directory_path() / "dnbs_subspace_rt.json";
    SubspaceRecord rec{5, 4, {HaarBox{1, 1, 5, 4}, HaarBox{2, 2, 1, 3}}, {10.5, -2.25}};
    save_subspace(rec, path);
    const SubspaceRecord back = load_subspace(path);
    CHECK(back.width == 5);
    CHECK(back.height == 4);
    CHECK(back.bases == rec.bases);
    CHECK(back.coefficients == rec.coefficients);
    CHECK(back.to_subspace().size() == 2);
    CHECK_THROWS_AS(load_subspace(path.string() + ".missing"), IoError);
    {
        std::ofstream bad(path);
        bad << "{\"width\": 5";
    }
    CHECK_THROWS_AS(load_subspace(path), ParseError);
}
