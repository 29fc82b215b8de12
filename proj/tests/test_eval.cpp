#include "doctest.h"

#include "dnbs/errors.hpp"
#include "dnbs/eval.hpp"
#include "dnbs/image_io.hpp"
#include "dnbs/synthetic.hpp"

#include <filesystem>
#include <fstream>
#include <random>

using namespace dnbs;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("dnbs_test_eval_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

Sequence short_translation(int frames, std::uint64_t seed = 1) {
    SynthOptions opt;
    opt.frames = frames;
    opt.width = 80;
    opt.height = 64;
    opt.object_w = opt.object_h = 12;
    opt.seed = seed;
    return make_translation_sequence(opt);
}

TrackerConfig quick() {
    TrackerConfig cfg;
    cfg.K = 10;
    return cfg;
}

}  // namespace

TEST_CASE("success fraction uses a strict threshold") {
    const BoundingBox a{0, 0, 10, 10};
    CHECK(success_fraction({a, a}, {a, a}) == 1.0);
    CHECK(success_fraction({a}, {BoundingBox{50, 50, 10, 10}}) == 0.0);
    // 7x1 inside 20x1: iou exactly 0.35, which does not count.
    const BoundingBox small{0, 0, 7, 1}, wide{0, 0, 20, 1};
    REQUIRE(iou(small, wide) == 0.35);
    CHECK(success_fraction({small}, {wide}, 0.35) == 0.0);
    CHECK(success_fraction({small}, {wide}, 0.3499) == 1.0);
    // Hand count: overlaps 1, 1/3, 0.35, 0 -> only the first clears 0.35.
    CHECK(success_fraction({a, BoundingBox{5, 0, 10, 10}, small, BoundingBox{40, 0, 10, 10}},
                           {a, a, wide, a}) == 0.25);
    CHECK_THROWS_AS(success_fraction({a}, {a, a}), InvalidArgument);
}

TEST_CASE("threshold grids") {
    const auto o = overlap_thresholds();
    REQUIRE(o.size() == 21u);
    CHECK(o.front() == 0.0);
    CHECK(o.back() == 1.0);
    CHECK(o[7] == doctest::Approx(0.35));
    const auto d = distance_thresholds();
    REQUIRE(d.size() == 51u);
    CHECK(d[50] == 50.0);
}

TEST_CASE("score_run curves") {
    const Sequence seq = short_translation(6);
    std::vector<BoundingBox> tracked = seq.groundtruth;
    tracked[2].x += 3;
    tracked[4].x += 40;
    const RunRecord r = score_run(seq, 0, seq.groundtruth[0], tracked, 0.35);
    CHECK(r.frames.size() == 6u);
    CHECK(r.success == doctest::Approx(5.0 / 6.0));
    CHECK(r.frames[2].center_error == 3.0);
    for (std::size_t i = 1; i < r.success_curve.size(); ++i) CHECK(r.success_curve[i] <= r.success_curve[i - 1]);
    for (std::size_t i = 1; i < r.precision_curve.size(); ++i) CHECK(r.precision_curve[i] >= r.precision_curve[i - 1]);
    CHECK(r.success_curve.back() == 0.0);  // iou > 1 never holds
    CHECK(r.success_curve[19] == doctest::Approx(4.0 / 6.0));
    CHECK(r.precision_curve[0] == doctest::Approx(4.0 / 6.0));
    CHECK(r.precision_curve[3] == doctest::Approx(5.0 / 6.0));
}

TEST_CASE("one-pass evaluation") {
    const Sequence seq = short_translation(25);
    const EvalReport ope = run_ope(seq, quick());
    REQUIRE(ope.runs.size() == 1u);
    CHECK(ope.success == 1.0);
    CHECK(ope.mean_center_error == 0.0);
    CHECK(ope.success_curve.front() == 1.0);

    Sequence one = seq;
    one.frames.resize(1);
    one.groundtruth.resize(1);
    CHECK(run_ope(one, quick()).success == 1.0);
}

TEST_CASE("temporal robustness") {
    const Sequence seq = short_translation(25);
    const EvalReport ope = run_ope(seq, quick());
    const EvalReport tre1 = run_tre(seq, quick(), 1);
    CHECK(same_scores(tre1, ope));

    const EvalReport tre = run_tre(seq, quick(), 4);
    REQUIRE(tre.runs.size() == 4u);
    const int starts[] = {0, 6, 12, 18};  // floor(i * 25 / 4)
    for (int i = 0; i < 4; ++i) {
        CHECK(tre.runs[i].start_frame == starts[i]);
        CHECK(tre.runs[i].frames.size() == static_cast<std::size_t>(25 - starts[i]));
        CHECK(tre.runs[i].success == 1.0);  // same fraction on every segment
    }
    CHECK(tre.warnings.empty());

    Sequence tiny = seq;
    tiny.frames.resize(5);
    tiny.groundtruth.resize(5);
    const EvalReport reduced = run_tre(tiny, quick(), 20);
    CHECK(reduced.runs.size() == 5u);
    CHECK(reduced.warnings.size() == 1u);
}

TEST_CASE("spatial robustness") {
    const Sequence seq = short_translation(15);
    const EvalReport ope = run_ope(seq, quick());
    const EvalReport zero = run_sre(seq, quick(), 0.0);
    REQUIRE(zero.runs.size() == 12u);
    for (const RunRecord& r : zero.runs) CHECK(same_scores(r, ope.runs[0]));
    CHECK(zero.success == ope.success);
    CHECK(zero.success_curve == ope.success_curve);

    const EvalReport sre = run_sre(seq, quick(), 1.0);
    REQUIRE(sre.runs.size() == 12u);
    const BoundingBox g = seq.groundtruth[0];
    // 10% of 12 px rounds to 1 px, 5% to 1 px (0.6 rounds up).
    CHECK(sre.runs[0].init == BoundingBox{g.x, g.y - 1, 12, 12});
    CHECK(sre.runs[2].init == BoundingBox{g.x + 1, g.y, 12, 12});
    CHECK(sre.runs[8].init == BoundingBox{g.x + 1, g.y - 1, 12, 12});
    for (const RunRecord& r : sre.runs) CHECK(r.frames.size() == seq.size());

    // A big magnitude pushes boxes to the frame edge instead of outside it.
    const EvalReport far = run_sre(seq, quick(), 100.0);
    for (const RunRecord& r : far.runs) CHECK(r.init.inside(80, 64));
    CHECK_THROWS_AS(run_sre(seq, quick(), -1.0), InvalidArgument);
}

TEST_CASE("ground-truth parsing") {
    SUBCASE("three lines, mixed separators, 1-based") {
        const auto b = parse_groundtruth("1,1,10,12\n5 6\t7 8\r\n  3, 4 ,5,6  \n\n");
        REQUIRE(b.size() == 3u);
        CHECK(b[0] == BoundingBox{0, 0, 10, 12});
        CHECK(b[1] == BoundingBox{4, 5, 7, 8});
        CHECK(b[2] == BoundingBox{2, 3, 5, 6});
    }
    SUBCASE("errors carry the line number") {
        try {
            parse_groundtruth("1,1,10,10\n2,2,x,10\n");
            FAIL("expected a parse error");
        } catch (const ParseError& e) {
            CHECK(e.line() == 2);
        }
        CHECK_THROWS_AS(parse_groundtruth("1,2,3\n"), ParseError);
        CHECK_THROWS_AS(parse_groundtruth("1,2,3,4,5\n"), ParseError);
        CHECK_THROWS_AS(parse_groundtruth("1,2,0,4\n"), ParseError);
        CHECK_THROWS_AS(parse_groundtruth("1,2,3;4\n"), ParseError);
    }
    SUBCASE("fuzzed separators") {
        std::mt19937_64 rng(5);
        const char* seps[] = {",", " ", "\t", ", ", " ,\t"};
        std::uniform_int_distribution<int> pick(0, 4), val(1, 300);
        for (int trial = 0; trial < 200; ++trial) {
            const int v[4] = {val(rng), val(rng), val(rng), val(rng)};
            std::string line = std::to_string(v[0]);
            for (int i = 1; i < 4; ++i) line += seps[pick(rng)] + std::to_string(v[i]);
            const auto b = parse_groundtruth(line);
            REQUIRE(b.size() == 1u);
            CHECK(b[0] == BoundingBox{v[0] - 1, v[1] - 1, v[2], v[3]});
        }
    }
    SUBCASE("round trip") {
        const fs::path dir = scratch("gt");
        const std::vector<BoundingBox> boxes = {{0, 0, 5, 5}, {10, 3, 7, 9}, {2, 44, 1, 1}};
        save_groundtruth(boxes, dir / "gt.txt");
        CHECK(load_groundtruth(dir / "gt.txt") == boxes);
        CHECK_THROWS_AS(load_groundtruth(dir / "missing.txt"), IoError);
    }
}

TEST_CASE("sequence loading") {
    const Sequence src = short_translation(4);
    const fs::path dir = scratch("seq");
    save_sequence(src, dir);
    const Sequence seq = load_sequence(dir);
    REQUIRE(seq.size() == 4u);
    CHECK(seq.groundtruth == src.groundtruth);
    CHECK(seq.frame_paths[0].filename() == "frame_0001.pgm");
    CHECK(seq.frame(2).width() == 80);

    // Index file with relative paths and an explicit ground-truth file.
    const fs::path index = dir / "list.txt";
    {
        std::ofstream out(index);
        out << "# frames\nframe_0003.pgm\nframe_0004.pgm\n";
    }
    const fs::path gt = dir / "two.txt";
    save_groundtruth({src.groundtruth[2], src.groundtruth[3]}, gt);
    const Sequence two = load_sequence(index, gt);
    REQUIRE(two.size() == 2u);
    CHECK(two.frame_paths[1] == dir / "frame_0004.pgm");

    // Unpadded numbering sorts by value.
    const fs::path loose = scratch("loose");
    for (int i : {1, 2, 10}) save_pgm(Image(8, 8, 10.0 * i), loose / ("f" + std::to_string(i) + ".pgm"));
    save_groundtruth({{0, 0, 4, 4}, {0, 0, 4, 4}, {0, 0, 4, 4}}, loose / "groundtruth_rect.txt");
    const Sequence l = load_sequence(loose);
    REQUIRE(l.size() == 3u);
    CHECK(l.frame_paths[2].filename() == "f10.pgm");

    CHECK_THROWS_AS(load_sequence(dir / "nope"), IoError);
    save_groundtruth({{0, 0, 4, 4}}, loose / "groundtruth_rect.txt");
    CHECK_THROWS_AS(load_sequence(loose), InvalidArgument);
}

TEST_CASE("report files") {
    const Sequence seq = short_translation(8);
    const EvalReport rep = run_tre(seq, quick(), 2);
    const fs::path dir = scratch("report");
    write_report(rep, dir / "run");
    for (const char* suffix : {"_frames.csv", "_success.csv", "_precision.csv", ".json"}) {
        CHECK(fs::exists(dir / ("run" + std::string(suffix))));
    }
    std::ifstream in(dir / "run_frames.csv");
    std::string header, first;
    std::getline(in, header);
    std::getline(in, first);
    CHECK(header == "run,label,frame,x,y,w,h,iou,center_error");
    const BoundingBox g = seq.groundtruth[0];
    CHECK(first == "0,segment 0,1," + std::to_string(g.x + 1) + "," + std::to_string(g.y + 1) + ",12,12,1.000000,0.000000");
    CHECK_THROWS_AS(write_report(rep, dir / "missing_dir" / "run"), IoError);
}
