// Acceptance runner: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include "cli.hpp"
#include "support/oracles.hpp"

#include "dnbs/cluster.hpp"
#include "dnbs/doomp.hpp"
#include "dnbs/eval.hpp"
#include "dnbs/synthetic.hpp"
#include "dnbs/tracker.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <random>
#include <sstream>

using namespace dnbs;
using namespace dnbs::testing;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Verdict {
    bool pass;
    std::string detail;
};

int failures = 0;

void report(int id, const std::string& title, const std::function<Verdict()>& check) {
    const auto t0 = Clock::now();
    Verdict v;
    try {
        v = check();
    } catch (const std::exception& e) {
        v = {false, std::string("exception: ") + e.what()};
    }
    if (!v.pass) ++failures;
    std::cout << fmt::format("{} criterion {:2d}: {} ({}; {:.1f} s)", v.pass ? "PASS" : "FAIL", id, title, v.detail,
                             since(t0))
              << std::endl;
}

struct Instance {
    SampleSet samples;
    DnbsConfig cfg;
    int w, h;
};

// Small random selection problems: sizes 4..12, three foregrounds and three
// backgrounds, lambda cycling through 0, 0.25, 1 and K through 1..8. Odd
// instances use piecewise-constant templates, which produce exact score ties.
std::vector<Instance> selection_instances(int count) {
    std::mt19937_64 rng(20240601);
    const double lambdas[] = {0.0, 0.25, 1.0};
    std::vector<Instance> out;
    for (int i = 0; i < count; ++i) {
        Instance inst;
        inst.w = 4 + i % 9;
        inst.h = 4 + (i * 5) % 9;
        inst.samples = random_samples(rng, inst.w, inst.h, 3, 3, i % 2);
        inst.cfg.lambda = lambdas[i % 3];
        inst.cfg.K = 1 + i % 8;
        out.push_back(std::move(inst));
    }
    return out;
}

const std::vector<Instance>& instances() {
    static const std::vector<Instance> v = selection_instances(54);
    return v;
}

Verdict solver_equivalence() {
    int mismatched = 0;
    double worst = 0.0, solver_seconds = 0.0;
    for (const Instance& in : instances()) {
        const Dictionary dict(in.w, in.h);
        const auto t0 = Clock::now();
        const SelectionResult direct = select_direct(in.samples, in.cfg, dict);
        const SelectionResult iter = select_iterative(in.samples, in.cfg, dict);
        solver_seconds += since(t0);
        const DenseSelection oracle = dense_select(in.samples, in.cfg, dict);
        if (direct.atoms != iter.atoms || iter.atoms != oracle.atoms) {
            ++mismatched;
            continue;
        }
        for (std::size_t k = 0; k < iter.atoms.size(); ++k) {
            const double want = oracle.scores[k][iter.atoms[k]];
            worst = std::max({worst, rel_diff(direct.scores[k], want), rel_diff(iter.scores[k], want)});
        }
    }
    const bool ok = mismatched == 0 && worst <= 1e-8 && solver_seconds < 60.0;
    return {ok, fmt::format("{} instances, {} sequence mismatches, worst score rel. error {:.2e}, solvers {:.2f} s",
                            instances().size(), mismatched, worst, solver_seconds)};
}

Verdict nbs_degeneration() {
    int mismatched = 0;
    for (const Instance& base : instances()) {
        DnbsConfig cfg = base.cfg;
        cfg.lambda = 0.0;
        const Dictionary dict(base.w, base.h);
        const auto want = oomp_select(base.samples.foregrounds, cfg.K, cfg.dependence_tol, dict, cfg.tie_tol);
        if (select_iterative(base.samples, cfg, dict).atoms != want) ++mismatched;
        if (select_direct(base.samples, cfg, dict).atoms != want) ++mismatched;
    }
    return {mismatched == 0, fmt::format("{} instances x 2 solvers, {} mismatches against plain OOMP",
                                         instances().size(), mismatched)};
}

// Along the iterative path: box-lookup <psi_i, eps> against dense <gamma_i, eps>,
// and the recursive d_i against dense ||gamma_i||^2.
Verdict recursion_checks() {
    double worst_inner = 0.0, worst_norm = 0.0;
    std::size_t inner_checks = 0, norm_checks = 0;
    for (const Instance& in : instances()) {
        const Dictionary dict(in.w, in.h);
        const SelectionResult path = select_iterative(in.samples, in.cfg, dict);
        DoompState state(dict, in.samples, in.cfg);
        std::vector<Eigen::VectorXd> psi;
        for (const HaarBox& b : dict.atoms()) psi.push_back(box_vector(b, in.w, in.h));
        std::vector<const Image*> all;
        for (const Image& f : in.samples.foregrounds) all.push_back(&f);
        for (const Image& b : in.samples.backgrounds) all.push_back(&b);
        std::vector<HaarBox> chosen;
        std::vector<double> d, score;
        for (std::size_t k = 1; k <= path.atoms.size(); ++k) {
            const Eigen::MatrixXd q = orthonormal_basis(chosen, in.w, in.h);
            if (k == 1) {
                detail::direct_rescore(state);
                d = state.norms();
                score = state.scores();
            }
            std::vector<Eigen::VectorXd> eps;
            for (const Image* x : all) {
                const Eigen::VectorXd v = to_vector(*x);
                eps.push_back(v - q * (q.transpose() * v));
            }
            for (std::size_t i = 0; i < dict.size(); ++i) {
                if (state.is_selected(i)) continue;
                const Eigen::VectorXd gamma = psi[i] - q * (q.transpose() * psi[i]);
                if (k >= 2 && d[i] > in.cfg.dependence_tol) {
                    const ScoreUpdate u = score_iterative(state, i, d[i], score[i]);
                    d[i] = u.norm;
                    score[i] = u.score;
                    worst_norm = std::max(worst_norm, std::abs(u.norm - gamma.squaredNorm()));
                    ++norm_checks;
                }
                const double scale = std::sqrt(static_cast<double>(dict[i].area()));
                for (std::size_t j = 0; j < eps.size(); ++j) {
                    const double lookup = box_sum(state.residual_integrals()[j], dict[i]) / scale;
                    const double dense = gamma.dot(eps[j]);
                    worst_inner = std::max(worst_inner, std::abs(lookup - dense) / std::max(1.0, eps[j].norm()));
                    ++inner_checks;
                }
            }
            state.commit(path.atoms[k - 1]);
            chosen.push_back(dict[path.atoms[k - 1]]);
        }
    }
    const bool ok = worst_inner <= 1e-9 && worst_norm <= 1e-9;
    return {ok, fmt::format("{} inner products, worst |diff|/max(1,||eps||) {:.2e}; {} recursive norms, worst {:.2e}",
                            inner_checks, worst_inner, norm_checks, worst_norm)};
}

Verdict mu_near_exactness() {
    const std::pair<int, int> sizes[] = {{1, 1}, {2, 3}, {5, 4}, {8, 8}, {11, 7}, {16, 16}};
    std::size_t centers = 0, wrong = 0, not_fewer = 0;
    std::size_t fast_total = 0, brute_total = 0;
    for (auto [w, h] : sizes) {
        const Dictionary dict(w, h);
        for (int m = 5; m <= 10; ++m) {
            const double mu = m / 10.0;
            std::size_t fast_sum = 0, brute_sum = 0;
            for (std::size_t c = 0; c < dict.size(); ++c) {
                std::size_t fe = 0, be = 0;
                if (mu_near_set_fast(dict, c, mu, &fe) != mu_near_set_bruteforce(dict, c, mu, &be)) ++wrong;
                fast_sum += fe;
                brute_sum += be;
                ++centers;
            }
            if (mu >= 0.6 && !(fast_sum < brute_sum)) ++not_fewer;
            if (w == 16 && mu >= 0.6) {
                fast_total += fast_sum;
                brute_total += brute_sum;
            }
        }
    }
    return {wrong == 0 && not_fewer == 0,
            fmt::format("{} center/mu pairs, {} set mismatches, {} (size, mu>=0.6) cases without fewer evaluations; "
                        "16x16 mu>=0.6 evaluations fast/brute {:.3f}",
                        centers, wrong, not_fewer, static_cast<double>(fast_total) / brute_total)};
}

Verdict hierarchical_fidelity() {
    std::mt19937_64 rng(77);
    const Dictionary dict(12, 12);
    const ClusterIndex index = cluster_dictionary(dict, 0.7, 3);
    DnbsConfig cfg;
    cfg.K = 8;
    HierConfig hier;
    hier.ratio = 0.5;
    hier.mu = 0.7;
    HierConfig unbounded = hier;
    unbounded.ratio = std::numeric_limits<double>::infinity();
    int within = 0, identical = 0;
    const int n = 20;
    double worst = 0.0, sum = 0.0, worst_captured = 0.0;
    int noise_within = 0;
    for (int i = 0; i < n; ++i) {
        const SampleSet samples = random_samples(rng, 12, 12, 3, 3, i % 2);
        const SelectionResult exact = select_iterative(samples, cfg, dict);
        const SelectionResult h = select_hierarchical(samples, cfg, hier, index, dict);
        const double e = dnbs_objective(exact.subspace, samples, cfg.lambda);
        const double o = dnbs_objective(h.subspace, samples, cfg.lambda);
        const double rel = std::abs(o - e) / std::abs(e);
        worst = std::max(worst, rel);
        sum += rel;
        if (rel <= 0.10) ++within;
        if (rel <= 0.10 && i % 2 == 0) ++noise_within;
        // Diagnostic: gap relative to the objective decrease the exact solver achieves,
        // which stays well defined when the objective itself is near zero.
        const double start = dnbs_objective(Subspace(12, 12), samples, cfg.lambda);
        worst_captured = std::max(worst_captured, std::abs(o - e) / std::abs(start - e));
        if (select_hierarchical(samples, cfg, unbounded, index, dict).atoms == exact.atoms) ++identical;
    }
    return {within == n && identical == n,
            fmt::format("ratio 0.5: {}/{} within 10% (noise templates {}/{}), mean rel. gap {:.3f}, worst {:.3f}; "
                        "worst gap as a share of the exact objective decrease {:.4f}; unbounded ratio: {}/{} "
                        "identical sequences",
                        within, n, noise_within, n / 2, sum / n, worst, worst_captured, identical, n)};
}

Verdict scaling_trend() {
    const Dictionary dict(50, 50);
    DnbsConfig cfg;  // K = 30, lambda = 0.25
    // Best of three runs per point; the machine is shared with other work.
    auto timed = [&](const SampleSet& s, bool direct) {
        double best = std::numeric_limits<double>::infinity();
        for (int rep = 0; rep < 3; ++rep) {
            const auto t0 = Clock::now();
            if (direct) select_direct(s, cfg, dict);
            else select_iterative(s, cfg, dict);
            best = std::min(best, since(t0));
        }
        return best;
    };
    std::string curve;
    double it5 = 0, it100 = 0, dr5 = 0, dr100 = 0;
    for (int nb : {5, 10, 20, 50, 100}) {
        const SampleSet s = make_sample_set(50, 50, 3, nb, 1);
        const double it = timed(s, false), dr = timed(s, true);
        curve += fmt::format(" {}:{:.2f}/{:.2f}", nb, it, dr);
        if (nb == 5) it5 = it, dr5 = dr;
        if (nb == 100) it100 = it, dr100 = dr;
    }
    const double ri = it100 / it5, rd = dr100 / dr5;
    return {ri <= 3.0 && rd >= 8.0,
            fmt::format("iterative x{:.2f} (<= 3), direct x{:.2f} (>= 8); N_b:iter/direct s{}", ri, rd, curve)};
}

Verdict ssd_fast_path() {
    std::mt19937_64 rng(31);
    double worst = 0.0;
    int checked = 0;
    for (int trial = 0; trial < 3; ++trial) {
        const Image frame = random_texture(rng, 90, 70, 12, 90.0, 20.0);
        const BoundingBox box{30 + trial, 25, 14 + 2 * trial, 12};
        TrackerConfig cfg;
        cfg.K = 12;
        TrackerState st = init(frame, box, cfg);
        const int r = cfg.search_radius;
        const SsdMap map = ssd_map(st, frame, box.x - r, box.x + r, box.y - r, box.y + r);
        const Image ref = reference_reconstruction(st);
        std::uniform_int_distribution<int> col(0, map.cols - 1), row(0, map.rows - 1);
        for (int i = 0; i < 200; ++i) {
            const int c = col(rng), rr = row(rng);
            const Image patch = frame.crop(map.x0 + c, map.y0 + rr, box.w, box.h);
            double naive = 0.0;
            for (std::size_t p = 0; p < patch.pixels().size(); ++p) {
                naive += std::pow(patch.pixels()[p] - ref.pixels()[p], 2);
            }
            worst = std::max(worst, rel_diff(map.at(c, rr), naive, 1e-12));
            ++checked;
        }
    }
    return {worst <= 1e-6, fmt::format("{} candidates, worst rel. error {:.2e}", checked, worst)};
}

Verdict synthetic_tracking() {
    TrackerConfig cfg;
    SynthOptions clean;  // 80 frames, steps <= 3 px, radius 15
    const EvalReport a = run_ope(make_translation_sequence(clean), cfg);
    double worst = 0.0;
    for (const FrameScore& f : a.runs.front().frames) worst = std::max(worst, f.center_error);
    const bool ok_a = worst == 0.0 && a.success == 1.0;

    SynthOptions noisy = clean;
    noisy.noise_sigma = 5.0;
    const EvalReport b = run_ope(make_translation_sequence(noisy), cfg);
    const bool ok_b = b.mean_center_error <= 2.0;

    SynthOptions decoy;
    decoy.object_w = decoy.object_h = 14;
    decoy.seed = 1;
    const Sequence seq = make_decoy_sequence(decoy);
    TrackerConfig dnbs_cfg = cfg, nbs_cfg = cfg;
    dnbs_cfg.lambda = 0.25;
    nbs_cfg.lambda = 0.0;
    const double s_dnbs = run_ope(seq, dnbs_cfg).success;
    const double s_nbs = run_ope(seq, nbs_cfg).success;
    const bool ok_c = s_dnbs >= 0.9 && s_nbs <= 0.5;

    // Other seeds, for context only.
    int other_ok = 0;
    for (std::uint64_t seed = 2; seed <= 12; ++seed) {
        decoy.seed = seed;
        const Sequence s = make_decoy_sequence(decoy);
        if (run_ope(s, dnbs_cfg).success >= 0.9 && run_ope(s, nbs_cfg).success <= 0.5) ++other_ok;
    }
    return {ok_a && ok_b && ok_c,
            fmt::format("(a) {} frames, worst center error {}, success {:.3f}; (b) sigma 5 mean center error {:.3f} "
                        "px; (c) decoy seed 1 DNBS {:.3f} / NBS {:.3f}, seeds 2-12 meeting both bounds {}/11",
                        a.runs.front().frames.size(), worst, a.success, b.mean_center_error, s_dnbs, s_nbs, other_ok)};
}

Verdict dictionary_counts() {
    int bad = 0;
    for (int w = 1; w <= 16; ++w) {
        for (int h = 1; h <= 16; ++h) {
            // Independent count: every (left, right, top, bottom) with left <= right, top <= bottom.
            std::size_t count = 0;
            for (int u0 = 1; u0 <= w; ++u0) count += static_cast<std::size_t>(w - u0 + 1);
            std::size_t rows = 0;
            for (int v0 = 1; v0 <= h; ++v0) rows += static_cast<std::size_t>(h - v0 + 1);
            count *= rows;
            const std::size_t formula = static_cast<std::size_t>(w) * (w + 1) * h * (h + 1) / 4;
            if (Dictionary(w, h).size() != formula || count != formula) ++bad;
        }
    }
    const std::size_t big = Dictionary(50, 50).size();
    return {bad == 0 && big == 1625625, fmt::format("256 sizes, {} wrong; 50x50 has {} atoms", bad, big)};
}

Verdict determinism() {
    const fs::path root = fs::temp_directory_path() / "dnbs_acceptance_determinism";
    fs::remove_all(root);
    SynthOptions opt;
    opt.frames = 40;
    opt.noise_sigma = 5.0;
    save_sequence(make_translation_sequence(opt), root / "seq");
    std::ostringstream out, err;
    auto track = [&](const std::string& dir) {
        return cli::run({"dnbs", "track", (root / "seq").string(), "-o", (root / dir).string(), "--seed", "7"}, out,
                        err);
    };
    if (track("a") != cli::ok || track("b") != cli::ok) return {false, "cmd_track failed: " + err.str()};
    auto slurp = [](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };
    const std::string a = slurp(root / "a" / "track.csv"), b = slurp(root / "b" / "track.csv");
    fs::remove_all(root);
    return {!a.empty() && a == b, fmt::format("two runs, {} bytes each, identical: {}", a.size(), a == b)};
}

Verdict protocol_sanity() {
    SynthOptions opt;
    opt.frames = 30;
    opt.noise_sigma = 8.0;
    const Sequence seq = make_translation_sequence(opt);
    TrackerConfig cfg;
    cfg.K = 15;
    const EvalReport ope = run_ope(seq, cfg);
    const EvalReport tre = run_tre(seq, cfg, 1);
    const EvalReport sre = run_sre(seq, cfg, 0.0);
    bool sre_same = sre.runs.size() == 12;
    for (const RunRecord& r : sre.runs) sre_same = sre_same && same_scores(r, ope.runs.front());
    const bool tre_same = tre.runs.size() == 1 && same_scores(tre.runs.front(), ope.runs.front());
    // 7 of 20 pixels overlap: iou is exactly 0.35 and must not count.
    const std::vector<BoundingBox> tracked{{0, 0, 7, 1}}, truth{{0, 0, 20, 1}};
    const bool strict = iou(tracked[0], truth[0]) == 0.35 && success_fraction(tracked, truth, 0.35) == 0.0 &&
                        success_fraction(tracked, truth, 0.3499999) == 1.0;
    return {sre_same && tre_same && strict,
            fmt::format("TRE(1) == OPE {}, SRE(0) == OPE over 12 runs {}, iou 0.35 counted as failure {}", tre_same,
                        sre_same, strict)};
}

}  // namespace

int main() {
    std::cout << "kernels: " << kernels::active().name << std::endl;
    report(1, "iterative == direct == dense oracle", solver_equivalence);
    report(2, "lambda = 0 equals plain OOMP", nbs_degeneration);
    report(3, "inner-product and norm recursions", recursion_checks);
    report(4, "fast mu-near retrieval is exact and cheaper", mu_near_exactness);
    report(5, "hierarchical objective within 10% of exact", hierarchical_fidelity);
    report(6, "solver time scaling in N_b on 50x50", scaling_trend);
    report(7, "SSD fast path equals naive SSD", ssd_fast_path);
    report(8, "synthetic tracking", synthetic_tracking);
    report(9, "dictionary atom counts", dictionary_counts);
    report(10, "track CSVs are byte-identical across runs", determinism);
    report(11, "protocol sanity and strict threshold", protocol_sanity);
    std::cout << (failures == 0 ? "all criteria passed" : fmt::format("{} criteria failed", failures)) << std::endl;
    return failures == 0 ? 0 : 1;
}
