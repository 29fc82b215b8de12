#include "cli.hpp"

#include "dnbs/cluster.hpp"
#include "dnbs/config.hpp"
#include "dnbs/doomp.hpp"
#include "dnbs/errors.hpp"
#include "dnbs/eval.hpp"
#include "dnbs/image_io.hpp"
#include "dnbs/synthetic.hpp"
#include "dnbs/tracker.hpp"

#include "CLI11.hpp"
#include <fmt/format.h>

#include <algorithm>
#include <atomic>
#include <cctype>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

namespace dnbs::cli {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

struct ConfigFlags {
    std::string file;
    std::vector<std::string> sets;
    std::optional<std::string> solver;
    std::optional<double> lambda;
    std::optional<int> K;
    std::optional<std::uint64_t> seed;
};

void add_config_flags(CLI::App* app, ConfigFlags& f) {
    app->add_option("--config", f.file, "key = value config file");
    app->add_option("--set", f.sets, "override one key (key=value), repeatable");
    app->add_option("--solver", f.solver, "direct | iterative | hierarchical");
    app->add_option("--lambda", f.lambda, "background penalty weight");
    app->add_option("-K,--bases", f.K, "number of box bases");
    app->add_option("--seed", f.seed, "RNG seed");
}

RunConfig resolve(const ConfigFlags& f) {
    RunConfig cfg = f.file.empty() ? RunConfig{} : load_run_config(f.file);
    if (f.solver) cfg.set("solver", *f.solver);
    if (f.lambda) cfg.tracker.lambda = *f.lambda;
    if (f.K) cfg.tracker.K = *f.K;
    if (f.seed) cfg.tracker.seed = *f.seed;
    for (const std::string& s : f.sets) cfg.set(s);
    cfg.validate();
    return cfg;
}

void make_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
}

std::ofstream open_out(const fs::path& p) {
    std::ofstream out(p);
    if (!out) throw IoError("cannot write " + p.string());
    return out;
}

BoundingBox parse_bbox(const std::string& text) {
    std::vector<BoundingBox> b;
    try {
        b = parse_groundtruth(text);
    } catch (const ParseError& e) {
        throw InvalidArgument("--bbox: " + std::string(e.what()));
    }
    if (b.size() != 1) throw InvalidArgument("--bbox expects x,y,w,h");
    return b.front();
}

bool blank(const Image& img) {
    return std::all_of(img.pixels().begin(), img.pixels().end(), [](double v) { return v == 0.0; });
}

std::vector<fs::path> image_files(const fs::path& dir) {
    std::vector<fs::path> out;
    std::error_code ec;
    if (!fs::is_directory(dir, ec)) return out;
    for (const auto& e : fs::directory_iterator(dir)) {
        std::string ext = e.path().extension().string();
        for (char& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        if (e.is_regular_file() && (ext == ".pgm" || ext == ".png")) out.push_back(e.path());
    }
    std::sort(out.begin(), out.end());
    return out;
}

// ---------------------------------------------------------------- track

struct TrackArgs {
    std::string sequence;
    std::string bbox;
    std::string groundtruth;
    std::string out;
    bool annotate = false;
    ConfigFlags cfg;
};

int cmd_track(const TrackArgs& a, std::ostream& out, std::ostream& err) {
    const RunConfig cfg = resolve(a.cfg);
    Sequence seq = load_frames(a.sequence);
    BoundingBox init;
    if (!a.bbox.empty()) {
        init = parse_bbox(a.bbox);
    } else {
        fs::path gt = a.groundtruth;
        if (gt.empty()) {
            const Sequence full = load_sequence(a.sequence);
            init = full.groundtruth.front();
        } else {
            const auto boxes = load_groundtruth(gt);
            if (boxes.empty()) throw ParseError(gt.string() + ": empty ground truth");
            init = boxes.front();
        }
    }
    const fs::path dir = a.out;
    make_dir(dir);
    save_run_config(cfg, dir / "config.txt");
    if (a.annotate) make_dir(dir / "frames");

    std::ofstream csv = open_out(dir / "track.csv");
    csv << "frame,x,y,w,h,ssd_min,refreshed\n";
    const Image first = seq.frame(0);
    if (!init.inside(first.width(), first.height())) throw InvalidArgument("initial box leaves the first frame");
    if (blank(first.crop(init.x, init.y, init.w, init.h))) {
        throw NumericDegeneracy("initial template is all zero");
    }
    TrackerState st = dnbs::init(first, init, cfg.tracker);
    csv << fmt::format("1,{},{},{},{},,0\n", init.x + 1, init.y + 1, init.w, init.h);
    auto annotate = [&](const Image& frame, const BoundingBox& b, std::size_t i) {
        if (!a.annotate) return;
        RgbImage rgb = RgbImage::from_gray(frame);
        rgb.draw_rect(b.x, b.y, b.w, b.h, 255, 0, 0);
        save_png(rgb, dir / "frames" / fmt::format("frame_{:04d}.png", i + 1));
    };
    annotate(first, init, 0);
    int early = 0;
    for (std::size_t i = 1; i < seq.size(); ++i) {
        const Image frame = seq.frame(i);
        const TrackResult r = step(st, frame);
        if (r.refreshed && r.status == SelectionStatus::early_stop) ++early;
        csv << fmt::format("{},{},{},{},{},{:.17g},{}\n", i + 1, r.bbox.x + 1, r.bbox.y + 1, r.bbox.w, r.bbox.h,
                           r.ssd_min, r.refreshed ? 1 : 0);
        annotate(frame, r.bbox, i);
    }
    if (early > 0) err << "warning: " << early << " refresh(es) stopped early with fewer than K bases\n";
    out << "tracked " << seq.size() << " frames -> " << (dir / "track.csv").string() << "\n";
    return Exit::ok;
}

// ---------------------------------------------------------------- train

struct TrainArgs {
    std::string samples;
    std::string out;
    std::string trace;
    std::string reference;
    std::string clusters;
    ConfigFlags cfg;
};

int cmd_train(const TrainArgs& a, std::ostream& out, std::ostream& err) {
    const RunConfig cfg = resolve(a.cfg);
    const fs::path root = a.samples;
    std::error_code ec;
    if (!fs::is_directory(root / "fg", ec)) throw IoError("expected foreground images under " + (root / "fg").string());
    SampleSet samples;
    for (const fs::path& p : image_files(root / "fg")) samples.foregrounds.push_back(load_image(p));
    for (const fs::path& p : image_files(root / "bg")) samples.backgrounds.push_back(load_image(p));
    if (samples.foregrounds.empty()) throw IoError("no foreground images under " + (root / "fg").string());
    samples.validate();
    if (std::all_of(samples.foregrounds.begin(), samples.foregrounds.end(), blank)) {
        throw NumericDegeneracy("foreground samples have no energy to reconstruct");
    }

    TrackerResources res;
    res.dictionary = std::make_shared<const Dictionary>(samples.width(), samples.height());
    if (cfg.tracker.solver == Solver::hierarchical) {
        if (a.clusters.empty()) {
            res.clusters = std::make_shared<const ClusterIndex>(
                cluster_dictionary(*res.dictionary, cfg.tracker.mu, cfg.tracker.seed));
        } else {
            ClusterIndex idx = load_cluster_index(a.clusters);
            idx.validate(*res.dictionary);
            res.clusters = std::make_shared<const ClusterIndex>(std::move(idx));
        }
    }
    const SelectionResult r = train_subspace(samples, cfg.tracker, res);
    if (r.status == SelectionStatus::early_stop) {
        err << "warning: selection stopped after " << r.atoms.size() << " of " << cfg.tracker.K << " bases\n";
    }
    SubspaceRecord rec{samples.width(), samples.height(), r.subspace.bases(), {}};
    if (!a.reference.empty()) rec.coefficients = r.subspace.coefficients(load_image(a.reference));
    const fs::path target = a.out;
    if (target.has_parent_path()) make_dir(target.parent_path());
    save_subspace(rec, target);
    const fs::path trace = a.trace.empty() ? fs::path(target).replace_extension("").string() + "_trace.csv" : a.trace;
    write_trace_csv(r.trace, trace);
    save_run_config(cfg, fs::path(target).replace_extension("").string() + "_config.txt");
    out << fmt::format("selected {} bases, objective {:.6g} -> {}\n", r.atoms.size(),
                       dnbs_objective(r.subspace, samples, cfg.tracker.lambda), target.string());
    return Exit::ok;
}

// ---------------------------------------------------------------- cluster

struct ClusterArgs {
    int width = 0;
    int height = 0;
    double mu = 0.7;
    std::uint64_t seed = 0;
    std::string out;
};

int cmd_cluster(const ClusterArgs& a, std::ostream& out) {
    if (!(a.mu > 0.0 && a.mu <= 1.0)) throw InvalidArgument("--mu must lie in (0, 1]");
    const Dictionary dict(a.width, a.height);
    const auto t0 = Clock::now();
    const ClusterIndex idx = cluster_dictionary(dict, a.mu, a.seed);
    const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    const fs::path target = a.out;
    if (target.has_parent_path()) make_dir(target.parent_path());
    save_cluster_index(idx, target);
    out << fmt::format("{} atoms in {} clusters ({:.2f} s) -> {}\n", dict.size(), idx.clusters.size(), secs,
                       target.string());
    return Exit::ok;
}

// ---------------------------------------------------------------- bench

struct BenchArgs {
    std::string sweep = "all";
    int size = 50;
    int K = 30;
    int max_K = 100;
    int N_b = 10;
    std::uint64_t seed = 1;
    std::string out;
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

SelectionResult solve(Solver s, const SampleSet& samples, const DnbsConfig& dc, const Dictionary& dict,
                      const ClusterIndex* idx, const HierConfig& hc) {
    switch (s) {
    case Solver::direct: return select_direct(samples, dc, dict);
    case Solver::iterative: return select_iterative(samples, dc, dict);
    case Solver::hierarchical: return select_hierarchical(samples, dc, hc, *idx, dict);
    }
    throw InvalidArgument("unknown solver");
}

int cmd_bench(const BenchArgs& a, std::ostream& out) {
    if (a.size < 1 || a.K < 1 || a.max_K < 1 || a.N_b < 0) throw InvalidArgument("bench sizes must be positive");
    const fs::path dir = a.out;
    make_dir(dir);
    const Dictionary dict(a.size, a.size);
    const bool all = a.sweep == "all";
    HierConfig hc;
    DnbsConfig dc;
    auto cluster = [&](double mu) { return cluster_dictionary(dict, mu, a.seed); };

    if (all || a.sweep == "K") {
        // One run to max_K per solver; the objective after k bases is the
        // starting objective minus the first k winning scores.
        const SampleSet samples = make_sample_set(a.size, a.size, 3, a.N_b, a.seed);
        const ClusterIndex idx = cluster(hc.mu);
        dc.K = static_cast<int>(std::min<std::size_t>(a.max_K, dict.size()));
        const double start = dnbs_objective(Subspace(a.size, a.size), samples, dc.lambda);
        std::ofstream csv = open_out(dir / "bench_K.csv");
        csv << "K,solver,objective,seconds\n";
        for (Solver s : {Solver::direct, Solver::iterative, Solver::hierarchical}) {
            const SelectionResult r = solve(s, samples, dc, dict, &idx, hc);
            double obj = start, t = 0.0;
            for (std::size_t k = 0; k < r.trace.size(); ++k) {
                obj -= r.trace[k].score;
                t += r.trace[k].seconds;
                csv << fmt::format("{},{},{:.10g},{:.6f}\n", k + 1, solver_name(s), obj, t);
            }
        }
        out << "wrote " << (dir / "bench_K.csv").string() << "\n";
    }
    if (all || a.sweep == "Nb") {
        dc.K = a.K;
        std::ofstream csv = open_out(dir / "bench_Nb.csv");
        csv << "N_b,solver,objective,seconds\n";
        for (int nb : {5, 10, 20, 50, 100}) {
            const SampleSet samples = make_sample_set(a.size, a.size, 3, nb, a.seed);
            for (Solver s : {Solver::direct, Solver::iterative}) {
                const auto t0 = Clock::now();
                const SelectionResult r = solve(s, samples, dc, dict, nullptr, hc);
                const double secs = seconds_since(t0);
                csv << fmt::format("{},{},{:.10g},{:.6f}\n", nb, solver_name(s),
                                   dnbs_objective(r.subspace, samples, dc.lambda), secs);
            }
        }
        out << "wrote " << (dir / "bench_Nb.csv").string() << "\n";
    }
    if (all || a.sweep == "ratio") {
        dc.K = a.K;
        const SampleSet samples = make_sample_set(a.size, a.size, 3, a.N_b, a.seed);
        const ClusterIndex idx = cluster(hc.mu);
        const SelectionResult exact = select_iterative(samples, dc, dict);
        const double exact_obj = dnbs_objective(exact.subspace, samples, dc.lambda);
        std::ofstream csv = open_out(dir / "bench_ratio.csv");
        csv << "ratio,objective,exact_objective,scored_candidates,exact_candidates,seconds\n";
        for (double ratio : {0.0, 0.1, 0.25, 0.5, 1.0, 2.0, std::numeric_limits<double>::infinity()}) {
            HierConfig h = hc;
            h.ratio = ratio;
            const auto t0 = Clock::now();
            const SelectionResult r = select_hierarchical(samples, dc, h, idx, dict);
            const double secs = seconds_since(t0);
            csv << fmt::format("{},{:.10g},{:.10g},{},{},{:.6f}\n", ratio, dnbs_objective(r.subspace, samples, dc.lambda),
                               exact_obj, r.scored_candidates, exact.scored_candidates, secs);
        }
        out << "wrote " << (dir / "bench_ratio.csv").string() << "\n";
    }
    if (all || a.sweep == "mu") {
        dc.K = a.K;
        const SampleSet samples = make_sample_set(a.size, a.size, 3, a.N_b, a.seed);
        std::ofstream csv = open_out(dir / "bench_mu.csv");
        csv << "mu,clusters,cluster_seconds,objective,scored_candidates,seconds\n";
        for (double mu : {0.5, 0.6, 0.7, 0.8, 0.9}) {
            auto t0 = Clock::now();
            const ClusterIndex idx = cluster(mu);
            const double build = seconds_since(t0);
            HierConfig h = hc;
            h.mu = mu;
            t0 = Clock::now();
            const SelectionResult r = select_hierarchical(samples, dc, h, idx, dict);
            const double secs = seconds_since(t0);
            csv << fmt::format("{},{},{:.6f},{:.10g},{},{:.6f}\n", mu, idx.clusters.size(), build,
                               dnbs_objective(r.subspace, samples, dc.lambda), r.scored_candidates, secs);
        }
        out << "wrote " << (dir / "bench_mu.csv").string() << "\n";
    }
    return Exit::ok;
}

// ---------------------------------------------------------------- eval

struct EvalArgs {
    std::vector<std::string> sequences;
    std::string protocol = "ope";
    std::string out;
    ConfigFlags cfg;
};

struct SequenceOutcome {
    std::string name;
    std::optional<EvalReport> report;
    std::string error;
};

SequenceOutcome evaluate_one(const std::string& path, Protocol p, const RunConfig& cfg, const fs::path& dir) {
    SequenceOutcome o;
    o.name = fs::path(path).filename().string();
    try {
        const Sequence seq = load_sequence(path);
        o.name = seq.name;
        EvalReport rep;
        switch (p) {
        case Protocol::ope: rep = run_ope(seq, cfg.tracker, cfg.threshold); break;
        case Protocol::tre: rep = run_tre(seq, cfg.tracker, cfg.segments, cfg.threshold); break;
        case Protocol::sre: rep = run_sre(seq, cfg.tracker, cfg.sre_magnitude, cfg.threshold); break;
        }
        write_report(rep, dir / fmt::format("{}_{}", seq.name, protocol_name(p)));
        o.report = std::move(rep);
    } catch (const std::exception& e) {
        o.error = e.what();
    }
    return o;
}

int cmd_eval(const EvalArgs& a, std::ostream& out, std::ostream& err) {
    const RunConfig cfg = resolve(a.cfg);
    const Protocol p = parse_protocol(a.protocol);
    const fs::path dir = a.out;
    make_dir(dir);
    save_run_config(cfg, dir / "config.txt");
    std::ofstream summary = open_out(dir / "summary.csv");

    // Sequences run on a small worker pool; results are merged in input order.
    std::vector<SequenceOutcome> results(a.sequences.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < results.size(); i = next++) {
            results[i] = evaluate_one(a.sequences[i], p, cfg, dir);
        }
    };
    const std::size_t n_threads =
        std::clamp<std::size_t>(std::thread::hardware_concurrency(), 1, std::max<std::size_t>(1, results.size()));
    std::vector<std::thread> pool;
    for (std::size_t t = 1; t < n_threads; ++t) pool.emplace_back(worker);
    worker();
    for (std::thread& t : pool) t.join();

    summary << "sequence,status,success,mean_center_error\n";
    double sum_success = 0.0, sum_error = 0.0;
    int good = 0, failed = 0;
    for (std::size_t i = 0; i < results.size(); ++i) {
        const SequenceOutcome& o = results[i];
        if (!o.report) {
            err << "error: " << a.sequences[i] << ": " << o.error << "\n";
            std::string msg = o.error;
            for (char& c : msg) {
                if (c == ',' || c == '\n') c = ';';
            }
            summary << fmt::format("{},error: {},,\n", o.name, msg);
            ++failed;
            continue;
        }
        const EvalReport& rep = *o.report;
        for (const std::string& w : rep.warnings) err << "warning: " << o.name << ": " << w << "\n";
        summary << fmt::format("{},ok,{:.6f},{:.6f}\n", o.name, rep.success, rep.mean_center_error);
        out << fmt::format("{}: {} success {:.4f}, mean center error {:.3f} px, {:.1f} fps\n", o.name,
                           protocol_name(p), rep.success, rep.mean_center_error, rep.fps);
        sum_success += rep.success;
        sum_error += rep.mean_center_error;
        ++good;
    }
    if (good > 0) summary << fmt::format("average,ok,{:.6f},{:.6f}\n", sum_success / good, sum_error / good);
    return failed > 0 ? Exit::io : Exit::ok;
}

// ---------------------------------------------------------------- synth

struct SynthArgs {
    std::string kind = "translation";
    std::string out;
    SynthOptions opt;
};

int cmd_synth(SynthArgs a, std::ostream& out) {
    const Sequence seq = a.kind == "decoy" ? make_decoy_sequence(a.opt) : make_translation_sequence(a.opt);
    save_sequence(seq, a.out);
    out << "wrote " << seq.size() << " frames to " << a.out << "\n";
    return Exit::ok;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Discriminative box-feature subspaces: training, clustering, tracking and evaluation"};
    app.name(args.empty() ? "dnbs" : fs::path(args[0]).filename().string());
    app.require_subcommand(1);

    TrackArgs track;
    auto* t = app.add_subcommand("track", "track one sequence and write a per-frame CSV");
    t->add_option("sequence", track.sequence, "frame directory or index file")->required();
    t->add_option("--bbox", track.bbox, "initial box x,y,w,h (1-based); default: first ground-truth line");
    t->add_option("--groundtruth", track.groundtruth, "ground-truth file for the initial box");
    t->add_option("-o,--out", track.out, "output directory")->required();
    t->add_flag("--annotate", track.annotate, "also write PNG frames with the box drawn in");
    add_config_flags(t, track.cfg);

    TrainArgs train;
    auto* tr = app.add_subcommand("train", "select a subspace from fg/ and bg/ sample images");
    tr->add_option("samples", train.samples, "directory with fg/ and optional bg/")->required();
    tr->add_option("-o,--out", train.out, "subspace JSON")->required();
    tr->add_option("--trace", train.trace, "per-iteration trace CSV (default <out>_trace.csv)");
    tr->add_option("--reference", train.reference, "template whose coefficients are stored");
    tr->add_option("--clusters", train.clusters, "cluster index for the hierarchical solver");
    add_config_flags(tr, train.cfg);

    ClusterArgs cl;
    auto* c = app.add_subcommand("cluster", "build a mu-near cluster index for a template size");
    c->add_option("--width", cl.width, "template width")->required()->check(CLI::PositiveNumber);
    c->add_option("--height", cl.height, "template height")->required()->check(CLI::PositiveNumber);
    c->add_option("--mu", cl.mu, "inner-product threshold")->capture_default_str();
    c->add_option("--seed", cl.seed, "center-drawing seed")->capture_default_str();
    c->add_option("-o,--out", cl.out, "index JSON")->required();

    BenchArgs bench;
    auto* b = app.add_subcommand("bench", "solver score/time sweeps on synthetic templates");
    b->add_option("--sweep", bench.sweep, "K | Nb | ratio | mu | all")->capture_default_str()
        ->check(CLI::IsMember({"K", "Nb", "ratio", "mu", "all"}));
    b->add_option("--size", bench.size, "template side length")->capture_default_str();
    b->add_option("-K,--bases", bench.K, "bases for the N_b, ratio and mu sweeps")->capture_default_str();
    b->add_option("--max-K", bench.max_K, "largest K in the K sweep")->capture_default_str();
    b->add_option("--nb", bench.N_b, "backgrounds for the K, ratio and mu sweeps")->capture_default_str();
    b->add_option("--seed", bench.seed, "sample seed")->capture_default_str();
    b->add_option("-o,--out", bench.out, "output directory")->required();

    EvalArgs ev;
    auto* e = app.add_subcommand("eval", "run an evaluation protocol over sequences");
    e->add_option("sequences", ev.sequences, "sequence directories or index files")->required();
    e->add_option("--protocol", ev.protocol, "ope | tre | sre")->capture_default_str()->check(CLI::IsMember({"ope", "tre", "sre"}));
    e->add_option("-o,--out", ev.out, "output directory")->required();
    add_config_flags(e, ev.cfg);

    SynthArgs sy;
    auto* s = app.add_subcommand("synth", "write a synthetic sequence with ground truth");
    s->add_option("--kind", sy.kind, "translation | decoy")->capture_default_str()->check(CLI::IsMember({"translation", "decoy"}));
    s->add_option("-o,--out", sy.out, "output directory")->required();
    s->add_option("--frames", sy.opt.frames, "frame count")->capture_default_str();
    s->add_option("--width", sy.opt.width, "frame width")->capture_default_str();
    s->add_option("--height", sy.opt.height, "frame height")->capture_default_str();
    s->add_option("--object", sy.opt.object_w, "object side length")->capture_default_str();
    s->add_option("--noise", sy.opt.noise_sigma, "Gaussian pixel noise sigma")->capture_default_str();
    s->add_option("--seed", sy.opt.seed, "RNG seed")->capture_default_str();

    std::vector<const char*> argv;
    for (const std::string& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return Exit::ok;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return Exit::ok;
    } catch (const CLI::ParseError& ex) {
        err << "error: " << ex.what() << "\n" << "run with --help for usage\n";
        return Exit::usage;
    }

    try {
        if (*t) return cmd_track(track, out, err);
        if (*tr) return cmd_train(train, out, err);
        if (*c) return cmd_cluster(cl, out);
        if (*b) return cmd_bench(bench, out);
        if (*e) return cmd_eval(ev, out, err);
        if (*s) {
            sy.opt.object_h = sy.opt.object_w;
            return cmd_synth(sy, out);
        }
    } catch (const ConfigError& ex) {
        err << "config error: " << ex.what() << "\n";
        return Exit::usage;
    } catch (const IoError& ex) {
        err << "I/O error: " << ex.what() << "\n";
        return Exit::io;
    } catch (const ParseError& ex) {
        err << "parse error: " << ex.what() << "\n";
        return Exit::io;
    } catch (const NumericDegeneracy& ex) {
        err << "numeric error: " << ex.what() << "\n";
        return Exit::numeric;
    } catch (const LinearDependence& ex) {
        err << "numeric error: " << ex.what() << "\n";
        return Exit::numeric;
    } catch (const InvalidArgument& ex) {
        err << "error: " << ex.what() << "\n";
        return Exit::usage;
    } catch (const std::exception& ex) {
        err << "error: " << ex.what() << "\n";
        return Exit::io;
    }
    return Exit::usage;
}

}  // namespace dnbs::cli
