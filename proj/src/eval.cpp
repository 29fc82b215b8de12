#include "dnbs/eval.hpp"

#include "dnbs/errors.hpp"
#include "dnbs/image_io.hpp"

#include <fmt/format.h>
#include "json.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>

namespace dnbs {

namespace fs = std::filesystem;

double success_fraction(const std::vector<BoundingBox>& tracked, const std::vector<BoundingBox>& truth,
                        double threshold) {
    if (tracked.size() != truth.size()) {
        throw InvalidArgument("success_fraction: " + std::to_string(tracked.size()) + " tracked boxes vs " +
                              std::to_string(truth.size()) + " ground-truth boxes");
    }
    if (tracked.empty()) return 0.0;
    std::size_t hits = 0;
    for (std::size_t i = 0; i < tracked.size(); ++i) hits += iou(tracked[i], truth[i]) > threshold;
    return static_cast<double>(hits) / static_cast<double>(tracked.size());
}

std::vector<double> overlap_thresholds() {
    std::vector<double> t;
    for (int i = 0; i <= 20; ++i) t.push_back(i / 20.0);
    return t;
}

std::vector<double> distance_thresholds() {
    std::vector<double> t;
    for (int i = 0; i <= 50; ++i) t.push_back(i);
    return t;
}

std::string_view protocol_name(Protocol p) noexcept {
    switch (p) {
    case Protocol::ope: return "ope";
    case Protocol::tre: return "tre";
    case Protocol::sre: return "sre";
    }
    return "?";
}

Protocol parse_protocol(std::string_view name) {
    if (name == "ope") return Protocol::ope;
    if (name == "tre") return Protocol::tre;
    if (name == "sre") return Protocol::sre;
    throw InvalidArgument("unknown protocol '" + std::string(name) + "' (expected ope, tre or sre)");
}

bool same_scores(const RunRecord& a, const RunRecord& b) {
    if (a.start_frame != b.start_frame || !(a.init == b.init) || a.frames.size() != b.frames.size()) return false;
    for (std::size_t i = 0; i < a.frames.size(); ++i) {
        const FrameScore &x = a.frames[i], &y = b.frames[i];
        if (x.frame != y.frame || !(x.box == y.box) || x.iou != y.iou || x.center_error != y.center_error) return false;
    }
    return a.success == b.success && a.mean_center_error == b.mean_center_error &&
           a.success_curve == b.success_curve && a.precision_curve == b.precision_curve;
}

bool same_scores(const EvalReport& a, const EvalReport& b) {
    if (a.runs.size() != b.runs.size()) return false;
    for (std::size_t i = 0; i < a.runs.size(); ++i) {
        if (!same_scores(a.runs[i], b.runs[i])) return false;
    }
    return a.threshold == b.threshold && a.success == b.success && a.mean_center_error == b.mean_center_error &&
           a.success_curve == b.success_curve && a.precision_curve == b.precision_curve;
}

std::vector<BoundingBox> run_track(const Sequence& seq, std::size_t start, const BoundingBox& init,
                                   const TrackerConfig& cfg, const TrackerResources& res) {
    if (start >= seq.size()) throw InvalidArgument("run start past the end of the sequence");
    TrackerState st = dnbs::init(seq.frame(start), init, cfg, res);
    std::vector<BoundingBox> out{init};
    for (std::size_t i = start + 1; i < seq.size(); ++i) out.push_back(step(st, seq.frame(i)).bbox);
    return out;
}

RunRecord score_run(const Sequence& seq, std::size_t start, const BoundingBox& init,
                    const std::vector<BoundingBox>& tracked, double threshold) {
    if (start + tracked.size() != seq.size()) throw InvalidArgument("tracked boxes do not cover the run");
    RunRecord r;
    r.start_frame = static_cast<int>(start);
    r.init = init;
    const std::vector<BoundingBox> truth(seq.groundtruth.begin() + static_cast<std::ptrdiff_t>(start),
                                         seq.groundtruth.end());
    double ce = 0.0;
    for (std::size_t i = 0; i < tracked.size(); ++i) {
        FrameScore f;
        f.frame = static_cast<int>(start + i);
        f.box = tracked[i];
        f.iou = iou(tracked[i], truth[i]);
        f.center_error = center_error(tracked[i], truth[i]);
        ce += f.center_error;
        r.frames.push_back(f);
    }
    const double n = static_cast<double>(tracked.size());
    r.success = success_fraction(tracked, truth, threshold);
    r.mean_center_error = ce / n;
    for (double t : overlap_thresholds()) {
        std::size_t hits = 0;
        for (const FrameScore& f : r.frames) hits += f.iou > t;
        r.success_curve.push_back(static_cast<double>(hits) / n);
    }
    for (double d : distance_thresholds()) {
        std::size_t hits = 0;
        for (const FrameScore& f : r.frames) hits += f.center_error <= d;
        r.precision_curve.push_back(static_cast<double>(hits) / n);
    }
    return r;
}

namespace {

using Clock = std::chrono::steady_clock;

RunRecord timed_run(const Sequence& seq, std::size_t start, const BoundingBox& init, const TrackerConfig& cfg,
                    const TrackerResources& res, double threshold, std::string label) {
    const auto t0 = Clock::now();
    const std::vector<BoundingBox> tracked = run_track(seq, start, init, cfg, res);
    RunRecord r = score_run(seq, start, init, tracked, threshold);
    r.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    r.label = std::move(label);
    return r;
}

void summarize(EvalReport& rep) {
    const double n = static_cast<double>(rep.runs.size());
    rep.success_curve.assign(overlap_thresholds().size(), 0.0);
    rep.precision_curve.assign(distance_thresholds().size(), 0.0);
    double frames = 0.0, seconds = 0.0;
    for (const RunRecord& r : rep.runs) {
        rep.success += r.success / n;
        rep.mean_center_error += r.mean_center_error / n;
        for (std::size_t i = 0; i < rep.success_curve.size(); ++i) rep.success_curve[i] += r.success_curve[i] / n;
        for (std::size_t i = 0; i < rep.precision_curve.size(); ++i) rep.precision_curve[i] += r.precision_curve[i] / n;
        frames += static_cast<double>(r.frames.size());
        seconds += r.seconds;
    }
    rep.fps = seconds > 0.0 ? frames / seconds : 0.0;
}

EvalReport start_report(const Sequence& seq, Protocol p, double threshold) {
    seq.validate();
    EvalReport rep;
    rep.sequence = seq.name;
    rep.protocol = p;
    rep.threshold = threshold;
    return rep;
}

}  // namespace

EvalReport run_ope(const Sequence& seq, const TrackerConfig& cfg, double threshold) {
    EvalReport rep = start_report(seq, Protocol::ope, threshold);
    const BoundingBox& b = seq.groundtruth.front();
    const TrackerResources res = make_resources(b.w, b.h, cfg);
    rep.runs.push_back(timed_run(seq, 0, b, cfg, res, threshold, "ope"));
    summarize(rep);
    return rep;
}

EvalReport run_tre(const Sequence& seq, const TrackerConfig& cfg, int n_segments, double threshold) {
    if (n_segments < 1) throw InvalidArgument("n_segments must be >= 1");
    EvalReport rep = start_report(seq, Protocol::tre, threshold);
    const std::size_t N = seq.size();
    std::size_t n = static_cast<std::size_t>(n_segments);
    if (N < n) {
        rep.warnings.push_back(fmt::format("sequence has {} frames; using {} segments instead of {}", N, N, n));
        n = N;
    }
    const BoundingBox& b = seq.groundtruth.front();
    const TrackerResources res = make_resources(b.w, b.h, cfg);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t start = i * N / n;
        const BoundingBox& init = seq.groundtruth[start];
        if (init.w != b.w || init.h != b.h) throw InvalidArgument("ground-truth box size changes within the sequence");
        rep.runs.push_back(timed_run(seq, start, init, cfg, res, threshold, fmt::format("segment {}", i)));
    }
    summarize(rep);
    return rep;
}

const std::vector<SreShift>& sre_shifts() {
    static const std::vector<SreShift> shifts = {
        {"shift N", 0.0, -0.1},   {"shift NE", 0.1, -0.1},   {"shift E", 0.1, 0.0},    {"shift SE", 0.1, 0.1},
        {"shift S", 0.0, 0.1},    {"shift SW", -0.1, 0.1},   {"shift W", -0.1, 0.0},   {"shift NW", -0.1, -0.1},
        {"corner NE", 0.05, -0.05}, {"corner SE", 0.05, 0.05}, {"corner SW", -0.05, 0.05}, {"corner NW", -0.05, -0.05},
    };
    return shifts;
}

EvalReport run_sre(const Sequence& seq, const TrackerConfig& cfg, double magnitude, double threshold) {
    if (!(magnitude >= 0.0)) throw InvalidArgument("perturbation magnitude must be >= 0");
    EvalReport rep = start_report(seq, Protocol::sre, threshold);
    const BoundingBox& b = seq.groundtruth.front();
    const TrackerResources res = make_resources(b.w, b.h, cfg);
    const Image first = seq.frame(0);
    for (const SreShift& s : sre_shifts()) {
        BoundingBox init = b;
        init.x += static_cast<int>(std::lround(magnitude * s.fx * b.w));
        init.y += static_cast<int>(std::lround(magnitude * s.fy * b.h));
        init = clamp_to_frame(init, first.width(), first.height());
        rep.runs.push_back(timed_run(seq, 0, init, cfg, res, threshold, s.label));
    }
    summarize(rep);
    return rep;
}

void write_report(const EvalReport& rep, const fs::path& prefix) {
    auto open = [](const fs::path& p) {
        std::ofstream out(p);
        if (!out) throw IoError("cannot write " + p.string());
        return out;
    };
    const std::string base = prefix.string();
    {
        std::ofstream out = open(base + "_frames.csv");
        out << "run,label,frame,x,y,w,h,iou,center_error\n";
        for (std::size_t i = 0; i < rep.runs.size(); ++i) {
            for (const FrameScore& f : rep.runs[i].frames) {
                out << fmt::format("{},{},{},{},{},{},{},{:.6f},{:.6f}\n", i, rep.runs[i].label, f.frame + 1, f.box.x + 1,
                                   f.box.y + 1, f.box.w, f.box.h, f.iou, f.center_error);
            }
        }
    }
    {
        std::ofstream out = open(base + "_success.csv");
        out << "threshold,success\n";
        const auto t = overlap_thresholds();
        for (std::size_t i = 0; i < t.size(); ++i) out << fmt::format("{:.2f},{:.6f}\n", t[i], rep.success_curve[i]);
    }
    {
        std::ofstream out = open(base + "_precision.csv");
        out << "distance,precision\n";
        const auto d = distance_thresholds();
        for (std::size_t i = 0; i < d.size(); ++i) out << fmt::format("{:.0f},{:.6f}\n", d[i], rep.precision_curve[i]);
    }
    nlohmann::ordered_json j;
    j["sequence"] = rep.sequence;
    j["protocol"] = std::string(protocol_name(rep.protocol));
    j["threshold"] = rep.threshold;
    j["success"] = rep.success;
    j["mean_center_error"] = rep.mean_center_error;
    j["fps"] = rep.fps;
    j["warnings"] = rep.warnings;
    auto& runs = j["runs"] = nlohmann::ordered_json::array();
    for (const RunRecord& r : rep.runs) {
        runs.push_back({{"label", r.label},
                        {"start_frame", r.start_frame + 1},
                        {"init", {r.init.x + 1, r.init.y + 1, r.init.w, r.init.h}},
                        {"frames", r.frames.size()},
                        {"success", r.success},
                        {"mean_center_error", r.mean_center_error}});
    }
    std::ofstream out = open(base + ".json");
    out << j.dump(2) << "\n";
}

std::vector<BoundingBox> parse_groundtruth(std::string_view text) {
    std::vector<BoundingBox> boxes;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t end = std::min(text.find('\n', pos), text.size());
        std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        double v[4];
        int n = 0;
        std::size_t i = 0;
        auto sep = [](char c) { return c == ',' || std::isspace(static_cast<unsigned char>(c)); };
        while (true) {
            while (i < line.size() && sep(line[i])) ++i;
            if (i == line.size()) break;
            if (n == 4) throw ParseError("ground truth: more than four values", line_no);
            const auto [ptr, ec] = std::from_chars(line.data() + i, line.data() + line.size(), v[n]);
            if (ec != std::errc{} || (ptr != line.data() + line.size() && !sep(*ptr)) || !std::isfinite(v[n])) {
                throw ParseError("ground truth: malformed number", line_no);
            }
            i = static_cast<std::size_t>(ptr - line.data());
            ++n;
        }
        if (n == 0) {
            if (end == text.size()) break;
            continue;
        }
        if (n != 4) throw ParseError("ground truth: expected x,y,w,h", line_no);
        BoundingBox b{static_cast<int>(std::lround(v[0])) - 1, static_cast<int>(std::lround(v[1])) - 1,
                      static_cast<int>(std::lround(v[2])), static_cast<int>(std::lround(v[3]))};
        if (b.w < 1 || b.h < 1) throw ParseError("ground truth: non-positive box size", line_no);
        boxes.push_back(b);
        if (end == text.size()) break;
    }
    return boxes;
}

namespace {

std::string read_text(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

bool is_frame_file(const fs::path& p) {
    std::string ext = p.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    return ext == ".pgm" || ext == ".png";
}

// Numeric stems compare by value so unpadded numbering still sorts in order.
bool frame_order(const fs::path& a, const fs::path& b) {
    const std::string sa = a.stem().string(), sb = b.stem().string();
    auto digits = [](const std::string& s) {
        std::size_t i = s.size();
        while (i > 0 && std::isdigit(static_cast<unsigned char>(s[i - 1]))) --i;
        return i;
    };
    const std::size_t da = digits(sa), db = digits(sb);
    if (da < sa.size() && db < sb.size() && sa.substr(0, da) == sb.substr(0, db)) {
        const std::string na = sa.substr(da), nb = sb.substr(db);
        const std::string pa = std::string(std::max(na.size(), nb.size()) - na.size(), '0') + na;
        const std::string pb = std::string(std::max(na.size(), nb.size()) - nb.size(), '0') + nb;
        if (pa != pb) return pa < pb;
    }
    return a.filename() < b.filename();
}

}  // namespace

std::vector<BoundingBox> load_groundtruth(const fs::path& path) {
    try {
        return parse_groundtruth(read_text(path));
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

void save_groundtruth(const std::vector<BoundingBox>& boxes, const fs::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    for (const BoundingBox& b : boxes) out << (b.x + 1) << ',' << (b.y + 1) << ',' << b.w << ',' << b.h << '\n';
}

Sequence load_frames(const fs::path& path) {
    Sequence seq;
    std::error_code ec;
    if (fs::is_directory(path, ec)) {
        seq.name = path.filename().empty() ? path.parent_path().filename().string() : path.filename().string();
        fs::path frames_dir = path;
        if (fs::is_directory(path / "img", ec)) frames_dir = path / "img";
        for (const auto& entry : fs::directory_iterator(frames_dir)) {
            if (entry.is_regular_file() && is_frame_file(entry.path())) seq.frame_paths.push_back(entry.path());
        }
        std::sort(seq.frame_paths.begin(), seq.frame_paths.end(), frame_order);
        if (seq.frame_paths.empty()) throw IoError("no .pgm or .png frames in " + frames_dir.string());
    } else if (fs::is_regular_file(path, ec)) {
        seq.name = path.stem().string();
        std::istringstream in(read_text(path));
        std::string line;
        while (std::getline(in, line)) {
            while (!line.empty() && std::isspace(static_cast<unsigned char>(line.back()))) line.pop_back();
            std::size_t s = 0;
            while (s < line.size() && std::isspace(static_cast<unsigned char>(line[s]))) ++s;
            if (s == line.size() || line[s] == '#') continue;
            fs::path p = line.substr(s);
            if (p.is_relative()) p = path.parent_path() / p;
            seq.frame_paths.push_back(p);
        }
        if (seq.frame_paths.empty()) throw ParseError(path.string() + ": index lists no frames");
    } else {
        throw IoError("no such sequence: " + path.string());
    }
    return seq;
}

Sequence load_sequence(const fs::path& path, const std::optional<fs::path>& groundtruth) {
    Sequence seq = load_frames(path);
    std::error_code ec;
    fs::path gt;
    if (groundtruth) {
        gt = *groundtruth;
    } else {
        const fs::path dir = fs::is_directory(path, ec) ? path : path.parent_path();
        for (const char* name : {"groundtruth.txt", "groundtruth_rect.txt"}) {
            if (fs::is_regular_file(dir / name, ec)) {
                gt = dir / name;
                break;
            }
        }
        if (gt.empty()) throw IoError("no groundtruth.txt or groundtruth_rect.txt next to " + path.string());
    }
    seq.groundtruth = load_groundtruth(gt);
    seq.validate();
    return seq;
}

void save_sequence(const Sequence& seq, const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
    for (std::size_t i = 0; i < seq.size(); ++i) save_pgm(seq.frame(i), dir / fmt::format("frame_{:04d}.pgm", i + 1));
    save_groundtruth(seq.groundtruth, dir / "groundtruth.txt");
}

}  // namespace dnbs
