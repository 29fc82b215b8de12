#pragma once

// Scoring of tracks against ground truth and the one-pass, temporal and
// spatial robustness protocols.

#include "dnbs/sequence.hpp"
#include "dnbs/tracker.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace dnbs {

/// Share of frames with iou strictly above threshold.
double success_fraction(const std::vector<BoundingBox>& tracked, const std::vector<BoundingBox>& truth,
                        double threshold = 0.35);

/// Overlap thresholds 0, 0.05, ..., 1 and distance thresholds 0, 1, ..., 50 px.
std::vector<double> overlap_thresholds();
std::vector<double> distance_thresholds();

enum class Protocol { ope, tre, sre };
std::string_view protocol_name(Protocol p) noexcept;
Protocol parse_protocol(std::string_view name);

struct FrameScore {
    int frame = 0;  // 0-based index into the sequence
    BoundingBox box;
    double iou = 0.0;
    double center_error = 0.0;
};

struct RunRecord {
    std::string label;  // "ope", "segment 3", "shift N", ...
    int start_frame = 0;
    BoundingBox init;
    std::vector<FrameScore> frames;
    double success = 0.0;  // at the report threshold
    double mean_center_error = 0.0;
    std::vector<double> success_curve;    // per overlap_thresholds()
    std::vector<double> precision_curve;  // per distance_thresholds()
    double seconds = 0.0;                 // wall time, excluded from equality
};

struct EvalReport {
    std::string sequence;
    Protocol protocol = Protocol::ope;
    double threshold = 0.35;
    std::vector<RunRecord> runs;
    // Means over runs.
    double success = 0.0;
    double mean_center_error = 0.0;
    std::vector<double> success_curve;
    std::vector<double> precision_curve;
    double fps = 0.0;
    std::vector<std::string> warnings;
};

/// Scores and curves equal, timing ignored.
bool same_scores(const RunRecord& a, const RunRecord& b);
bool same_scores(const EvalReport& a, const EvalReport& b);

/// Tracks frames [start, end) from `init`; the first entry is `init` itself.
std::vector<BoundingBox> run_track(const Sequence& seq, std::size_t start, const BoundingBox& init,
                                   const TrackerConfig& cfg, const TrackerResources& res);

RunRecord score_run(const Sequence& seq, std::size_t start, const BoundingBox& init,
                    const std::vector<BoundingBox>& tracked, double threshold);

EvalReport run_ope(const Sequence& seq, const TrackerConfig& cfg, double threshold = 0.35);

/// Segment i starts at floor(i * N / n). Sequences shorter than n frames use
/// N segments and record a warning.
EvalReport run_tre(const Sequence& seq, const TrackerConfig& cfg, int n_segments = 20, double threshold = 0.35);

/// Twelve shifted initializations: eight compass shifts of 10% of the box
/// size and four diagonal shifts of 5%, all scaled by `magnitude` and
/// rounded to whole pixels, then clamped to the frame.
EvalReport run_sre(const Sequence& seq, const TrackerConfig& cfg, double magnitude = 1.0, double threshold = 0.35);

struct SreShift {
    std::string label;
    double fx;  // fraction of the box width
    double fy;  // fraction of the box height
};
const std::vector<SreShift>& sre_shifts();

/// `<prefix>_frames.csv`, `<prefix>_success.csv`, `<prefix>_precision.csv`
/// and `<prefix>.json`. Box coordinates in the CSV are 1-based.
void write_report(const EvalReport& report, const std::filesystem::path& prefix);

/// Ground truth: one `x,y,w,h` line per frame, comma and/or whitespace
/// separated, 1-based. Blank lines are skipped.
std::vector<BoundingBox> parse_groundtruth(std::string_view text);
std::vector<BoundingBox> load_groundtruth(const std::filesystem::path& path);
void save_groundtruth(const std::vector<BoundingBox>& boxes, const std::filesystem::path& path);

/// Frames only: a directory of numbered .pgm/.png files (directly or under
/// img/) or an index file listing frame paths. Ground truth is left empty.
Sequence load_frames(const std::filesystem::path& path);

/// A directory of numbered .pgm/.png frames (directly or under img/) with
/// groundtruth.txt or groundtruth_rect.txt, or an index file listing frame
/// paths one per line (relative to the index file). An explicit ground-truth
/// path overrides the lookup.
Sequence load_sequence(const std::filesystem::path& path,
                       const std::optional<std::filesystem::path>& groundtruth = std::nullopt);

/// Writes frames as frame_0001.pgm, ... plus groundtruth.txt.
void save_sequence(const Sequence& seq, const std::filesystem::path& dir);

}  // namespace dnbs
