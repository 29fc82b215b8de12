#pragma once

// SSD template tracker on a DNBS-reconstructed reference. Matching cost for a
// candidate patch y is ||x_hat||^2 + ||y||^2 - 2 sum_i c_i <phi_i, y>, where
// x_hat = R(f_ref) = sum_i c_i phi_i; every term is a box lookup.

#include "dnbs/cluster.hpp"
#include "dnbs/doomp.hpp"
#include "dnbs/haar.hpp"
#include "dnbs/kernels.hpp"
#include "dnbs/subspace.hpp"

#include <cstdint>
#include <deque>
#include <memory>
#include <vector>

namespace dnbs {

/// 0-based top-left pixel and size, frame coordinates.
struct BoundingBox {
    int x = 0;
    int y = 0;
    int w = 0;
    int h = 0;

    bool inside(int frame_w, int frame_h) const noexcept {
        return w > 0 && h > 0 && x >= 0 && y >= 0 && x + w <= frame_w && y + h <= frame_h;
    }
    double cx() const noexcept { return x + w / 2.0; }
    double cy() const noexcept { return y + h / 2.0; }

    friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

/// Shifts the box (size unchanged) so it lies inside the frame.
BoundingBox clamp_to_frame(BoundingBox b, int frame_w, int frame_h);

double iou(const BoundingBox& a, const BoundingBox& b);
double center_error(const BoundingBox& a, const BoundingBox& b);

enum class MotionModel { static_position, constant_velocity };

struct TrackerConfig {
    int N_u = 5;
    double gamma_update = 0.5;
    int search_radius = 15;
    int N_f = 3;
    int N_b = 3;
    double lambda = 0.25;
    int K = 30;
    double mu = 0.7;
    double ratio = 0.5;
    Solver solver = Solver::iterative;
    bool expand_full_near_set = false;
    double dependence_tol = 1e-6;
    double tie_tol = 1e-9;
    /// Background mining scans top-left offsets within background_factor * search_radius.
    double background_factor = 3.0;
    /// Mined candidates overlapping the object by more than this IOU are dropped.
    double background_iou = 0.3;
    /// Non-maximum suppression radius in pixels; 0 means half the template diagonal.
    double nms_radius = 0.0;
    MotionModel motion = MotionModel::static_position;
    std::uint64_t seed = 0;

    void validate() const;
    DnbsConfig dnbs() const;
    HierConfig hier() const;
};

/// Dictionary (and cluster index for the hierarchical solver) for one template
/// size; shared between trackers of the same size.
struct TrackerResources {
    std::shared_ptr<const Dictionary> dictionary;
    std::shared_ptr<const ClusterIndex> clusters;  // null unless the solver is hierarchical
};

TrackerResources make_resources(int template_w, int template_h, const TrackerConfig& cfg);

/// Trains the subspace with the configured solver.
SelectionResult train_subspace(const SampleSet& samples, const TrackerConfig& cfg, const TrackerResources& res);

struct SsdMap {
    int x0 = 0;  // top-left of the first candidate
    int y0 = 0;
    int cols = 0;
    int rows = 0;
    std::vector<double> values;  // row-major

    double at(int col, int row) const { return values[static_cast<std::size_t>(row) * cols + col]; }
};

struct LocateResult {
    BoundingBox bbox;
    double ssd_min = 0.0;
    SsdMap map;
};

struct TrackResult {
    int frame = 0;
    BoundingBox bbox;
    double ssd_min = 0.0;
    bool refreshed = false;
    SelectionStatus status = SelectionStatus::complete;
};

struct TrackerState {
    TrackerConfig config;
    TrackerResources resources;
    Image f_ref;
    Image anchor;  // reference fixed at the last update frame
    std::deque<Image> recent;  // last N_f matched templates
    Subspace subspace{1, 1};
    std::vector<double> coefficients;
    double xhat_sq_norm = 0.0;
    std::vector<kernels::SsdTerm> terms;  // offsets for a stride of frame_w + 1
    int terms_stride = 0;
    BoundingBox bbox;
    BoundingBox previous;
    int t = 0;
    SelectionStatus last_status = SelectionStatus::complete;
    std::vector<BoundingBox> last_negatives;

    int template_w() const noexcept { return bbox.w; }
    int template_h() const noexcept { return bbox.h; }
};

TrackerState init(const Image& frame, const BoundingBox& bbox, const TrackerConfig& cfg);
TrackerState init(const Image& frame, const BoundingBox& bbox, const TrackerConfig& cfg, TrackerResources res);

/// SSD over every top-left in [x_lo, x_hi] x [y_lo, y_hi] (inclusive, already inside the frame).
SsdMap ssd_map(TrackerState& state, const Image& frame, int x_lo, int x_hi, int y_lo, int y_hi);

/// x_hat = R(f_ref) as an image, built from the coefficients.
Image reference_reconstruction(const TrackerState& state);

/// Best match in the search window around the predicted position. Ties go to
/// the smallest row-major index.
LocateResult locate(TrackerState& state, const Image& frame);

/// f_ref <- gamma * anchor + (1 - gamma) * matched; the result becomes the new anchor.
void update_template(TrackerState& state, const Image& matched);

/// Negative templates from local SSD minima around the object.
std::vector<BoundingBox> sample_background(TrackerState& state, const Image& frame);

TrackResult step(TrackerState& state, const Image& frame);

/// Recomputes the coefficients of f_ref on the current subspace and the SSD terms.
void refresh_coefficients(TrackerState& state);

}  // namespace dnbs
