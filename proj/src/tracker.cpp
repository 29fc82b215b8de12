#include "dnbs/tracker.hpp"

#include "dnbs/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace dnbs {

BoundingBox clamp_to_frame(BoundingBox b, int frame_w, int frame_h) {
    if (b.w > frame_w || b.h > frame_h || b.w < 1 || b.h < 1) {
        throw InvalidArgument("box of size " + std::to_string(b.w) + "x" + std::to_string(b.h) +
                              " does not fit a " + std::to_string(frame_w) + "x" + std::to_string(frame_h) +
                              " frame");
    }
    b.x = std::clamp(b.x, 0, frame_w - b.w);
    b.y = std::clamp(b.y, 0, frame_h - b.h);
    return b;
}

double iou(const BoundingBox& a, const BoundingBox& b) {
    const int iw = std::min(a.x + a.w, b.x + b.w) - std::max(a.x, b.x);
    const int ih = std::min(a.y + a.h, b.y + b.h) - std::max(a.y, b.y);
    if (iw <= 0 || ih <= 0) return 0.0;
    const double inter = static_cast<double>(iw) * ih;
    const double uni = static_cast<double>(a.w) * a.h + static_cast<double>(b.w) * b.h - inter;
    return inter / uni;
}

double center_error(const BoundingBox& a, const BoundingBox& b) {
    return std::hypot(a.cx() - b.cx(), a.cy() - b.cy());
}

void TrackerConfig::validate() const {
    if (N_u < 1) throw InvalidArgument("N_u must be >= 1");
    if (!(gamma_update >= 0.0 && gamma_update <= 1.0)) throw InvalidArgument("gamma_update must lie in [0, 1]");
    if (search_radius < 0) throw InvalidArgument("search_radius must be >= 0");
    if (N_f < 1) throw InvalidArgument("N_f must be >= 1");
    if (N_b < 0) throw InvalidArgument("N_b must be >= 0");
    if (!(background_factor >= 1.0)) throw InvalidArgument("background_factor must be >= 1");
    if (!(background_iou >= 0.0 && background_iou <= 1.0)) throw InvalidArgument("background_iou must lie in [0, 1]");
    if (!(nms_radius >= 0.0)) throw InvalidArgument("nms_radius must be >= 0");
    dnbs().validate();
    if (solver == Solver::hierarchical) hier().validate();
}

DnbsConfig TrackerConfig::dnbs() const {
    DnbsConfig c;
    c.K = K;
    c.lambda = lambda;
    c.dependence_tol = dependence_tol;
    c.tie_tol = tie_tol;
    return c;
}

HierConfig TrackerConfig::hier() const {
    HierConfig h;
    h.ratio = ratio;
    h.mu = mu;
    h.expand_full_near_set = expand_full_near_set;
    return h;
}

TrackerResources make_resources(int template_w, int template_h, const TrackerConfig& cfg) {
    TrackerResources res;
    auto dict = std::make_shared<const Dictionary>(template_w, template_h);
    if (cfg.solver == Solver::hierarchical) {
        res.clusters = std::make_shared<const ClusterIndex>(cluster_dictionary(*dict, cfg.mu, cfg.seed));
    }
    res.dictionary = std::move(dict);
    return res;
}

SelectionResult train_subspace(const SampleSet& samples, const TrackerConfig& cfg, const TrackerResources& res) {
    const DnbsConfig dc = cfg.dnbs();
    switch (cfg.solver) {
    case Solver::direct: return select_direct(samples, dc, *res.dictionary);
    case Solver::iterative: return select_iterative(samples, dc, *res.dictionary);
    case Solver::hierarchical:
        if (!res.clusters) throw InvalidArgument("hierarchical solver needs a cluster index");
        return select_hierarchical(samples, dc, cfg.hier(), *res.clusters, *res.dictionary);
    }
    throw InvalidArgument("unknown solver");
}

namespace {

Image crop(const Image& frame, const BoundingBox& b) { return frame.crop(b.x, b.y, b.w, b.h); }

void build_terms(TrackerState& s, int frame_w) {
    const std::ptrdiff_t stride = frame_w + 1;
    s.terms.clear();
    const auto& bases = s.subspace.bases();
    for (std::size_t i = 0; i < bases.size(); ++i) {
        const HaarBox& b = bases[i];
        kernels::SsdTerm t;
        t.br = b.v1() * stride + b.u1();
        t.bl = b.v1() * stride + (b.u0 - 1);
        t.tr = (b.v0 - 1) * stride + b.u1();
        t.tl = (b.v0 - 1) * stride + (b.u0 - 1);
        t.weight = s.coefficients[i] / std::sqrt(static_cast<double>(b.area()));
        s.terms.push_back(t);
    }
    s.terms_stride = frame_w + 1;
}

void retrain(TrackerState& s, const std::vector<BoundingBox>& negatives, const Image& frame) {
    SampleSet samples;
    samples.foregrounds.assign(s.recent.begin(), s.recent.end());
    for (const BoundingBox& b : negatives) samples.backgrounds.push_back(crop(frame, b));
    SelectionResult r = train_subspace(samples, s.config, s.resources);
    s.last_status = r.status;
    s.subspace = std::move(r.subspace);
    s.last_negatives = negatives;
    refresh_coefficients(s);
}

}  // namespace

void refresh_coefficients(TrackerState& s) {
    s.coefficients = s.subspace.coefficients(s.f_ref);
    s.xhat_sq_norm = squared_norm(reference_reconstruction(s));
    s.terms_stride = 0;  // rebuilt lazily for the frame width
}

Image reference_reconstruction(const TrackerState& s) {
    return synthesize(s.subspace.bases(), s.coefficients, s.subspace.width(), s.subspace.height());
}

TrackerState init(const Image& frame, const BoundingBox& bbox, const TrackerConfig& cfg) {
    cfg.validate();
    if (!bbox.inside(frame.width(), frame.height())) throw InvalidArgument("initial box leaves the frame");
    return init(frame, bbox, cfg, make_resources(bbox.w, bbox.h, cfg));
}

TrackerState init(const Image& frame, const BoundingBox& bbox, const TrackerConfig& cfg, TrackerResources res) {
    cfg.validate();
    if (!bbox.inside(frame.width(), frame.height())) throw InvalidArgument("initial box leaves the frame");
    if (!res.dictionary || res.dictionary->width() != bbox.w || res.dictionary->height() != bbox.h) {
        throw InvalidArgument("resources were built for a different template size");
    }
    TrackerState s;
    s.config = cfg;
    s.resources = std::move(res);
    s.bbox = s.previous = bbox;
    s.f_ref = crop(frame, bbox);
    s.anchor = s.f_ref;
    s.recent.assign(static_cast<std::size_t>(cfg.N_f), s.f_ref);

    // Plain NBS first: negatives are mined with it, then the discriminative
    // subspace is trained against them.
    TrackerConfig nbs = cfg;
    nbs.lambda = 0.0;
    SampleSet first;
    first.foregrounds.assign(s.recent.begin(), s.recent.end());
    SelectionResult r = train_subspace(first, nbs, s.resources);
    s.last_status = r.status;
    s.subspace = std::move(r.subspace);
    refresh_coefficients(s);
    if (cfg.lambda > 0.0 && cfg.N_b > 0) retrain(s, sample_background(s, frame), frame);
    return s;
}

SsdMap ssd_map(TrackerState& s, const Image& frame, int x_lo, int x_hi, int y_lo, int y_hi) {
    const int tw = s.template_w(), th = s.template_h();
    if (x_lo < 0 || y_lo < 0 || x_hi < x_lo || y_hi < y_lo || x_hi + tw > frame.width() ||
        y_hi + th > frame.height()) {
        throw InvalidArgument("SSD window leaves the frame");
    }
    if (s.terms_stride != frame.width() + 1) build_terms(s, frame.width());
    const IntegralImage ii(frame);
    const IntegralImage sq = IntegralImage::of_squares(frame);
    const std::ptrdiff_t stride = ii.stride();

    SsdMap map;
    map.x0 = x_lo;
    map.y0 = y_lo;
    map.cols = x_hi - x_lo + 1;
    map.rows = y_hi - y_lo + 1;
    map.values.resize(static_cast<std::size_t>(map.cols) * map.rows);
    const auto& kern = kernels::active();
    for (int r = 0; r < map.rows; ++r) {
        const std::ptrdiff_t base = static_cast<std::ptrdiff_t>(y_lo + r) * stride + x_lo;
        kernels::SsdRowArgs args{};
        args.table = ii.data() + base;
        args.sq_table = sq.data() + base;
        args.terms = s.terms.data();
        args.term_count = s.terms.size();
        args.sq_br = th * stride + tw;
        args.sq_bl = th * stride;
        args.sq_tr = tw;
        args.sq_tl = 0;
        args.xhat_sq_norm = s.xhat_sq_norm;
        args.count = static_cast<std::size_t>(map.cols);
        args.out = map.values.data() + static_cast<std::size_t>(r) * map.cols;
        kern.ssd_row(args);
    }
    return map;
}

LocateResult locate(TrackerState& s, const Image& frame) {
    BoundingBox predicted = s.bbox;
    if (s.config.motion == MotionModel::constant_velocity) {
        predicted.x += s.bbox.x - s.previous.x;
        predicted.y += s.bbox.y - s.previous.y;
    }
    predicted = clamp_to_frame(predicted, frame.width(), frame.height());
    const int rad = s.config.search_radius;
    const int x_lo = std::max(0, predicted.x - rad), x_hi = std::min(frame.width() - predicted.w, predicted.x + rad);
    const int y_lo = std::max(0, predicted.y - rad), y_hi = std::min(frame.height() - predicted.h, predicted.y + rad);

    LocateResult out;
    out.map = ssd_map(s, frame, x_lo, x_hi, y_lo, y_hi);
    std::size_t best = 0;
    for (std::size_t i = 1; i < out.map.values.size(); ++i) {
        if (out.map.values[i] < out.map.values[best]) best = i;
    }
    out.ssd_min = out.map.values[best];
    out.bbox = predicted;
    out.bbox.x = x_lo + static_cast<int>(best % static_cast<std::size_t>(out.map.cols));
    out.bbox.y = y_lo + static_cast<int>(best / static_cast<std::size_t>(out.map.cols));
    return out;
}

void update_template(TrackerState& s, const Image& matched) {
    require_same_shape(s.anchor, matched, "template update");
    const double g = s.config.gamma_update;
    Image next(matched.width(), matched.height());
    for (std::size_t i = 0; i < next.size(); ++i) {
        next.pixels()[i] = g * s.anchor.pixels()[i] + (1.0 - g) * matched.pixels()[i];
    }
    s.f_ref = next;
    s.anchor = std::move(next);
}

std::vector<BoundingBox> sample_background(TrackerState& s, const Image& frame) {
    const BoundingBox& obj = s.bbox;
    const int ext = static_cast<int>(std::lround(s.config.background_factor * s.config.search_radius));
    const int x_lo = std::max(0, obj.x - ext), x_hi = std::min(frame.width() - obj.w, obj.x + ext);
    const int y_lo = std::max(0, obj.y - ext), y_hi = std::min(frame.height() - obj.h, obj.y + ext);
    const SsdMap map = ssd_map(s, frame, x_lo, x_hi, y_lo, y_hi);

    struct Candidate {
        double ssd;
        std::size_t index;
    };
    std::vector<Candidate> minima;
    for (int r = 0; r < map.rows; ++r) {
        for (int c = 0; c < map.cols; ++c) {
            const double v = map.at(c, r);
            bool is_min = true;
            for (int dr = -1; dr <= 1 && is_min; ++dr) {
                for (int dc = -1; dc <= 1; ++dc) {
                    const int rr = r + dr, cc = c + dc;
                    if ((dr == 0 && dc == 0) || rr < 0 || cc < 0 || rr >= map.rows || cc >= map.cols) continue;
                    if (map.at(cc, rr) < v) {
                        is_min = false;
                        break;
                    }
                }
            }
            if (is_min) minima.push_back({v, static_cast<std::size_t>(r) * map.cols + c});
        }
    }
    std::sort(minima.begin(), minima.end(), [](const Candidate& a, const Candidate& b) {
        return a.ssd < b.ssd || (a.ssd == b.ssd && a.index < b.index);
    });

    const double radius = s.config.nms_radius > 0.0 ? s.config.nms_radius : 0.5 * std::hypot(obj.w, obj.h);
    std::vector<BoundingBox> kept;
    for (const Candidate& m : minima) {
        if (kept.size() >= static_cast<std::size_t>(s.config.N_b)) break;
        BoundingBox b = obj;
        b.x = map.x0 + static_cast<int>(m.index % static_cast<std::size_t>(map.cols));
        b.y = map.y0 + static_cast<int>(m.index / static_cast<std::size_t>(map.cols));
        if (iou(b, obj) > s.config.background_iou) continue;
        bool suppressed = false;
        for (const BoundingBox& k : kept) {
            if (std::hypot(b.x - k.x, b.y - k.y) <= radius) {
                suppressed = true;
                break;
            }
        }
        if (!suppressed) kept.push_back(b);
    }
    return kept;
}

TrackResult step(TrackerState& s, const Image& frame) {
    const LocateResult loc = locate(s, frame);
    s.previous = s.bbox;
    s.bbox = loc.bbox;
    s.t += 1;
    const Image matched = crop(frame, s.bbox);
    s.recent.push_back(matched);
    while (s.recent.size() > static_cast<std::size_t>(s.config.N_f)) s.recent.pop_front();

    TrackResult out;
    out.frame = s.t;
    out.bbox = s.bbox;
    out.ssd_min = loc.ssd_min;
    if (s.t % s.config.N_u == 0) {
        update_template(s, matched);
        // Mine with the updated reference on the current subspace, then retrain.
        refresh_coefficients(s);
        std::vector<BoundingBox> negatives;
        if (s.config.lambda > 0.0 && s.config.N_b > 0) negatives = sample_background(s, frame);
        retrain(s, negatives, frame);
        out.refreshed = true;
    }
    out.status = s.last_status;
    return out;
}

}  // namespace dnbs
