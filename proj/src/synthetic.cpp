#include "dnbs/synthetic.hpp"

#include "dnbs/doomp.hpp"
#include "dnbs/errors.hpp"

#include <algorithm>
#include <cmath>

namespace dnbs {

Image random_texture(std::mt19937_64& rng, int width, int height, int blobs, double amplitude, double grain) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Image img(width, height, 128.0);
    for (int b = 0; b < blobs; ++b) {
        const double cx = unit(rng) * width, cy = unit(rng) * height;
        const double r = 1.5 + 0.25 * std::min(width, height) * unit(rng);
        const double a = amplitude * (unit(rng) - 0.5);
        for (int y = 0; y < height; ++y) {
            for (int x = 0; x < width; ++x) {
                const double d2 = ((x - cx) * (x - cx) + (y - cy) * (y - cy)) / (r * r);
                if (d2 < 16.0) img.at(x, y) += a * std::exp(-d2);
            }
        }
    }
    for (double& p : img.pixels()) p = std::clamp(p + grain * (unit(rng) - 0.5), 0.0, 255.0);
    return img;
}

namespace {

void paste(Image& frame, const Image& patch, int x, int y) {
    for (int r = 0; r < patch.height(); ++r) {
        for (int c = 0; c < patch.width(); ++c) frame.at(x + c, y + r) = patch.at(c, r);
    }
}

void add_noise(Image& frame, std::mt19937_64& rng, double sigma) {
    if (sigma <= 0.0) return;
    std::normal_distribution<double> n(0.0, sigma);
    for (double& p : frame.pixels()) p += n(rng);
}

void check(const SynthOptions& opt) {
    if (opt.frames < 1 || opt.object_w < 1 || opt.object_h < 1 || opt.object_w > opt.width ||
        opt.object_h > opt.height || opt.max_step < 0) {
        throw InvalidArgument("inconsistent synthetic sequence options");
    }
}

}  // namespace

Sequence make_translation_sequence(const SynthOptions& opt) {
    check(opt);
    std::mt19937_64 rng(opt.seed);
    const Image background = random_texture(rng, opt.width, opt.height, 60, 120.0, 40.0);
    const Image object = random_texture(rng, opt.object_w, opt.object_h, 8, 220.0, 60.0);
    std::uniform_int_distribution<int> stepd(-opt.max_step, opt.max_step);
    Sequence seq;
    seq.name = "translation";
    int x = (opt.width - opt.object_w) / 2, y = (opt.height - opt.object_h) / 2;
    for (int f = 0; f < opt.frames; ++f) {
        if (f > 0) {
            x = std::clamp(x + stepd(rng), 0, opt.width - opt.object_w);
            y = std::clamp(y + stepd(rng), 0, opt.height - opt.object_h);
        }
        Image frame = background;
        paste(frame, object, x, y);
        add_noise(frame, rng, opt.noise_sigma);
        seq.frames.push_back(std::move(frame));
        seq.groundtruth.push_back(BoundingBox{x, y, opt.object_w, opt.object_h});
    }
    return seq;
}

Decoy make_decoy(const Image& object, int K) {
    const Dictionary dict(object.width(), object.height());
    SampleSet samples;
    samples.foregrounds.push_back(object);
    DnbsConfig cfg;
    cfg.K = K;
    cfg.lambda = 0.0;
    const SelectionResult full = select_iterative(samples, cfg, dict);
    if (full.atoms.empty()) throw NumericDegeneracy("object template has no reconstructable energy");
    // Scores are the per-step drops in reconstruction error, so the tail sum
    // from depth m on is ||R_K(x) - R_m(x)||^2.
    const double residual = squared_norm(full.subspace.residual(object));
    int m = static_cast<int>(full.atoms.size());
    double tail = 0.0;
    while (m > 1 && tail + full.scores[m - 1] < residual) tail += full.scores[--m];
    Subspace cut(object.width(), object.height());
    for (int k = 0; k < m; ++k) cut.append(full.subspace.bases()[k]);
    return Decoy{cut.reconstruct(object), m};
}

SampleSet make_sample_set(int width, int height, int n_f, int n_b, std::uint64_t seed) {
    if (n_f < 1 || n_b < 0) throw InvalidArgument("need n_f >= 1 and n_b >= 0");
    std::mt19937_64 rng(seed);
    const Image object = random_texture(rng, width, height, 8, 220.0, 60.0);
    SampleSet s;
    for (int i = 0; i < n_f; ++i) {
        Image f = object;
        add_noise(f, rng, 4.0);
        s.foregrounds.push_back(std::move(f));
    }
    for (int i = 0; i < n_b; ++i) s.backgrounds.push_back(random_texture(rng, width, height, 10, 160.0, 40.0));
    return s;
}

Sequence make_decoy_sequence(const SynthOptions& opt) {
    check(opt);
    const int x0 = opt.width / 2 - opt.object_w, y0 = (opt.height - opt.object_h) / 2;
    const int dx = opt.object_w + 1;
    if (x0 - 4 < 0 || x0 + dx + opt.object_w > opt.width || y0 - 4 < 0 || y0 + 4 + opt.object_h > opt.height) {
        throw InvalidArgument("frame too small for the decoy layout");
    }
    std::mt19937_64 rng(opt.seed);
    const Image background = random_texture(rng, opt.width, opt.height, 60, 120.0, 40.0);
    const Image object = random_texture(rng, opt.object_w, opt.object_h, 8, 220.0, 60.0);
    const Decoy decoy = make_decoy(object, opt.decoy_K);
    // Unit steps inside a 5x9 pen that never overlaps the decoy.
    std::uniform_int_distribution<int> stepd(-1, 1);
    Sequence seq;
    seq.name = "decoy";
    int x = x0, y = y0;
    for (int f = 0; f < opt.frames; ++f) {
        if (f > 0) {
            x = std::clamp(x + stepd(rng), x0 - 4, x0);
            y = std::clamp(y + stepd(rng), y0 - 4, y0 + 4);
        }
        Image frame = background;
        paste(frame, decoy.patch, x0 + dx, y0);
        paste(frame, object, x, y);
        add_noise(frame, rng, opt.noise_sigma);
        seq.frames.push_back(std::move(frame));
        seq.groundtruth.push_back(BoundingBox{x, y, opt.object_w, opt.object_h});
    }
    return seq;
}

}  // namespace dnbs
