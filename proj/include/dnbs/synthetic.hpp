#pragma once

// Procedural test sequences: a textured patch moving over a textured
// background, optionally with pixel noise or a look-alike distractor.

#include "dnbs/sequence.hpp"
#include "dnbs/subspace.hpp"

#include <cstdint>
#include <random>

namespace dnbs {

struct SynthOptions {
    int frames = 80;
    int width = 128;
    int height = 96;
    int object_w = 20;
    int object_h = 20;
    int max_step = 3;  // per-axis displacement per frame
    double noise_sigma = 0.0;
    std::uint64_t seed = 1;
    /// Basis budget of the greedy reconstruction the decoy is cut from.
    int decoy_K = 30;
};

/// Sum of random Gaussian blobs around mid-gray plus fine uniform grain.
Image random_texture(std::mt19937_64& rng, int width, int height, int blobs, double amplitude, double grain);

/// Object pasted on a static background, random-walk translation.
Sequence make_translation_sequence(const SynthOptions& opt);

/// Object wandering next to a stationary distractor: a truncated box-feature
/// reconstruction of the object itself. The truncation depth is the shortest
/// one whose SSD against the full decoy_K-term reconstruction stays below the
/// object's own reconstruction error, so a tracker matching that purely
/// reconstructive template prefers the distractor.
Sequence make_decoy_sequence(const SynthOptions& opt);

/// The decoy patch and its truncation depth for a given object template.
struct Decoy {
    Image patch;
    int depth = 0;
};
Decoy make_decoy(const Image& object, int K);

/// Training samples for solver benchmarks: n_f noisy views of one textured
/// object and n_b unrelated background textures.
SampleSet make_sample_set(int width, int height, int n_f, int n_b, std::uint64_t seed);

}  // namespace dnbs
