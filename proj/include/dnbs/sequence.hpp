#pragma once

#include "dnbs/haar.hpp"
#include "dnbs/tracker.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace dnbs {

/// Frames either held in memory or read from disk on demand, plus one
/// ground-truth box per frame (0-based internally).
struct Sequence {
    std::string name;
    std::vector<Image> frames;
    std::vector<std::filesystem::path> frame_paths;
    std::vector<BoundingBox> groundtruth;

    std::size_t size() const noexcept { return frames.empty() ? frame_paths.size() : frames.size(); }
    Image frame(std::size_t i) const;

    /// Throws InvalidArgument when the frame and ground-truth counts differ or
    /// the first box is unusable.
    void validate() const;
};

}  // namespace dnbs
