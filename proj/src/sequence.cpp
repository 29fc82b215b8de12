#include "dnbs/sequence.hpp"

#include "dnbs/errors.hpp"
#include "dnbs/image_io.hpp"

#include <string>

namespace dnbs {

Image Sequence::frame(std::size_t i) const {
    if (i >= size()) throw InvalidArgument("frame index out of range");
    return frames.empty() ? load_image(frame_paths[i]) : frames[i];
}

void Sequence::validate() const {
    if (size() == 0) throw InvalidArgument("sequence '" + name + "' has no frames");
    if (groundtruth.size() != size()) {
        throw InvalidArgument("sequence '" + name + "': " + std::to_string(size()) + " frames but " +
                              std::to_string(groundtruth.size()) + " ground-truth boxes");
    }
    const BoundingBox& b = groundtruth.front();
    if (b.w < 1 || b.h < 1) throw InvalidArgument("sequence '" + name + "': first ground-truth box is empty");
}

}  // namespace dnbs
