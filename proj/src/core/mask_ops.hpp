#pragma once

#include <vector>

#include "boxes.hpp"
#include "gmm.hpp"

namespace fade {

// Connected foreground region.
struct Blob {
    Box box;
    int area = 0;          // foreground pixel count
    double cx = 0.0;       // centroid, subpixel
    double cy = 0.0;
    int frame_index = 0;
    double score = 0.0;    // filled by the pipeline scoring stage
};

// Erosion then dilation with a square structuring element of side 2*radius+1.
// radius 0 is the identity.
ForegroundMask morph_open(const ForegroundMask& m, int radius);

// 8-connectivity two-pass union-find labeling. Blobs with area < min_area are
// dropped; output ordered by (ymin, xmin).
std::vector<Blob> connected_components(const ForegroundMask& m, int min_area);

}  // namespace fade
