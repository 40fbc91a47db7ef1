#pragma once

#include <array>
#include <filesystem>
#include <vector>

#include "boxes.hpp"

namespace fade {

// Per-object IoU cutoff for positive assignment, growing with object area and
// floored at 0.20 (capped at 0.99). log_base <= 0 selects the natural log.
double dynamic_threshold(double w, double h, double alpha, double log_base = 0.0);

struct PyramidLevel {
    double stride = 0;
    double base_scale = 0;  // side of the square prior
};

// One square anchor per feature cell, centered at (i+0.5)*stride.
struct AnchorGrid {
    int level = 0;
    double stride = 0;
    double base_scale = 0;
    int cells_x = 0, cells_y = 0;
    std::vector<Box> anchors;  // row-major over cells
};

std::vector<AnchorGrid> generate_anchors(double frame_w, double frame_h,
                                         const std::vector<PyramidLevel>& levels);

inline constexpr int kLabelNegative = -1;
inline constexpr int kLabelIgnore = -2;

struct AssignmentResult {
    // Per anchor: gt index when positive, else kLabelNegative / kLabelIgnore.
    std::vector<int> labels;
    std::vector<double> gt_thresholds;  // threshold used per GT
};

// Area-based mining: per GT, anchors with IoU >= dynamic_threshold(gt) become
// positive for their argmax-IoU GT; a GT reached by no anchor gets its max-IoU
// anchor forced positive; a 0.05 band below the threshold is ignored.
AssignmentResult assign_positives(const std::vector<Box>& anchors,
                                  const std::vector<Box>& gts, double alpha,
                                  double log_base = 0.0);

// Feature-independent stage head: delta = A * phi(anchor) + b with
// phi = (cx/frame_w, cy/frame_h, log w, log h); score = clamp(s0*src + s1).
struct StageHead {
    std::array<double, 16> regress{};   // row-major 4x4
    std::array<double, 4> bias{};
    std::array<double, 2> score_w{1.0, 0.0};
};

struct RefinerHeads {
    std::vector<StageHead> stages;

    static RefinerHeads identity(int num_stages);
    static RefinerHeads load(const std::filesystem::path& json_path);
    void save(const std::filesystem::path& json_path) const;
};

// Iterative proposal refinement: each stage decodes per-anchor deltas and
// replaces the boxes; the final set goes through NMS and a top-k cut.
std::vector<Detection> propose(const std::vector<Box>& anchors,
                               const RefinerHeads& heads,
                               const std::vector<double>& scores, int stages,
                               double frame_w, double frame_h, double nms_thr,
                               int top_k);

}  // namespace fade
