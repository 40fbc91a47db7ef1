#pragma once

#include <optional>
#include <string>
#include <vector>

namespace fade {

// Axis-aligned box in continuous pixel coordinates (no +1 convention).
struct Box {
    double xmin = 0, ymin = 0, xmax = 0, ymax = 0;

    double width() const { return xmax - xmin; }
    double height() const { return ymax - ymin; }
    double area() const { return width() * height(); }
    double cx() const { return 0.5 * (xmin + xmax); }
    double cy() const { return 0.5 * (ymin + ymax); }
    bool valid() const { return xmax >= xmin && ymax >= ymin; }
};

struct Detection {
    Box box;
    double score = 0.0;
    int frame_index = 0;
};

// Intersection over union; 0 when the union has zero area.
double iou(const Box& a, const Box& b);

struct BoxDelta {
    double dx = 0, dy = 0, dw = 0, dh = 0;
};

// Standard R-CNN box parameterization.
BoxDelta encode_delta(const Box& anchor, const Box& target);
Box decode_delta(const BoxDelta& d, const Box& anchor,
                 std::optional<std::pair<double, double>> clip_wh = std::nullopt);

// Greedy NMS by descending score; suppresses IoU > iou_thr against kept boxes.
// Ties broken by (score desc, xmin, ymin).
std::vector<Detection> nms(std::vector<Detection> dets, double iou_thr);

}  // namespace fade
