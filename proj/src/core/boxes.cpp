#include "boxes.hpp"

#include <algorithm>
#include <cmath>

#include "errors.hpp"

namespace fade {

double iou(const Box& a, const Box& b) {
    const double ix = std::max(0.0, std::min(a.xmax, b.xmax) - std::max(a.xmin, b.xmin));
    const double iy = std::max(0.0, std::min(a.ymax, b.ymax) - std::max(a.ymin, b.ymin));
    const double inter = ix * iy;
    const double uni = a.area() + b.area() - inter;
    return uni > 0 ? inter / uni : 0.0;
}

BoxDelta encode_delta(const Box& anchor, const Box& target) {
    if (anchor.width() <= 0 || anchor.height() <= 0)
        throw ConfigError("encode_delta: anchor must have positive size");
    if (target.width() <= 0 || target.height() <= 0)
        throw ConfigError("encode_delta: target must have positive size");
    BoxDelta d;
    d.dx = (target.cx() - anchor.cx()) / anchor.width();
    d.dy = (target.cy() - anchor.cy()) / anchor.height();
    d.dw = std::log(target.width() / anchor.width());
    d.dh = std::log(target.height() / anchor.height());
    return d;
}

Box decode_delta(const BoxDelta& d, const Box& anchor,
                 std::optional<std::pair<double, double>> clip_wh) {
    const double cx = anchor.cx() + d.dx * anchor.width();
    const double cy = anchor.cy() + d.dy * anchor.height();
    const double w = anchor.width() * std::exp(d.dw);
    const double h = anchor.height() * std::exp(d.dh);
    Box b{cx - 0.5 * w, cy - 0.5 * h, cx + 0.5 * w, cy + 0.5 * h};
    if (clip_wh) {
        b.xmin = std::clamp(b.xmin, 0.0, clip_wh->first);
        b.xmax = std::clamp(b.xmax, 0.0, clip_wh->first);
        b.ymin = std::clamp(b.ymin, 0.0, clip_wh->second);
        b.ymax = std::clamp(b.ymax, 0.0, clip_wh->second);
    }
    return b;
}

std::vector<Detection> nms(std::vector<Detection> dets, double iou_thr) {
    std::stable_sort(dets.begin(), dets.end(), [](const Detection& a, const Detection& b) {
        if (a.score != b.score) return a.score > b.score;
        if (a.box.xmin != b.box.xmin) return a.box.xmin < b.box.xmin;
        return a.box.ymin < b.box.ymin;
    });
    std::vector<Detection> kept;
    for (const auto& d : dets) {
        bool suppressed = false;
        for (const auto& k : kept) {
            if (iou(d.box, k.box) > iou_thr) {
                suppressed = true;
                break;
            }
        }
        if (!suppressed) kept.push_back(d);
    }
    return kept;
}

}  // namespace fade
