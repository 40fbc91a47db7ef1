#include "smrpn.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

#include "errors.hpp"

namespace fade {

double dynamic_threshold(double w, double h, double alpha, double log_base) {
    if (w <= 0 || h <= 0) throw ConfigError("dynamic_threshold: non-positive size");
    if (alpha <= 0) throw ConfigError("dynamic_threshold: alpha must be positive");
    double lg = std::log(std::sqrt(w * h) / 5.0);
    if (log_base > 0) lg /= std::log(log_base);
    const double t = 0.15 + alpha * lg;
    return std::clamp(t, 0.20, 0.99);
}

std::vector<AnchorGrid> generate_anchors(double frame_w, double frame_h,
                                         const std::vector<PyramidLevel>& levels) {
    if (levels.empty()) throw ConfigError("generate_anchors: empty level list");
    std::vector<AnchorGrid> grids;
    int level = 0;
    for (const auto& lv : levels) {
        if (lv.stride <= 0 || lv.base_scale <= 0)
            throw ConfigError("generate_anchors: stride and scale must be positive");
        AnchorGrid g;
        g.level = level++;
        g.stride = lv.stride;
        g.base_scale = lv.base_scale;
        g.cells_x = static_cast<int>(std::ceil(frame_w / lv.stride));
        g.cells_y = static_cast<int>(std::ceil(frame_h / lv.stride));
        g.anchors.reserve(static_cast<std::size_t>(g.cells_x) * g.cells_y);
        const double half = 0.5 * lv.base_scale;
        for (int iy = 0; iy < g.cells_y; ++iy) {
            const double cy = (iy + 0.5) * lv.stride;
            for (int ix = 0; ix < g.cells_x; ++ix) {
                const double cx = (ix + 0.5) * lv.stride;
                g.anchors.push_back(Box{cx - half, cy - half, cx + half, cy + half});
            }
        }
        grids.push_back(std::move(g));
    }
    return grids;
}

AssignmentResult assign_positives(const std::vector<Box>& anchors,
                                  const std::vector<Box>& gts, double alpha,
                                  double log_base) {
    AssignmentResult res;
    res.labels.assign(anchors.size(), kLabelNegative);
    res.gt_thresholds.reserve(gts.size());
    for (const auto& g : gts)
        res.gt_thresholds.push_back(
            dynamic_threshold(g.width(), g.height(), alpha, log_base));
    if (gts.empty() || anchors.empty()) return res;

    std::vector<double> best_iou(anchors.size(), 0.0);
    std::vector<int> best_gt(anchors.size(), -1);
    std::vector<double> gt_best_iou(gts.size(), -1.0);
    std::vector<std::size_t> gt_best_anchor(gts.size(), 0);

    for (std::size_t a = 0; a < anchors.size(); ++a) {
        for (std::size_t g = 0; g < gts.size(); ++g) {
            const double v = iou(anchors[a], gts[g]);
            if (v > best_iou[a] || best_gt[a] < 0) {
                best_iou[a] = v;
                best_gt[a] = static_cast<int>(g);
            }
            if (v > gt_best_iou[g]) {
                gt_best_iou[g] = v;
                gt_best_anchor[g] = a;
            }
        }
    }

    for (std::size_t a = 0; a < anchors.size(); ++a) {
        const int g = best_gt[a];
        const double thr = res.gt_thresholds[g];
        if (best_iou[a] >= thr)
            res.labels[a] = g;
        else if (best_iou[a] >= thr - 0.05)
            res.labels[a] = kLabelIgnore;
    }

    // Force one positive for every GT nothing reached.
    for (std::size_t g = 0; g < gts.size(); ++g) {
        if (gt_best_iou[g] < res.gt_thresholds[g])
            res.labels[gt_best_anchor[g]] = static_cast<int>(g);
    }
    return res;
}

RefinerHeads RefinerHeads::identity(int num_stages) {
    RefinerHeads h;
    h.stages.resize(static_cast<std::size_t>(num_stages));
    return h;
}

RefinerHeads RefinerHeads::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open heads file " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError("bad heads file " + path.string() + ": " + e.what());
    }
    RefinerHeads h;
    for (const auto& js : j.at("stages")) {
        StageHead s;
        auto a = js.at("A");
        auto b = js.at("b");
        if (a.size() != 16 || b.size() != 4)
            throw FormatError("stage head needs A[16] and b[4]");
        for (int i = 0; i < 16; ++i) s.regress[i] = a[i].get<double>();
        for (int i = 0; i < 4; ++i) s.bias[i] = b[i].get<double>();
        if (js.contains("score_w")) {
            auto sw = js["score_w"];
            if (sw.size() != 2) throw FormatError("score_w needs 2 entries");
            s.score_w = {sw[0].get<double>(), sw[1].get<double>()};
        }
        h.stages.push_back(s);
    }
    if (h.stages.empty()) throw FormatError("heads file has no stages");
    return h;
}

void RefinerHeads::save(const std::filesystem::path& path) const {
    nlohmann::json j;
    j["stages"] = nlohmann::json::array();
    for (const auto& s : stages)
        j["stages"].push_back({{"A", s.regress}, {"b", s.bias}, {"score_w", s.score_w}});
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out << j.dump(2) << "\n";
}

std::vector<Detection> propose(const std::vector<Box>& anchors,
                               const RefinerHeads& heads,
                               const std::vector<double>& scores, int stages,
                               double frame_w, double frame_h, double nms_thr,
                               int top_k) {
    if (stages != static_cast<int>(heads.stages.size()))
        throw ConfigError("propose: stage count does not match loaded heads");
    if (scores.size() != anchors.size())
        throw ConfigError("propose: score count does not match anchors");

    std::vector<Box> boxes = anchors;
    std::vector<double> score(scores);
    for (const auto& head : heads.stages) {
        for (std::size_t i = 0; i < boxes.size(); ++i) {
            Box& b = boxes[i];
            if (b.width() <= 0 || b.height() <= 0) continue;
            const double phi[4] = {b.cx() / frame_w, b.cy() / frame_h,
                                   std::log(b.width()), std::log(b.height())};
            BoxDelta d;
            double* out[4] = {&d.dx, &d.dy, &d.dw, &d.dh};
            for (int r = 0; r < 4; ++r) {
                double v = head.bias[r];
                for (int c = 0; c < 4; ++c) v += head.regress[r * 4 + c] * phi[c];
                *out[r] = v;
            }
            b = decode_delta(d, b, std::pair{frame_w, frame_h});
            score[i] = std::clamp(head.score_w[0] * score[i] + head.score_w[1], 0.0, 1.0);
        }
    }

    std::vector<Detection> dets;
    dets.reserve(boxes.size());
    for (std::size_t i = 0; i < boxes.size(); ++i)
        dets.push_back(Detection{boxes[i], score[i], 0});
    dets = nms(std::move(dets), nms_thr);
    if (top_k >= 0 && static_cast<int>(dets.size()) > top_k)
        dets.resize(static_cast<std::size_t>(top_k));
    return dets;
}

}  // namespace fade
