#include "pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>

#include "errors.hpp"
#include "mask_ops.hpp"

namespace fade {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Blob-area-normalized confidence in (0,1); saturates around typical falling
// object sizes (median ~20 px).
double area_score(int area) { return area / (area + 20.0); }

// Mean attention over a box given the map's downscale factors.
double attention_gate(const FeatureMap& map, const Box& b, double sx, double sy) {
    int x0 = std::clamp(static_cast<int>(b.xmin * sx), 0, map.w - 1);
    int x1 = std::clamp(static_cast<int>(std::ceil(b.xmax * sx)), x0 + 1, map.w);
    int y0 = std::clamp(static_cast<int>(b.ymin * sy), 0, map.h - 1);
    int y1 = std::clamp(static_cast<int>(std::ceil(b.ymax * sy)), y0 + 1, map.h);
    double sum = 0.0;
    for (int y = y0; y < y1; ++y)
        for (int x = x0; x < x1; ++x) sum += map.at(y, x);
    return sum / ((y1 - y0) * (x1 - x0));
}

}  // namespace

VideoResult run_video_timed(FrameSource& source, const Config& cfg,
                            const std::string& video_id, StageTimes& times,
                            const MaskSink& mask_sink) {
    cfg.validate();
    const int w = cfg.width, h = cfg.height;
    const int channels = cfg.grayscale ? 1 : 3;

    std::optional<GmmModel> gmm;
    std::optional<AttentionWeights> att_weights;
    if (cfg.attention_enabled)
        att_weights = AttentionWeights::load(cfg.attention_weights);

    RefinerHeads heads;
    std::vector<Box> anchors;
    if (cfg.scoring == ScoringMode::SmrpnRefined) {
        heads = cfg.smrpn_heads.empty() ? RefinerHeads::identity(cfg.smrpn_stages)
                                        : RefinerHeads::load(cfg.smrpn_heads);
        std::vector<PyramidLevel> levels;
        for (double s : cfg.smrpn_strides) levels.push_back({s, s});
        for (const auto& g : generate_anchors(w, h, levels))
            anchors.insert(anchors.end(), g.anchors.begin(), g.anchors.end());
    }

    const int att_h = (h + 3) / 4, att_w = (w + 3) / 4;

    std::vector<std::vector<Blob>> per_frame;
    int frame_index = 0;
    while (true) {
        auto t0 = Clock::now();
        auto maybe = source.next();
        if (!maybe) break;
        Frame frame = std::move(*maybe);
        if (cfg.grayscale && frame.channels != 1) frame = to_grayscale(frame);
        if (frame.width != w || frame.height != h) frame = resize(frame, w, h);
        times.decode_s += seconds_since(t0);

        if (!gmm) gmm.emplace(cfg.gmm, w, h, channels);

        t0 = Clock::now();
        ForegroundMask mask = gmm->apply(frame);
        times.gmm_s += seconds_since(t0);
        if (mask_sink) mask_sink(frame_index, mask);

        t0 = Clock::now();
        mask = morph_open(mask, cfg.open_radius);
        std::vector<Blob> blobs = connected_components(mask, cfg.min_area);
        times.mask_ops_s += seconds_since(t0);

        t0 = Clock::now();
        std::optional<FeatureMap> att_map;
        if (att_weights) {
            const Frame small = resize(cfg.grayscale ? frame : to_grayscale(frame),
                                       att_w, att_h);
            const FeatureMap feat = frame_to_feature_map(small);
            att_map = compute_map(feat, resize_mask(mask, att_h, att_w), *att_weights);
        }
        const double att_sx = static_cast<double>(att_w) / w;
        const double att_sy = static_cast<double>(att_h) / h;

        std::vector<Blob> candidates;
        if (cfg.scoring == ScoringMode::BlobDirect) {
            candidates = std::move(blobs);
            for (auto& b : candidates) {
                b.score = area_score(b.area);
                if (att_map) b.score *= attention_gate(*att_map, b.box, att_sx, att_sy);
            }
        } else {
            std::vector<double> scores(anchors.size(), 0.0);
            for (std::size_t i = 0; i < anchors.size(); ++i) {
                double best = 0.0;
                for (const auto& b : blobs) best = std::max(best, iou(anchors[i], b.box));
                scores[i] = best;
            }
            auto proposals = propose(anchors, heads, scores, cfg.smrpn_stages, w, h,
                                     cfg.smrpn_nms_thr, cfg.smrpn_top_k);
            for (const auto& p : proposals) {
                if (p.score <= 0) continue;
                Blob b;
                b.box = p.box;
                b.area = std::max(1, static_cast<int>(std::lround(p.box.area())));
                b.cx = p.box.cx();
                b.cy = p.box.cy();
                b.score = p.score;
                if (att_map) b.score *= attention_gate(*att_map, b.box, att_sx, att_sy);
                candidates.push_back(b);
            }
        }
        times.scoring_s += seconds_since(t0);
        per_frame.push_back(std::move(candidates));
        ++frame_index;
    }
    times.frames = frame_index;

    auto t0 = Clock::now();
    VideoResult res;
    res.video_id = video_id;
    const auto tracks = link(per_frame, cfg.tracker);
    std::vector<Track> falling;
    for (const auto& t : tracks)
        if (is_falling(t, cfg.tracker)) falling.push_back(t);

    std::map<int, std::vector<Detection>> by_frame;
    for (const auto& t : falling)
        for (const auto& b : t.blobs)
            by_frame[b.frame_index].push_back(Detection{b.box, b.score, b.frame_index});
    for (auto& [fi, dets] : by_frame) {
        std::stable_sort(dets.begin(), dets.end(),
                         [](const Detection& a, const Detection& b) {
                             if (a.box.xmin != b.box.xmin) return a.box.xmin < b.box.xmin;
                             return a.box.ymin < b.box.ymin;
                         });
        res.detections.push_back(FrameDetections{video_id, fi, std::move(dets)});
    }
    res.incidents = incidents_from_tracks(falling, source.fps(), cfg.tracker, video_id,
                                          cfg.incident_merge_gap_s);
    res.tracks = std::move(falling);
    times.tracking_s += seconds_since(t0);
    return res;
}

VideoResult run_video(FrameSource& source, const Config& cfg,
                      const std::string& video_id, const MaskSink& mask_sink) {
    StageTimes times;
    return run_video_timed(source, cfg, video_id, times, mask_sink);
}

}  // namespace fade
