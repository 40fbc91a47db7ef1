#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "boxes.hpp"
#include "config.hpp"
#include "events.hpp"

namespace fade {

// Sidecar metadata for one video.
struct VideoMeta {
    std::string scene;
    std::string weather;      // fair | cloudy | overcast | rainy
    std::string lighting;     // RGB | grayscale
    std::string resolution;
    std::string category;
    std::string camera_angle; // 30 | 45 | 60
    double fps = 30.0;
    std::string split;        // train | val | test (optional)

    static VideoMeta load(const std::filesystem::path& json_path);
};

// Ground truth for one frame.
struct Annotation {
    std::string video_id;
    int frame_index = 0;
    std::vector<Box> boxes;
};

// Parses a PASCAL-VOC style XML document. Coordinates are rescaled from the
// native <size> to the working resolution; unknown elements are ignored.
Annotation parse_voc(const std::string& xml, int work_w, int work_h);

// All XML files under dir/<video_id>/*.xml; frame index from filename digits.
std::vector<Annotation> load_annotations(const std::filesystem::path& dir,
                                         int work_w, int work_h);

std::map<std::string, VideoMeta> load_metadata(const std::filesystem::path& dir);

struct MatchCounts {
    long tp = 0, fp = 0, fn = 0;
    MatchCounts& operator+=(const MatchCounts& o) {
        tp += o.tp;
        fp += o.fp;
        fn += o.fn;
        return *this;
    }
};

// Greedy per-frame matching: detections by descending score each take the
// unmatched GT with highest IoU, counted as TP only when IoU > iou_thr
// (strict).
MatchCounts match_frame(std::vector<Detection> dets, const std::vector<Box>& gts,
                        double iou_thr);

struct Prf {
    double precision = 0, recall = 0, f_measure = 0;
};

// precision, recall, and the weighted harmonic F-measure; zero denominators
// give zero.
Prf prf(const MatchCounts& c, double beta);

struct EvalBreakdown {
    MatchCounts counts;
    Prf scores;
    double tro = 0;
};

struct EvalReport {
    MatchCounts counts;
    Prf scores;
    double tro = 0;
    // axis -> value -> sub-report
    std::map<std::string, std::map<std::string, EvalBreakdown>> breakdowns;
    std::vector<std::string> unknown_videos;  // excluded from scores
    std::string config_echo;
};

struct FrameDetections {
    std::string video_id;
    int frame_index = 0;
    std::vector<Detection> dets;
};

EvalReport evaluate(const std::vector<FrameDetections>& dets,
                    const std::vector<Annotation>& annotations,
                    const std::map<std::string, VideoMeta>& metadata,
                    const Config& cfg);

std::string report_to_json(const EvalReport& r);

// Detection JSON-lines I/O:
// {"video": str, "frame": int, "bbox": [xmin,ymin,xmax,ymax], "score": float}
void write_detections_jsonl(const std::vector<FrameDetections>& dets,
                            const std::filesystem::path& path);
std::vector<FrameDetections> read_detections_jsonl(const std::filesystem::path& path);

// Area histogram over square-side bins (0,5^2], (5^2,10^2], (10^2,15^2],
// (15^2,20^2], (20^2, inf).
struct AreaStats {
    std::array<long, 5> counts{};
    std::array<double, 5> proportions{};  // percent
    std::optional<double> median_area;
    long total = 0;
};

AreaStats area_stats(const std::vector<Annotation>& annotations);
AreaStats area_stats_from_counts(const std::array<long, 5>& counts);

struct SplitReport {
    bool pass = true;
    std::vector<std::string> violations;
};

// Scenes of non-rainy videos must be pairwise disjoint across splits; rainy
// videos are exempt.
SplitReport check_split(const std::map<std::string, VideoMeta>& metadata);

// GT incidents: per video, first to last annotated frame with any box.
std::map<std::string, std::vector<Incident>> gt_incidents(
    const std::vector<Annotation>& annotations,
    const std::map<std::string, VideoMeta>& metadata, double default_fps);

// Predicted incidents from detection frame runs, merged with the same gap
// rule as the pipeline.
std::map<std::string, std::vector<Incident>> detection_incidents(
    const std::vector<FrameDetections>& dets,
    const std::map<std::string, VideoMeta>& metadata, double default_fps,
    double merge_gap_s);

}  // namespace fade
