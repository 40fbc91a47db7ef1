#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "config.hpp"
#include "eval.hpp"
#include "pipeline.hpp"

namespace fade {

// Detection over a frame directory (one video) or a directory of video
// directories. Writes out_dir/detections.jsonl and out_dir/incidents.json,
// plus PGM masks under out_dir/masks/<video>/ when requested. Videos fan out
// across threads; outputs are merged in video-id order.
struct DetectSummary {
    int videos = 0;
    long detections = 0;
    long incidents = 0;
};

DetectSummary run_detect(const Config& cfg, const std::filesystem::path& input_dir,
                         const std::filesystem::path& out_dir, bool dump_masks,
                         int threads);

// Evaluation entry shared by CLI and C API. Returns the report; the summary
// line is "P=x.xxxx R=x.xxxx F=x.xxxx TRO=x.xxxx".
EvalReport run_evaluate(const Config& cfg, const std::filesystem::path& detections,
                        const std::filesystem::path& annotations_dir,
                        const std::filesystem::path& metadata_dir,
                        const std::filesystem::path& report_path);
std::string summary_line(const EvalReport& rep);

struct StatsResult {
    AreaStats areas;
    SplitReport split;
    bool split_checked = false;
    std::string json;
};

StatsResult run_stats(const Config& cfg, const std::filesystem::path& annotations_dir,
                      const std::filesystem::path& metadata_dir);

// Dump GMM foreground masks only (no tracking), one PGM per frame.
void run_mask_dump(const Config& cfg, const std::filesystem::path& input_dir,
                   const std::filesystem::path& out_dir);

struct BenchResult {
    StageTimes times;
    double fps = 0;
};

// Times the full default pipeline on an in-memory synthetic video.
BenchResult run_bench(const Config& cfg, int frames);

}  // namespace fade
