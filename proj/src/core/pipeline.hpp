#pragma once

#include <functional>
#include <string>
#include <vector>

#include "attention.hpp"
#include "config.hpp"
#include "eval.hpp"
#include "events.hpp"
#include "frame.hpp"
#include "smrpn.hpp"

namespace fade {

struct VideoResult {
    std::string video_id;
    std::vector<FrameDetections> detections;
    std::vector<Incident> incidents;
    std::vector<Track> tracks;  // falling tracks only
};

// Optional per-frame mask consumer (mask dumps, debugging).
using MaskSink = std::function<void(int frame_index, const ForegroundMask&)>;

// frames -> GMM mask -> morphology -> blobs -> (attention gating) -> scoring
// -> gravity-filtered tracks -> detections + incidents. Detections are only
// emitted from tracks confirmed falling.
VideoResult run_video(FrameSource& source, const Config& cfg,
                      const std::string& video_id, const MaskSink& mask_sink = {});

// Per-stage wall time of one run, used by the bench command.
struct StageTimes {
    double decode_s = 0;
    double gmm_s = 0;
    double mask_ops_s = 0;
    double scoring_s = 0;
    double tracking_s = 0;
    int frames = 0;
    double total_s() const {
        return decode_s + gmm_s + mask_ops_s + scoring_s + tracking_s;
    }
};

VideoResult run_video_timed(FrameSource& source, const Config& cfg,
                            const std::string& video_id, StageTimes& times,
                            const MaskSink& mask_sink = {});

}  // namespace fade
