#pragma once

#include <map>
#include <string>
#include <vector>

#include "tracker.hpp"

namespace fade {

// One falling event, localized as a time range within a video.
struct Incident {
    std::string video_id;
    double begin_s = 0;
    double end_s = 0;
    double length() const { return end_s - begin_s; }
};

// Falling tracks become [first/fps, last/fps] ranges; ranges overlapping or
// separated by at most merge_gap_s are merged.
std::vector<Incident> incidents_from_tracks(const std::vector<Track>& tracks,
                                            double fps,
                                            const FallPhysicsParams& params,
                                            const std::string& video_id = "",
                                            double merge_gap_s = 0.5);

// Merge helper shared with the evaluation side (ranges in seconds).
std::vector<Incident> merge_incidents(std::vector<Incident> incidents,
                                      double merge_gap_s = 0.5);

// Time range overlap: interval intersection over union. Two zero-length
// intervals score 1 when identical, else 0.
double tro(const Incident& pred, const Incident& gt);

// Per video, greedy one-to-one matching by descending pairwise TRO; unmatched
// incidents contribute 0; the dataset score is the mean over GT incidents.
double tro_dataset(const std::map<std::string, std::vector<Incident>>& preds,
                   const std::map<std::string, std::vector<Incident>>& gts);

}  // namespace fade
