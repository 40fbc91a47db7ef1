#include "events.hpp"

#include <algorithm>
#include <cmath>

#include "errors.hpp"

namespace fade {

std::vector<Incident> merge_incidents(std::vector<Incident> incidents,
                                      double merge_gap_s) {
    std::sort(incidents.begin(), incidents.end(),
              [](const Incident& a, const Incident& b) {
                  if (a.begin_s != b.begin_s) return a.begin_s < b.begin_s;
                  return a.end_s < b.end_s;
              });
    std::vector<Incident> out;
    for (const auto& inc : incidents) {
        if (!out.empty() && inc.begin_s - out.back().end_s <= merge_gap_s)
            out.back().end_s = std::max(out.back().end_s, inc.end_s);
        else
            out.push_back(inc);
    }
    return out;
}

std::vector<Incident> incidents_from_tracks(const std::vector<Track>& tracks,
                                            double fps,
                                            const FallPhysicsParams& params,
                                            const std::string& video_id,
                                            double merge_gap_s) {
    if (fps <= 0) throw ConfigError("incidents_from_tracks: fps must be positive");
    std::vector<Incident> incs;
    for (const auto& t : tracks) {
        if (!is_falling(t, params)) continue;
        incs.push_back(Incident{video_id, t.first_frame() / fps, t.last_frame() / fps});
    }
    return merge_incidents(std::move(incs), merge_gap_s);
}

double tro(const Incident& pred, const Incident& gt) {
    if (pred.video_id != gt.video_id)
        throw ConfigError("tro: incidents from different videos");
    if (pred.length() == 0 && gt.length() == 0)
        return pred.begin_s == gt.begin_s ? 1.0 : 0.0;
    const double inter = std::max(
        0.0, std::min(pred.end_s, gt.end_s) - std::max(pred.begin_s, gt.begin_s));
    // Disjoint intervals: the union is the sum of both lengths.
    const double uni = pred.length() + gt.length() - inter;
    return uni > 0 ? inter / uni : 0.0;
}

double tro_dataset(const std::map<std::string, std::vector<Incident>>& preds,
                   const std::map<std::string, std::vector<Incident>>& gts) {
    double sum = 0.0;
    std::size_t gt_total = 0;
    for (const auto& [video, gt_incs] : gts) {
        gt_total += gt_incs.size();
        auto it = preds.find(video);
        if (it == preds.end()) continue;
        const auto& pred_incs = it->second;

        struct Pair {
            double score;
            std::size_t p, g;
        };
        std::vector<Pair> pairs;
        for (std::size_t p = 0; p < pred_incs.size(); ++p)
            for (std::size_t g = 0; g < gt_incs.size(); ++g)
                pairs.push_back({tro(pred_incs[p], gt_incs[g]), p, g});
        std::stable_sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) {
            if (a.score != b.score) return a.score > b.score;
            if (a.g != b.g) return a.g < b.g;
            return a.p < b.p;
        });
        std::vector<bool> pu(pred_incs.size(), false), gu(gt_incs.size(), false);
        for (const Pair& pr : pairs) {
            if (pu[pr.p] || gu[pr.g]) continue;
            pu[pr.p] = true;
            gu[pr.g] = true;
            sum += pr.score;
        }
    }
    if (gt_total == 0) {
        // Degenerate dataset: perfect only when nothing was predicted either.
        for (const auto& [video, pred_incs] : preds)
            if (!pred_incs.empty()) return 0.0;
        return 1.0;
    }
    return sum / static_cast<double>(gt_total);
}

}  // namespace fade
