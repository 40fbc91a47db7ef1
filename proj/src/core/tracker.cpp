#include "tracker.hpp"

#include <algorithm>
#include <cmath>

#include "errors.hpp"

namespace fade {

std::vector<double> Track::vertical_velocities() const {
    std::vector<double> v;
    for (std::size_t i = 1; i < blobs.size(); ++i) {
        const double df = blobs[i].frame_index - blobs[i - 1].frame_index;
        v.push_back((blobs[i].cy - blobs[i - 1].cy) / df);
    }
    return v;
}

void FallPhysicsParams::validate() const {
    if (min_track_len < 2) throw ConfigError("tracker: min_track_len must be >= 2");
    if (max_gap < 0) throw ConfigError("tracker: max_gap must be >= 0");
    if (!(min_down_fraction > 0 && min_down_fraction <= 1))
        throw ConfigError("tracker: min_down_fraction must be in (0,1]");
    if (max_link_dist <= 0) throw ConfigError("tracker: max_link_dist must be positive");
    if (g <= 0) throw ConfigError("tracker: g must be positive");
}

namespace {

struct Candidate {
    double cost;
    std::size_t track;
    std::size_t blob;
};

}  // namespace

std::vector<Track> link(const std::vector<std::vector<Blob>>& frames,
                        const FallPhysicsParams& params) {
    params.validate();
    std::vector<Track> open, closed;
    int next_id = 0;

    for (std::size_t fi = 0; fi < frames.size(); ++fi) {
        const auto& blobs = frames[fi];

        // Candidate links within reach, upward continuations penalized so a
        // downward blob at similar distance wins.
        std::vector<Candidate> cands;
        for (std::size_t t = 0; t < open.size(); ++t) {
            const Blob& last = open[t].blobs.back();
            const int gap = static_cast<int>(fi) - last.frame_index;
            for (std::size_t b = 0; b < blobs.size(); ++b) {
                const double dx = blobs[b].cx - last.cx;
                const double dy = blobs[b].cy - last.cy;
                const double dist = std::hypot(dx, dy);
                if (dist > params.max_link_dist * gap) continue;
                cands.push_back({dy > 0 ? dist : dist * 1.5 + 1.0, t, b});
            }
        }
        std::stable_sort(cands.begin(), cands.end(),
                         [](const Candidate& a, const Candidate& b) {
                             if (a.cost != b.cost) return a.cost < b.cost;
                             if (a.track != b.track) return a.track < b.track;
                             return a.blob < b.blob;
                         });

        std::vector<bool> track_used(open.size(), false), blob_used(blobs.size(), false);
        for (const Candidate& c : cands) {
            if (track_used[c.track] || blob_used[c.blob]) continue;
            track_used[c.track] = true;
            blob_used[c.blob] = true;
            Blob b = blobs[c.blob];
            b.frame_index = static_cast<int>(fi);
            open[c.track].blobs.push_back(b);
        }

        for (std::size_t b = 0; b < blobs.size(); ++b) {
            if (blob_used[b]) continue;
            Track t;
            t.id = next_id++;
            Blob blob = blobs[b];
            blob.frame_index = static_cast<int>(fi);
            t.blobs.push_back(blob);
            open.push_back(std::move(t));
        }

        // Close tracks that ran out of continuation budget.
        std::vector<Track> still_open;
        for (auto& t : open) {
            if (static_cast<int>(fi) - t.blobs.back().frame_index > params.max_gap)
                closed.push_back(std::move(t));
            else
                still_open.push_back(std::move(t));
        }
        open = std::move(still_open);
    }
    for (auto& t : open) closed.push_back(std::move(t));

    std::vector<Track> out;
    for (auto& t : closed) {
        if (static_cast<int>(t.blobs.size()) >= params.min_track_len)
            out.push_back(std::move(t));
    }
    std::sort(out.begin(), out.end(),
              [](const Track& a, const Track& b) { return a.id < b.id; });
    return out;
}

bool is_falling(const Track& t, const FallPhysicsParams& params) {
    if (t.blobs.size() < 2) throw ConfigError("is_falling: track too short");
    const auto v = t.vertical_velocities();
    std::size_t down = 0;
    for (double vy : v)
        if (vy > 0) ++down;
    if (static_cast<double>(down) / v.size() < params.min_down_fraction) return false;

    if (v.size() < 2) return true;  // single step: slope taken as zero
    // Least-squares slope of v_y against the step midpoint time.
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double x = 0.5 * (t.blobs[i].frame_index + t.blobs[i + 1].frame_index);
        sx += x;
        sy += v[i];
        sxx += x * x;
        sxy += x * v[i];
    }
    const double n = static_cast<double>(v.size());
    const double denom = n * sxx - sx * sx;
    const double slope = denom != 0 ? (n * sxy - sx * sy) / denom : 0.0;
    return slope >= 0;
}

ImpactResult impact_force(double mass_kg, double drop_height_m,
                          double impact_duration_s, double g) {
    if (mass_kg <= 0 || drop_height_m < 0 || impact_duration_s <= 0 || g <= 0)
        throw ConfigError("impact_force: inputs must be positive");
    const double v = std::sqrt(2.0 * g * drop_height_m);
    ImpactResult r;
    r.force_newtons = mass_kg * v / impact_duration_s;
    r.equivalent_kgf = r.force_newtons / g;
    return r;
}

}  // namespace fade
