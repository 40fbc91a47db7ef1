#pragma once

#include <vector>

#include "boxes.hpp"
#include "mask_ops.hpp"

namespace fade {

struct Track {
    int id = 0;
    std::vector<Blob> blobs;  // strictly increasing frame indices
    int first_frame() const { return blobs.front().frame_index; }
    int last_frame() const { return blobs.back().frame_index; }
    // Vertical centroid velocity per frame gap, one entry per consecutive pair.
    std::vector<double> vertical_velocities() const;
};

struct FallPhysicsParams {
    double g = 9.8;                 // m/s^2
    int min_track_len = 3;
    int max_gap = 2;                // missed frames before a track closes
    double min_down_fraction = 0.8; // fraction of steps moving downward
    double max_link_dist = 120.0;   // px per frame

    void validate() const;
};

// Greedy nearest-centroid frame-to-frame association, preferring downward
// continuations. Tracks shorter than min_track_len are dropped.
std::vector<Track> link(const std::vector<std::vector<Blob>>& frames,
                        const FallPhysicsParams& params);

// True iff at least min_down_fraction of the steps move downward and a
// least-squares fit of vertical velocity against time has non-negative slope.
bool is_falling(const Track& t, const FallPhysicsParams& params);

struct ImpactResult {
    double force_newtons = 0;
    double equivalent_kgf = 0;
};

// Momentum-theorem impact estimate: v = sqrt(2 g h), F = m v / dt.
ImpactResult impact_force(double mass_kg, double drop_height_m,
                          double impact_duration_s, double g = 9.8);

}  // namespace fade
