#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "boxes.hpp"
#include "frame.hpp"

namespace fade {

enum class MotionLaw { FreeFall, Linear, Static };

// Deterministic seeded test video: flat or gradient background, optional
// Gaussian noise, one moving square per object.
struct SynthObject {
    int size = 8;            // square side, px
    double x0 = 100, y0 = 10;
    int start_frame = 0;
    MotionLaw motion = MotionLaw::FreeFall;
    double accel = 1.0;      // px/frame^2 (free fall)
    double vx = 0, vy = 0;   // px/frame (linear)
    std::uint8_t value = 250;
};

struct SynthSpec {
    int width = 640, height = 480;
    int num_frames = 150;
    double fps = 30.0;
    std::uint8_t background = 100;
    bool gradient = false;   // vertical ramp instead of a flat field
    double noise_sigma = 0.0;
    std::uint64_t seed = 1;
    int min_duration = 10;   // frames each object must stay visible
    std::vector<SynthObject> objects;
};

struct SynthResult {
    std::vector<Frame> frames;
    std::map<int, std::vector<Box>> gt;  // frame -> clipped object boxes
    double fps = 30.0;
};

SynthResult synth_generate(const SynthSpec& spec);

// Frames as PGM plus VOC XML ground truth and a metadata sidecar, in the
// layout the detect/evaluate commands expect.
void synth_write(const SynthResult& r, const std::filesystem::path& out_dir,
                 const std::string& video_id);

SynthSpec synth_spec_from_json(const std::filesystem::path& json_path);

}  // namespace fade
