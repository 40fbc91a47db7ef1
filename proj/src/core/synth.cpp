#include "synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>

#include <nlohmann/json.hpp>

#include "errors.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace fade {

namespace {

// Box-Muller on top of mt19937_64; libstdc++'s normal_distribution is not
// pinned by the standard, this is.
class Gaussian {
  public:
    explicit Gaussian(std::uint64_t seed) : rng_(seed) {}
    double next(double sigma) {
        if (have_) {
            have_ = false;
            return spare_ * sigma;
        }
        double u1 = 0.0;
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        spare_ = r * std::sin(2.0 * M_PI * u2);
        have_ = true;
        return r * std::cos(2.0 * M_PI * u2) * sigma;
    }

  private:
    double uniform() {
        return (rng_() >> 11) * (1.0 / 9007199254740992.0);  // 53-bit
    }
    std::mt19937_64 rng_;
    double spare_ = 0.0;
    bool have_ = false;
};

struct ObjectPos {
    bool visible = false;
    Box box;
};

ObjectPos object_at(const SynthObject& o, int frame, int w, int h) {
    ObjectPos p;
    const int t = frame - o.start_frame;
    if (t < 0) return p;
    double x = o.x0, y = o.y0;
    switch (o.motion) {
        case MotionLaw::FreeFall:
            y = o.y0 + 0.5 * o.accel * t * t;
            x = o.x0 + o.vx * t;
            break;
        case MotionLaw::Linear:
            x = o.x0 + o.vx * t;
            y = o.y0 + o.vy * t;
            break;
        case MotionLaw::Static:
            break;
    }
    const double ix = std::floor(x + 0.5);
    const double iy = std::floor(y + 0.5);
    Box b{ix, iy, ix + o.size, iy + o.size};
    Box clipped{std::clamp(b.xmin, 0.0, static_cast<double>(w)),
                std::clamp(b.ymin, 0.0, static_cast<double>(h)),
                std::clamp(b.xmax, 0.0, static_cast<double>(w)),
                std::clamp(b.ymax, 0.0, static_cast<double>(h))};
    if (clipped.area() >= 1.0) {
        p.visible = true;
        p.box = clipped;
    }
    return p;
}

}  // namespace

SynthResult synth_generate(const SynthSpec& spec) {
    if (spec.width < 1 || spec.height < 1 || spec.num_frames < 1 || spec.fps <= 0)
        throw ConfigError("synth: invalid video shape");
    if (spec.noise_sigma < 0) throw ConfigError("synth: negative noise sigma");

    // Every object must stay visible long enough to be a usable fixture.
    for (std::size_t i = 0; i < spec.objects.size(); ++i) {
        int visible = 0;
        for (int f = 0; f < spec.num_frames; ++f)
            if (object_at(spec.objects[i], f, spec.width, spec.height).visible) ++visible;
        if (visible < spec.min_duration)
            throw ConfigError("synth: object " + std::to_string(i) +
                              " leaves the frame after " + std::to_string(visible) +
                              " frames (< min_duration)");
    }

    Gaussian noise(spec.seed);
    SynthResult res;
    res.fps = spec.fps;
    for (int f = 0; f < spec.num_frames; ++f) {
        Frame fr = make_frame(spec.width, spec.height, 1);
        fr.index = f;
        fr.timestamp_s = f / spec.fps;
        for (int y = 0; y < spec.height; ++y) {
            const double base = spec.gradient
                                    ? spec.background + 40.0 * y / spec.height
                                    : static_cast<double>(spec.background);
            for (int x = 0; x < spec.width; ++x) {
                double v = base;
                if (spec.noise_sigma > 0) v += noise.next(spec.noise_sigma);
                fr.at(x, y) = static_cast<std::uint8_t>(
                    std::clamp(std::floor(v + 0.5), 0.0, 255.0));
            }
        }
        std::vector<Box> boxes;
        for (const auto& o : spec.objects) {
            const ObjectPos p = object_at(o, f, spec.width, spec.height);
            if (!p.visible) continue;
            for (int y = static_cast<int>(p.box.ymin); y < p.box.ymax; ++y)
                for (int x = static_cast<int>(p.box.xmin); x < p.box.xmax; ++x)
                    fr.at(x, y) = o.value;
            boxes.push_back(p.box);
        }
        if (!boxes.empty()) res.gt[f] = std::move(boxes);
        res.frames.push_back(std::move(fr));
    }
    return res;
}

void synth_write(const SynthResult& r, const fs::path& out_dir,
                 const std::string& video_id) {
    const fs::path frames_dir = out_dir / "frames" / video_id;
    const fs::path ann_dir = out_dir / "annotations" / video_id;
    const fs::path meta_dir = out_dir / "metadata";
    fs::create_directories(frames_dir);
    fs::create_directories(ann_dir);
    fs::create_directories(meta_dir);

    char name[32];
    for (const auto& f : r.frames) {
        std::snprintf(name, sizeof(name), "%06d.pgm", f.index);
        save_pgm(f, frames_dir / name);
    }
    for (const auto& [frame, boxes] : r.gt) {
        std::snprintf(name, sizeof(name), "%06d.xml", frame);
        std::ofstream out(ann_dir / name);
        if (!out) throw IoError("cannot write annotation " + (ann_dir / name).string());
        const int w = r.frames.front().width, h = r.frames.front().height;
        out << "<annotation>\n  <filename>" << frame << "</filename>\n"
            << "  <size><width>" << w << "</width><height>" << h
            << "</height><depth>1</depth></size>\n";
        for (const auto& b : boxes) {
            out << "  <object>\n    <name>falling</name>\n    <bndbox>"
                << "<xmin>" << b.xmin << "</xmin><ymin>" << b.ymin << "</ymin>"
                << "<xmax>" << b.xmax << "</xmax><ymax>" << b.ymax << "</ymax>"
                << "</bndbox>\n  </object>\n";
        }
        out << "</annotation>\n";
    }
    json meta{{"scene", "synthetic"},  {"weather", "fair"},
              {"lighting", "grayscale"}, {"resolution", "640x480"},
              {"category", "synthetic"}, {"camera_angle", "45"},
              {"fps", r.fps}};
    std::ofstream mo(meta_dir / (video_id + ".json"));
    mo << meta.dump(2) << "\n";
}

SynthSpec synth_spec_from_json(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open synth spec " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw FormatError("bad synth spec " + path.string() + ": " + e.what());
    }
    SynthSpec s;
    s.width = j.value("width", s.width);
    s.height = j.value("height", s.height);
    s.num_frames = j.value("frames", s.num_frames);
    s.fps = j.value("fps", s.fps);
    s.background = static_cast<std::uint8_t>(j.value("background", 100));
    s.gradient = j.value("gradient", false);
    s.noise_sigma = j.value("noise_sigma", 0.0);
    s.seed = j.value("seed", 1ull);
    s.min_duration = j.value("min_duration", s.min_duration);
    if (j.contains("objects")) {
        for (const auto& jo : j["objects"]) {
            SynthObject o;
            o.size = jo.value("size", o.size);
            o.x0 = jo.value("x0", o.x0);
            o.y0 = jo.value("y0", o.y0);
            o.start_frame = jo.value("start_frame", o.start_frame);
            const std::string m = jo.value("motion", "free_fall");
            if (m == "free_fall") o.motion = MotionLaw::FreeFall;
            else if (m == "linear") o.motion = MotionLaw::Linear;
            else if (m == "static") o.motion = MotionLaw::Static;
            else throw FormatError("synth spec: unknown motion '" + m + "'");
            o.accel = jo.value("accel", o.accel);
            o.vx = jo.value("vx", o.vx);
            o.vy = jo.value("vy", o.vy);
            o.value = static_cast<std::uint8_t>(jo.value("value", 250));
            s.objects.push_back(o);
        }
    }
    return s;
}

}  // namespace fade
