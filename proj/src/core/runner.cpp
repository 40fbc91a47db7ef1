#include "runner.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "errors.hpp"
#include "synth.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace fade {

namespace {

bool has_frames(const fs::path& dir) {
    for (const auto& e : fs::directory_iterator(dir)) {
        if (!e.is_regular_file()) continue;
        auto ext = e.path().extension().string();
        if (ext == ".pgm" || ext == ".ppm" || ext == ".png") return true;
    }
    return false;
}

// One video dir (contains images) or a corpus dir (contains video dirs).
std::vector<fs::path> discover_videos(const fs::path& input) {
    if (!fs::is_directory(input)) throw IoError("not a directory: " + input.string());
    if (has_frames(input)) return {input};
    std::vector<fs::path> videos;
    for (const auto& e : fs::directory_iterator(input))
        if (e.is_directory() && has_frames(e.path())) videos.push_back(e.path());
    std::sort(videos.begin(), videos.end());
    if (videos.empty()) throw IoError("no frames found in " + input.string());
    return videos;
}

json incident_json(const Incident& inc) {
    return json{{"video", inc.video_id}, {"begin_s", inc.begin_s}, {"end_s", inc.end_s}};
}

}  // namespace

DetectSummary run_detect(const Config& cfg, const fs::path& input_dir,
                         const fs::path& out_dir, bool dump_masks, int threads) {
    cfg.validate();
    const auto videos = discover_videos(input_dir);
    fs::create_directories(out_dir);

    std::vector<VideoResult> results(videos.size());
    std::vector<std::exception_ptr> errors(videos.size());
    std::atomic<std::size_t> cursor{0};

    auto worker = [&]() {
        for (;;) {
            const std::size_t i = cursor.fetch_add(1);
            if (i >= videos.size()) return;
            try {
                const std::string video_id = videos[i].filename().string();
                SequenceSource src(videos[i], cfg.fps,
                                   cfg.grayscale ? ColorMode::Grayscale : ColorMode::RGB);
                MaskSink sink;
                fs::path mask_dir;
                if (dump_masks) {
                    mask_dir = out_dir / "masks" / video_id;
                    fs::create_directories(mask_dir);
                    sink = [&mask_dir](int frame, const ForegroundMask& m) {
                        char name[32];
                        std::snprintf(name, sizeof(name), "%06d.pgm", frame);
                        save_pgm(mask_to_frame(m), mask_dir / name);
                    };
                }
                results[i] = run_video(src, cfg, video_id, sink);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };

    const int n = std::clamp(threads, 1, static_cast<int>(videos.size()));
    if (n == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < n; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);

    DetectSummary sum;
    sum.videos = static_cast<int>(videos.size());
    std::vector<FrameDetections> all;
    json incidents = json::array();
    for (const auto& r : results) {
        for (const auto& fd : r.detections) {
            sum.detections += static_cast<long>(fd.dets.size());
            all.push_back(fd);
        }
        for (const auto& inc : r.incidents) {
            incidents.push_back(incident_json(inc));
            ++sum.incidents;
        }
    }
    write_detections_jsonl(all, out_dir / "detections.jsonl");
    std::ofstream io(out_dir / "incidents.json");
    if (!io) throw IoError("cannot write " + (out_dir / "incidents.json").string());
    io << incidents.dump(2) << "\n";
    return sum;
}

EvalReport run_evaluate(const Config& cfg, const fs::path& detections,
                        const fs::path& annotations_dir, const fs::path& metadata_dir,
                        const fs::path& report_path) {
    cfg.validate();
    const auto dets = read_detections_jsonl(detections);
    const auto anns = load_annotations(annotations_dir, cfg.width, cfg.height);
    std::map<std::string, VideoMeta> meta;
    if (!metadata_dir.empty() && fs::is_directory(metadata_dir))
        meta = load_metadata(metadata_dir);
    EvalReport rep = evaluate(dets, anns, meta, cfg);
    if (!report_path.empty()) {
        std::ofstream out(report_path);
        if (!out) throw IoError("cannot write " + report_path.string());
        out << report_to_json(rep);
    }
    return rep;
}

std::string summary_line(const EvalReport& rep) {
    char buf[128];
    std::snprintf(buf, sizeof(buf), "P=%.4f R=%.4f F=%.4f TRO=%.4f",
                  rep.scores.precision, rep.scores.recall, rep.scores.f_measure,
                  rep.tro);
    return buf;
}

StatsResult run_stats(const Config& cfg, const fs::path& annotations_dir,
                      const fs::path& metadata_dir) {
    StatsResult res;
    std::vector<Annotation> anns;
    if (fs::is_directory(annotations_dir))
        anns = load_annotations(annotations_dir, cfg.width, cfg.height);
    res.areas = area_stats(anns);

    std::map<std::string, VideoMeta> meta;
    if (!metadata_dir.empty() && fs::is_directory(metadata_dir)) {
        meta = load_metadata(metadata_dir);
        bool any_split = false;
        for (const auto& [v, m] : meta)
            if (!m.split.empty()) any_split = true;
        if (any_split) {
            res.split_checked = true;
            res.split = check_split(meta);
        }
    }

    static const char* kBinNames[5] = {"(0,25]", "(25,100]", "(100,225]",
                                       "(225,400]", "(400,inf)"};
    json j;
    j["total_boxes"] = res.areas.total;
    json bins = json::array();
    for (int i = 0; i < 5; ++i)
        bins.push_back({{"range", kBinNames[i]},
                        {"count", res.areas.counts[i]},
                        {"proportion_pct", res.areas.proportions[i]}});
    j["area_bins"] = bins;
    if (res.areas.median_area)
        j["median_area"] = *res.areas.median_area;
    else
        j["median_area"] = nullptr;
    if (res.split_checked) {
        j["split_check"] = {{"pass", res.split.pass},
                            {"violations", res.split.violations}};
    }
    res.json = j.dump(2) + "\n";
    return res;
}

void run_mask_dump(const Config& cfg, const fs::path& input_dir, const fs::path& out_dir) {
    cfg.validate();
    for (const auto& vdir : discover_videos(input_dir)) {
        const std::string video_id = vdir.filename().string();
        const fs::path mask_dir = out_dir / video_id;
        fs::create_directories(mask_dir);
        SequenceSource src(vdir, cfg.fps,
                           cfg.grayscale ? ColorMode::Grayscale : ColorMode::RGB);
        GmmModel gmm(cfg.gmm, cfg.width, cfg.height, cfg.grayscale ? 1 : 3);
        int frame_index = 0;
        while (auto f = src.next()) {
            Frame frame = std::move(*f);
            if (cfg.grayscale && frame.channels != 1) frame = to_grayscale(frame);
            if (frame.width != cfg.width || frame.height != cfg.height)
                frame = resize(frame, cfg.width, cfg.height);
            ForegroundMask m = morph_open(gmm.apply(frame), cfg.open_radius);
            char name[32];
            std::snprintf(name, sizeof(name), "%06d.pgm", frame_index++);
            save_pgm(mask_to_frame(m), mask_dir / name);
        }
    }
}

BenchResult run_bench(const Config& cfg, int frames) {
    cfg.validate();
    SynthSpec spec;
    spec.width = cfg.width;
    spec.height = cfg.height;
    spec.num_frames = frames;
    spec.fps = cfg.fps;
    spec.noise_sigma = 2.0;
    spec.seed = 42;
    SynthObject obj;
    obj.size = 10;
    obj.x0 = spec.width / 2.0;
    obj.y0 = 5;
    obj.start_frame = frames / 4;
    obj.accel = 0.4;
    spec.objects.push_back(obj);
    spec.min_duration = 5;
    SynthResult video = synth_generate(spec);

    VectorSource src(std::move(video.frames), cfg.fps);
    BenchResult res;
    run_video_timed(src, cfg, "bench", res.times);
    const double total = res.times.total_s();
    res.fps = total > 0 ? res.times.frames / total : 0.0;
    return res;
}

}  // namespace fade
