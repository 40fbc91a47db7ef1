#include "eval.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "errors.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace fade {

namespace {

// Minimal tag extractor for the VOC subset; enough for well-formed documents,
// attributes and CDATA are not supported.
std::optional<std::string> find_tag(const std::string& s, const std::string& tag,
                                    std::size_t& pos) {
    const std::string open = "<" + tag + ">";
    const std::string close = "</" + tag + ">";
    auto b = s.find(open, pos);
    if (b == std::string::npos) return std::nullopt;
    auto e = s.find(close, b + open.size());
    if (e == std::string::npos)
        throw FormatError("voc: unterminated <" + tag + "> element");
    pos = e + close.size();
    return s.substr(b + open.size(), e - b - open.size());
}

std::optional<std::string> find_tag(const std::string& s, const std::string& tag) {
    std::size_t pos = 0;
    return find_tag(s, tag, pos);
}

double require_number(const std::string& block, const std::string& tag) {
    auto v = find_tag(block, tag);
    if (!v) throw FormatError("voc: missing <" + tag + ">");
    try {
        return std::stod(*v);
    } catch (const std::exception&) {
        throw FormatError("voc: non-numeric <" + tag + ">: " + *v);
    }
}

int digits_suffix(const std::string& stem) {
    int i = static_cast<int>(stem.size());
    while (i > 0 && std::isdigit(static_cast<unsigned char>(stem[i - 1]))) --i;
    if (i == static_cast<int>(stem.size())) return -1;
    return std::stoi(stem.substr(i));
}

}  // namespace

Annotation parse_voc(const std::string& xml, int work_w, int work_h) {
    Annotation ann;
    auto size = find_tag(xml, "size");
    if (!size) throw FormatError("voc: missing <size>");
    const double native_w = require_number(*size, "width");
    const double native_h = require_number(*size, "height");
    if (native_w <= 0 || native_h <= 0) throw FormatError("voc: non-positive size");
    const double sx = work_w / native_w;
    const double sy = work_h / native_h;

    std::size_t pos = 0;
    while (auto obj = find_tag(xml, "object", pos)) {
        auto bnd = find_tag(*obj, "bndbox");
        if (!bnd) throw FormatError("voc: object without <bndbox>");
        Box b;
        b.xmin = require_number(*bnd, "xmin") * sx;
        b.ymin = require_number(*bnd, "ymin") * sy;
        b.xmax = require_number(*bnd, "xmax") * sx;
        b.ymax = require_number(*bnd, "ymax") * sy;
        if (b.xmax < b.xmin || b.ymax < b.ymin)
            throw FormatError("voc: inverted bndbox");
        ann.boxes.push_back(b);
    }
    return ann;
}

std::vector<Annotation> load_annotations(const fs::path& dir, int work_w, int work_h) {
    if (!fs::is_directory(dir)) throw IoError("not a directory: " + dir.string());
    std::vector<Annotation> out;
    std::vector<fs::path> videos;
    for (const auto& e : fs::directory_iterator(dir))
        if (e.is_directory()) videos.push_back(e.path());
    std::sort(videos.begin(), videos.end());
    for (const auto& vdir : videos) {
        std::vector<fs::path> files;
        for (const auto& e : fs::directory_iterator(vdir))
            if (e.is_regular_file() && e.path().extension() == ".xml")
                files.push_back(e.path());
        std::sort(files.begin(), files.end());
        int rank = 0;
        for (const auto& f : files) {
            std::ifstream in(f);
            if (!in) throw IoError("cannot open " + f.string());
            std::stringstream ss;
            ss << in.rdbuf();
            Annotation ann;
            try {
                ann = parse_voc(ss.str(), work_w, work_h);
            } catch (const FormatError& e) {
                throw FormatError(std::string(e.what()) + " in " + f.string());
            }
            ann.video_id = vdir.filename().string();
            const int idx = digits_suffix(f.stem().string());
            ann.frame_index = idx >= 0 ? idx : rank;
            ++rank;
            out.push_back(std::move(ann));
        }
    }
    return out;
}

VideoMeta VideoMeta::load(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw FormatError("bad metadata " + path.string() + ": " + e.what());
    }
    VideoMeta m;
    m.scene = j.value("scene", "");
    m.weather = j.value("weather", "");
    m.lighting = j.value("lighting", "");
    m.resolution = j.value("resolution", "");
    m.category = j.value("category", "");
    if (j.contains("camera_angle")) {
        if (j["camera_angle"].is_number())
            m.camera_angle = std::to_string(j["camera_angle"].get<int>());
        else
            m.camera_angle = j["camera_angle"].get<std::string>();
    }
    m.fps = j.value("fps", 30.0);
    m.split = j.value("split", "");
    static const std::set<std::string> weathers = {"", "fair", "cloudy", "overcast", "rainy"};
    if (!weathers.count(m.weather))
        throw FormatError("metadata " + path.string() + ": unknown weather '" + m.weather + "'");
    static const std::set<std::string> lightings = {"", "RGB", "grayscale"};
    if (!lightings.count(m.lighting))
        throw FormatError("metadata " + path.string() + ": unknown lighting '" + m.lighting + "'");
    return m;
}

std::map<std::string, VideoMeta> load_metadata(const fs::path& dir) {
    std::map<std::string, VideoMeta> out;
    if (!fs::is_directory(dir)) throw IoError("not a directory: " + dir.string());
    for (const auto& e : fs::directory_iterator(dir)) {
        if (!e.is_regular_file() || e.path().extension() != ".json") continue;
        out[e.path().stem().string()] = VideoMeta::load(e.path());
    }
    return out;
}

MatchCounts match_frame(std::vector<Detection> dets, const std::vector<Box>& gts,
                        double iou_thr) {
    std::stable_sort(dets.begin(), dets.end(), [](const Detection& a, const Detection& b) {
        return a.score > b.score;
    });
    std::vector<bool> gt_used(gts.size(), false);
    MatchCounts c;
    for (const auto& d : dets) {
        int best = -1;
        double best_iou = 0.0;
        for (std::size_t g = 0; g < gts.size(); ++g) {
            if (gt_used[g]) continue;
            const double v = iou(d.box, gts[g]);
            if (v > best_iou) {
                best_iou = v;
                best = static_cast<int>(g);
            }
        }
        if (best >= 0 && best_iou > iou_thr) {
            gt_used[best] = true;
            ++c.tp;
        } else {
            ++c.fp;
        }
    }
    c.fn = static_cast<long>(gts.size()) - c.tp;
    return c;
}

Prf prf(const MatchCounts& c, double beta) {
    if (beta <= 0) throw ConfigError("prf: beta must be positive");
    Prf r;
    r.precision = (c.tp + c.fp) > 0 ? static_cast<double>(c.tp) / (c.tp + c.fp) : 0.0;
    r.recall = (c.tp + c.fn) > 0 ? static_cast<double>(c.tp) / (c.tp + c.fn) : 0.0;
    const double b2 = beta * beta;
    const double denom = b2 * r.precision + r.recall;
    r.f_measure = denom > 0 ? (1 + b2) * r.precision * r.recall / denom : 0.0;
    return r;
}

std::map<std::string, std::vector<Incident>> gt_incidents(
    const std::vector<Annotation>& annotations,
    const std::map<std::string, VideoMeta>& metadata, double default_fps) {
    std::map<std::string, std::pair<int, int>> span;  // video -> [first, last]
    for (const auto& a : annotations) {
        if (a.boxes.empty()) continue;
        auto it = span.find(a.video_id);
        if (it == span.end())
            span[a.video_id] = {a.frame_index, a.frame_index};
        else {
            it->second.first = std::min(it->second.first, a.frame_index);
            it->second.second = std::max(it->second.second, a.frame_index);
        }
    }
    std::map<std::string, std::vector<Incident>> out;
    for (const auto& [video, fr] : span) {
        auto mit = metadata.find(video);
        const double fps = mit != metadata.end() ? mit->second.fps : default_fps;
        out[video].push_back(Incident{video, fr.first / fps, fr.second / fps});
    }
    return out;
}

std::map<std::string, std::vector<Incident>> detection_incidents(
    const std::vector<FrameDetections>& dets,
    const std::map<std::string, VideoMeta>& metadata, double default_fps,
    double merge_gap_s) {
    std::map<std::string, std::vector<int>> frames;
    for (const auto& fd : dets)
        if (!fd.dets.empty()) frames[fd.video_id].push_back(fd.frame_index);
    std::map<std::string, std::vector<Incident>> out;
    for (auto& [video, fs_] : frames) {
        std::sort(fs_.begin(), fs_.end());
        auto mit = metadata.find(video);
        const double fps = mit != metadata.end() ? mit->second.fps : default_fps;
        std::vector<Incident> incs;
        for (int f : fs_) incs.push_back(Incident{video, f / fps, f / fps});
        out[video] = merge_incidents(std::move(incs), merge_gap_s);
    }
    return out;
}

EvalReport evaluate(const std::vector<FrameDetections>& dets,
                    const std::vector<Annotation>& annotations,
                    const std::map<std::string, VideoMeta>& metadata,
                    const Config& cfg) {
    EvalReport rep;
    rep.config_echo = cfg.describe();

    std::set<std::string> known;
    for (const auto& a : annotations) known.insert(a.video_id);

    // Index both sides per (video, frame).
    std::map<std::pair<std::string, int>, std::vector<Detection>> det_index;
    std::set<std::string> unknown;
    std::vector<FrameDetections> kept_dets;
    for (const auto& fd : dets) {
        if (!known.count(fd.video_id)) {
            unknown.insert(fd.video_id);
            continue;
        }
        auto& slot = det_index[{fd.video_id, fd.frame_index}];
        slot.insert(slot.end(), fd.dets.begin(), fd.dets.end());
        kept_dets.push_back(fd);
    }
    rep.unknown_videos.assign(unknown.begin(), unknown.end());

    const std::array<std::string, 4> axes = {"weather", "lighting", "resolution", "scene"};
    auto axis_value = [](const VideoMeta& m, const std::string& axis) -> std::string {
        if (axis == "weather") return m.weather;
        if (axis == "lighting") return m.lighting;
        if (axis == "resolution") return m.resolution;
        return m.scene;
    };

    std::map<std::string, std::map<std::string, MatchCounts>> axis_counts;
    std::map<std::pair<std::string, int>, bool> frame_seen;
    for (const auto& a : annotations) {
        auto it = det_index.find({a.video_id, a.frame_index});
        static const std::vector<Detection> none;
        const auto& frame_dets = it != det_index.end() ? it->second : none;
        const MatchCounts c = match_frame(frame_dets, a.boxes, cfg.eval_iou_thr);
        rep.counts += c;
        frame_seen[{a.video_id, a.frame_index}] = true;
        auto mit = metadata.find(a.video_id);
        if (mit != metadata.end()) {
            for (const auto& axis : axes) {
                const std::string v = axis_value(mit->second, axis);
                if (!v.empty()) axis_counts[axis][v] += c;
            }
        }
    }
    // Detections on annotated videos but unannotated frames are all FP.
    for (const auto& [key, frame_dets] : det_index) {
        if (frame_seen.count(key)) continue;
        MatchCounts c;
        c.fp = static_cast<long>(frame_dets.size());
        rep.counts += c;
        auto mit = metadata.find(key.first);
        if (mit != metadata.end()) {
            for (const auto& axis : axes) {
                const std::string v = axis_value(mit->second, axis);
                if (!v.empty()) axis_counts[axis][v] += c;
            }
        }
    }

    rep.scores = prf(rep.counts, cfg.eval_beta);

    const auto gts = gt_incidents(annotations, metadata, cfg.fps);
    const auto preds =
        detection_incidents(kept_dets, metadata, cfg.fps, cfg.incident_merge_gap_s);
    rep.tro = tro_dataset(preds, gts);

    for (const auto& [axis, values] : axis_counts) {
        for (const auto& [value, counts] : values) {
            EvalBreakdown bd;
            bd.counts = counts;
            bd.scores = prf(counts, cfg.eval_beta);
            // Per-group TRO over the videos carrying this axis value.
            std::map<std::string, std::vector<Incident>> gt_sub, pred_sub;
            for (const auto& [video, incs] : gts) {
                auto mit = metadata.find(video);
                if (mit != metadata.end() && axis_value(mit->second, axis) == value)
                    gt_sub[video] = incs;
            }
            for (const auto& [video, incs] : preds) {
                auto mit = metadata.find(video);
                if (mit != metadata.end() && axis_value(mit->second, axis) == value)
                    pred_sub[video] = incs;
            }
            bd.tro = tro_dataset(pred_sub, gt_sub);
            rep.breakdowns[axis][value] = bd;
        }
    }
    return rep;
}

namespace {

json prf_json(const MatchCounts& c, const Prf& s, double tro_v) {
    return json{{"tp", c.tp},
                {"fp", c.fp},
                {"fn", c.fn},
                {"precision", s.precision},
                {"recall", s.recall},
                {"f_measure", s.f_measure},
                {"tro", tro_v}};
}

}  // namespace

std::string report_to_json(const EvalReport& r) {
    json j = prf_json(r.counts, r.scores, r.tro);
    j["config"] = r.config_echo;
    j["tool_version"] = "fade 1.0.0";
    j["excluded_videos"] = r.unknown_videos;
    json bd = json::object();
    for (const auto& [axis, values] : r.breakdowns) {
        json ax = json::object();
        for (const auto& [value, b] : values)
            ax[value] = prf_json(b.counts, b.scores, b.tro);
        bd[axis] = ax;
    }
    j["breakdowns"] = bd;
    return j.dump(2) + "\n";
}

void write_detections_jsonl(const std::vector<FrameDetections>& dets,
                            const fs::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    for (const auto& fd : dets) {
        for (const auto& d : fd.dets) {
            json j{{"video", fd.video_id},
                   {"frame", fd.frame_index},
                   {"bbox", {d.box.xmin, d.box.ymin, d.box.xmax, d.box.ymax}},
                   {"score", d.score}};
            out << j.dump() << "\n";
        }
    }
}

std::vector<FrameDetections> read_detections_jsonl(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    std::map<std::pair<std::string, int>, std::vector<Detection>> index;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        json j;
        try {
            j = json::parse(line);
            Detection d;
            auto bb = j.at("bbox");
            if (bb.size() != 4) throw FormatError("bbox needs 4 numbers");
            d.box = Box{bb[0].get<double>(), bb[1].get<double>(), bb[2].get<double>(),
                        bb[3].get<double>()};
            d.score = j.at("score").get<double>();
            d.frame_index = j.at("frame").get<int>();
            index[{j.at("video").get<std::string>(), d.frame_index}].push_back(d);
        } catch (const json::exception& e) {
            throw FormatError("bad detection record at " + path.string() + ":" +
                              std::to_string(lineno) + ": " + e.what());
        }
    }
    std::vector<FrameDetections> out;
    for (auto& [key, ds] : index)
        out.push_back(FrameDetections{key.first, key.second, std::move(ds)});
    return out;
}

AreaStats area_stats_from_counts(const std::array<long, 5>& counts) {
    AreaStats s;
    s.counts = counts;
    for (long c : counts) s.total += c;
    if (s.total > 0)
        for (int i = 0; i < 5; ++i)
            s.proportions[i] = 100.0 * counts[i] / static_cast<double>(s.total);
    return s;
}

AreaStats area_stats(const std::vector<Annotation>& annotations) {
    static const double edges[4] = {25.0, 100.0, 225.0, 400.0};
    std::array<long, 5> counts{};
    std::vector<double> areas;
    for (const auto& a : annotations) {
        for (const auto& b : a.boxes) {
            const double area = b.area();
            int bin = 4;
            for (int i = 0; i < 4; ++i) {
                if (area <= edges[i]) {
                    bin = i;
                    break;
                }
            }
            ++counts[bin];
            areas.push_back(area);
        }
    }
    AreaStats s = area_stats_from_counts(counts);
    if (!areas.empty()) {
        std::sort(areas.begin(), areas.end());
        const std::size_t n = areas.size();
        s.median_area = n % 2 ? areas[n / 2] : 0.5 * (areas[n / 2 - 1] + areas[n / 2]);
    }
    return s;
}

SplitReport check_split(const std::map<std::string, VideoMeta>& metadata) {
    // scene -> split -> example videos, rainy videos exempt.
    std::map<std::string, std::map<std::string, std::vector<std::string>>> scenes;
    for (const auto& [video, m] : metadata) {
        if (m.scene.empty() || m.split.empty()) continue;
        if (m.weather == "rainy") continue;
        scenes[m.scene][m.split].push_back(video);
    }
    SplitReport rep;
    for (const auto& [scene, splits] : scenes) {
        if (splits.size() < 2) continue;
        rep.pass = false;
        std::string msg = "scene '" + scene + "' shared across splits:";
        for (const auto& [split, videos] : splits)
            msg += " " + split + "(" + videos.front() + ")";
        rep.violations.push_back(msg);
    }
    return rep;
}

}  // namespace fade
