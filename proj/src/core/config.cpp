#include "config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "errors.hpp"

namespace fade {

namespace {

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? "" : s.substr(b, e - b + 1);
}

double parse_num(const std::string& key, const std::string& v) {
    try {
        std::size_t pos;
        double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw ConfigError("config: key '" + key + "' expects a number, got '" + v + "'");
    }
}

int parse_int(const std::string& key, const std::string& v) {
    double d = parse_num(key, v);
    int i = static_cast<int>(d);
    if (d != i) throw ConfigError("config: key '" + key + "' expects an integer");
    return i;
}

bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw ConfigError("config: key '" + key + "' expects true/false");
}

std::vector<double> parse_list(const std::string& key, std::string v) {
    if (!v.empty() && v.front() == '[') {
        if (v.back() != ']') throw ConfigError("config: unterminated list for '" + key + "'");
        v = v.substr(1, v.size() - 2);
    }
    std::vector<double> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(parse_num(key, item));
    }
    if (out.empty()) throw ConfigError("config: empty list for '" + key + "'");
    return out;
}

std::string strip_quotes(const std::string& v) {
    if (v.size() >= 2 && ((v.front() == '"' && v.back() == '"') ||
                          (v.front() == '\'' && v.back() == '\'')))
        return v.substr(1, v.size() - 2);
    return v;
}

}  // namespace

std::vector<std::string> Config::known_keys() {
    return {
        "io.width", "io.height", "io.fps", "io.mode",
        "gmm.max_components", "gmm.history", "gmm.var_threshold", "gmm.var_init",
        "gmm.var_min", "gmm.var_max", "gmm.background_ratio", "gmm.complexity_prior",
        "mask.open_radius", "mask.min_area",
        "attention.enabled", "attention.weights",
        "smrpn.alpha", "smrpn.log_base", "smrpn.strides", "smrpn.stages",
        "smrpn.nms_thr", "smrpn.top_k", "smrpn.heads",
        "tracker.g", "tracker.min_track_len", "tracker.max_gap",
        "tracker.min_down_fraction", "tracker.max_link_dist",
        "pipeline.scoring", "pipeline.incident_merge_gap_s",
        "eval.iou_thr", "eval.beta",
    };
}

void Config::set(const std::string& key, const std::string& raw) {
    const std::string value = strip_quotes(trim(raw));
    if (key == "io.width") width = parse_int(key, value);
    else if (key == "io.height") height = parse_int(key, value);
    else if (key == "io.fps") fps = parse_num(key, value);
    else if (key == "io.mode") {
        if (value == "grayscale") grayscale = true;
        else if (value == "rgb") grayscale = false;
        else throw ConfigError("config: io.mode must be 'grayscale' or 'rgb'");
    }
    else if (key == "gmm.max_components") gmm.max_components = parse_int(key, value);
    else if (key == "gmm.history") gmm.history = parse_int(key, value);
    else if (key == "gmm.var_threshold") gmm.var_threshold = parse_num(key, value);
    else if (key == "gmm.var_init") gmm.var_init = parse_num(key, value);
    else if (key == "gmm.var_min") gmm.var_min = parse_num(key, value);
    else if (key == "gmm.var_max") gmm.var_max = parse_num(key, value);
    else if (key == "gmm.background_ratio") gmm.background_ratio = parse_num(key, value);
    else if (key == "gmm.complexity_prior") gmm.complexity_prior = parse_num(key, value);
    else if (key == "mask.open_radius") open_radius = parse_int(key, value);
    else if (key == "mask.min_area") min_area = parse_int(key, value);
    else if (key == "attention.enabled") attention_enabled = parse_bool(key, value);
    else if (key == "attention.weights") attention_weights = value;
    else if (key == "smrpn.alpha") smrpn_alpha = parse_num(key, value);
    else if (key == "smrpn.log_base") smrpn_log_base = parse_num(key, value);
    else if (key == "smrpn.strides") smrpn_strides = parse_list(key, value);
    else if (key == "smrpn.stages") smrpn_stages = parse_int(key, value);
    else if (key == "smrpn.nms_thr") smrpn_nms_thr = parse_num(key, value);
    else if (key == "smrpn.top_k") smrpn_top_k = parse_int(key, value);
    else if (key == "smrpn.heads") smrpn_heads = value;
    else if (key == "tracker.g") tracker.g = parse_num(key, value);
    else if (key == "tracker.min_track_len") tracker.min_track_len = parse_int(key, value);
    else if (key == "tracker.max_gap") tracker.max_gap = parse_int(key, value);
    else if (key == "tracker.min_down_fraction") tracker.min_down_fraction = parse_num(key, value);
    else if (key == "tracker.max_link_dist") tracker.max_link_dist = parse_num(key, value);
    else if (key == "pipeline.scoring") {
        if (value == "blob_direct") scoring = ScoringMode::BlobDirect;
        else if (value == "smrpn_refined") scoring = ScoringMode::SmrpnRefined;
        else throw ConfigError("config: pipeline.scoring must be 'blob_direct' or 'smrpn_refined'");
    }
    else if (key == "pipeline.incident_merge_gap_s") incident_merge_gap_s = parse_num(key, value);
    else if (key == "eval.iou_thr") eval_iou_thr = parse_num(key, value);
    else if (key == "eval.beta") eval_beta = parse_num(key, value);
    else {
        std::string msg = "config: unknown key '" + key + "'; valid keys:";
        for (const auto& k : known_keys()) msg += " " + k;
        throw ConfigError(msg);
    }
}

Config Config::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file " + path.string());
    Config cfg;
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("config: bad section header at line " +
                                  std::to_string(lineno));
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config: expected key = value at line " +
                              std::to_string(lineno));
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (!section.empty()) key = section + "." + key;
        cfg.set(key, value);
    }
    cfg.validate();
    return cfg;
}

void Config::validate() const {
    if (width < 1 || height < 1) throw ConfigError("io: resolution must be positive");
    if (fps <= 0) throw ConfigError("io: fps must be positive");
    gmm.validate();
    if (open_radius < 0) throw ConfigError("mask: open_radius must be >= 0");
    if (min_area < 1) throw ConfigError("mask: min_area must be >= 1");
    if (smrpn_alpha <= 0) throw ConfigError("smrpn: alpha must be positive");
    if (smrpn_stages < 1) throw ConfigError("smrpn: stages must be >= 1");
    if (smrpn_top_k < 0) throw ConfigError("smrpn: top_k must be >= 0");
    if (!(smrpn_nms_thr >= 0 && smrpn_nms_thr <= 1))
        throw ConfigError("smrpn: nms_thr must be in [0,1]");
    if (smrpn_strides.empty()) throw ConfigError("smrpn: strides must not be empty");
    for (double s : smrpn_strides)
        if (s <= 0) throw ConfigError("smrpn: strides must be positive");
    tracker.validate();
    if (incident_merge_gap_s < 0)
        throw ConfigError("pipeline: incident_merge_gap_s must be >= 0");
    if (!(eval_iou_thr >= 0 && eval_iou_thr < 1))
        throw ConfigError("eval: iou_thr must be in [0,1)");
    if (eval_beta <= 0) throw ConfigError("eval: beta must be positive");
    if (attention_enabled && attention_weights.empty())
        throw ConfigError("attention: enabled but attention.weights not set");
    if (attention_enabled && !std::filesystem::exists(attention_weights))
        throw ConfigError("attention: weights file not found: " + attention_weights);
    if (scoring == ScoringMode::SmrpnRefined && !smrpn_heads.empty() &&
        !std::filesystem::exists(smrpn_heads))
        throw ConfigError("smrpn: heads file not found: " + smrpn_heads);
}

std::string Config::defaults_listing() {
    const Config d;
    std::ostringstream os;
    os << "io.width = " << d.width << "\n"
       << "io.height = " << d.height << "\n"
       << "io.fps = " << d.fps << "\n"
       << "io.mode = grayscale\n"
       << "gmm.max_components = " << d.gmm.max_components << "\n"
       << "gmm.history = " << d.gmm.history << "\n"
       << "gmm.var_threshold = " << d.gmm.var_threshold << "\n"
       << "gmm.var_init = " << d.gmm.var_init << "\n"
       << "gmm.var_min = " << d.gmm.var_min << "\n"
       << "gmm.var_max = " << d.gmm.var_max << "\n"
       << "gmm.background_ratio = " << d.gmm.background_ratio << "\n"
       << "gmm.complexity_prior = " << d.gmm.complexity_prior << "\n"
       << "mask.open_radius = " << d.open_radius << "\n"
       << "mask.min_area = " << d.min_area << "\n"
       << "attention.enabled = false\n"
       << "attention.weights =\n"
       << "smrpn.alpha = " << d.smrpn_alpha << "\n"
       << "smrpn.log_base = e\n"
       << "smrpn.strides = 4,8,16,32,64\n"
       << "smrpn.stages = " << d.smrpn_stages << "\n"
       << "smrpn.nms_thr = " << d.smrpn_nms_thr << "\n"
       << "smrpn.top_k = " << d.smrpn_top_k << "\n"
       << "smrpn.heads =\n"
       << "tracker.g = " << d.tracker.g << "\n"
       << "tracker.min_track_len = " << d.tracker.min_track_len << "\n"
       << "tracker.max_gap = " << d.tracker.max_gap << "\n"
       << "tracker.min_down_fraction = " << d.tracker.min_down_fraction << "\n"
       << "tracker.max_link_dist = " << d.tracker.max_link_dist << "\n"
       << "pipeline.scoring = blob_direct\n"
       << "pipeline.incident_merge_gap_s = " << d.incident_merge_gap_s << "\n"
       << "eval.iou_thr = " << d.eval_iou_thr << "\n"
       << "eval.beta = " << d.eval_beta << "\n";
    return os.str();
}

std::string Config::describe() const {
    std::ostringstream os;
    os << "io.width=" << width << " io.height=" << height << " io.fps=" << fps
       << " io.mode=" << (grayscale ? "grayscale" : "rgb")
       << " gmm.var_threshold=" << gmm.var_threshold
       << " gmm.history=" << gmm.history
       << " mask.open_radius=" << open_radius << " mask.min_area=" << min_area
       << " smrpn.alpha=" << smrpn_alpha
       << " smrpn.log_base=" << (smrpn_log_base > 0 ? std::to_string(smrpn_log_base) : "e")
       << " pipeline.scoring="
       << (scoring == ScoringMode::BlobDirect ? "blob_direct" : "smrpn_refined")
       << " eval.iou_thr=" << eval_iou_thr << " eval.beta=" << eval_beta;
    return os.str();
}

}  // namespace fade
