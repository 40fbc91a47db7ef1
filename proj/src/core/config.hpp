#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "gmm.hpp"
#include "smrpn.hpp"
#include "tracker.hpp"

namespace fade {

enum class ScoringMode { BlobDirect, SmrpnRefined };

// Whole-toolkit configuration, loadable from a TOML-style key/value file.
struct Config {
    // [io]
    int width = 640;
    int height = 480;
    double fps = 30.0;
    bool grayscale = true;

    // [gmm]
    GmmParams gmm;

    // [mask]
    int open_radius = 0;  // opening disabled by default: it deletes tiny movers
    int min_area = 2;

    // [attention]
    bool attention_enabled = false;
    std::string attention_weights;

    // [smrpn]
    double smrpn_alpha = 0.2;
    double smrpn_log_base = 0.0;  // 0 = natural log
    std::vector<double> smrpn_strides = {4, 8, 16, 32, 64};
    int smrpn_stages = 1;
    double smrpn_nms_thr = 0.5;
    int smrpn_top_k = 100;
    std::string smrpn_heads;

    // [tracker]
    FallPhysicsParams tracker;

    // [pipeline]
    ScoringMode scoring = ScoringMode::BlobDirect;
    double incident_merge_gap_s = 0.5;

    // [eval]
    double eval_iou_thr = 0.3;
    double eval_beta = 1.0;

    void validate() const;

    // "section.key" addressing; unknown keys raise ConfigError naming the
    // valid key set.
    void set(const std::string& key, const std::string& value);

    static Config load(const std::filesystem::path& path);
    static Config defaults() { return Config{}; }
    static std::vector<std::string> known_keys();
    static std::string defaults_listing();  // "key = default" lines

    std::string describe() const;  // config echo for reports
};

}  // namespace fade
