#include "fade/fade.h"

#include <cstring>
#include <string>

#include "../core/config.hpp"
#include "../core/errors.hpp"
#include "../core/events.hpp"
#include "../core/runner.hpp"
#include "../core/smrpn.hpp"
#include "../core/synth.hpp"
#include "../core/tracker.hpp"

namespace {

thread_local std::string g_last_error;

void copy_out(const std::string& s, char* buf, size_t cap) {
    if (!buf || cap == 0) return;
    const size_t n = std::min(s.size(), cap - 1);
    std::memcpy(buf, s.data(), n);
    buf[n] = '\0';
}

fade_status to_status(std::exception_ptr ep) {
    try {
        std::rethrow_exception(ep);
    } catch (const fade::SplitError& e) {
        g_last_error = e.what();
        return FADE_ERR_SPLIT;
    } catch (const fade::ConfigError& e) {
        g_last_error = e.what();
        return FADE_ERR_CONFIG;
    } catch (const fade::FormatError& e) {
        g_last_error = e.what();
        return FADE_ERR_CONFIG;
    } catch (const fade::IoError& e) {
        g_last_error = e.what();
        return FADE_ERR_IO;
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return FADE_ERR;
    } catch (...) {
        g_last_error = "unknown error";
        return FADE_ERR;
    }
}

template <typename F>
fade_status guarded(F&& fn) {
    try {
        fn();
        g_last_error.clear();
        return FADE_OK;
    } catch (...) {
        return to_status(std::current_exception());
    }
}

}  // namespace

struct fade_config {
    fade::Config cfg;
};

extern "C" {

const char* fade_version(void) { return "1.0.0"; }

const char* fade_last_error(void) { return g_last_error.c_str(); }

fade_status fade_config_create(fade_config** out) {
    return guarded([&] {
        if (!out) throw fade::ConfigError("null output pointer");
        *out = new fade_config{fade::Config::defaults()};
    });
}

fade_status fade_config_load(const char* path, fade_config** out) {
    return guarded([&] {
        if (!out || !path) throw fade::ConfigError("null argument");
        *out = new fade_config{fade::Config::load(path)};
    });
}

fade_status fade_config_set(fade_config* cfg, const char* key, const char* value) {
    return guarded([&] {
        if (!cfg || !key || !value) throw fade::ConfigError("null argument");
        cfg->cfg.set(key, value);
        cfg->cfg.validate();
    });
}

void fade_config_destroy(fade_config* cfg) { delete cfg; }

const char* fade_config_keys(void) {
    static const std::string listing = fade::Config::defaults_listing();
    return listing.c_str();
}

fade_status fade_detect(const fade_config* cfg, const char* input_dir,
                        const char* out_dir, int dump_masks, int threads) {
    return guarded([&] {
        if (!cfg || !input_dir || !out_dir) throw fade::ConfigError("null argument");
        fade::run_detect(cfg->cfg, input_dir, out_dir, dump_masks != 0,
                         threads > 0 ? threads : 1);
    });
}

fade_status fade_evaluate(const fade_config* cfg, const char* detections_path,
                          const char* annotations_dir, const char* metadata_dir,
                          const char* report_path, char* summary, size_t summary_cap) {
    return guarded([&] {
        if (!cfg || !detections_path || !annotations_dir)
            throw fade::ConfigError("null argument");
        auto rep = fade::run_evaluate(cfg->cfg, detections_path, annotations_dir,
                                      metadata_dir ? metadata_dir : "",
                                      report_path ? report_path : "");
        copy_out(fade::summary_line(rep), summary, summary_cap);
    });
}

fade_status fade_stats(const fade_config* cfg, const char* annotations_dir,
                       const char* metadata_dir, char* out_json, size_t out_cap) {
    fade::StatsResult res;
    const fade_status st = guarded([&] {
        if (!cfg || !annotations_dir) throw fade::ConfigError("null argument");
        res = fade::run_stats(cfg->cfg, annotations_dir,
                              metadata_dir ? metadata_dir : "");
    });
    if (st != FADE_OK) return st;
    copy_out(res.json, out_json, out_cap);
    if (res.split_checked && !res.split.pass) {
        g_last_error = "split check failed";
        for (const auto& v : res.split.violations) g_last_error += "; " + v;
        return FADE_ERR_SPLIT;
    }
    return FADE_OK;
}

fade_status fade_mask_dump(const fade_config* cfg, const char* input_dir,
                           const char* out_dir) {
    return guarded([&] {
        if (!cfg || !input_dir || !out_dir) throw fade::ConfigError("null argument");
        fade::run_mask_dump(cfg->cfg, input_dir, out_dir);
    });
}

fade_status fade_bench(const fade_config* cfg, int frames, fade_bench_result* out) {
    return guarded([&] {
        if (!cfg || !out || frames < 1) throw fade::ConfigError("bad bench arguments");
        auto res = fade::run_bench(cfg->cfg, frames);
        out->fps = res.fps;
        out->decode_s = res.times.decode_s;
        out->gmm_s = res.times.gmm_s;
        out->mask_ops_s = res.times.mask_ops_s;
        out->scoring_s = res.times.scoring_s;
        out->tracking_s = res.times.tracking_s;
        out->frames = res.times.frames;
    });
}

fade_status fade_synth(const char* spec_json_path, const char* out_dir,
                       const char* video_id) {
    return guarded([&] {
        if (!spec_json_path || !out_dir) throw fade::ConfigError("null argument");
        auto spec = fade::synth_spec_from_json(spec_json_path);
        auto res = fade::synth_generate(spec);
        fade::synth_write(res, out_dir, video_id ? video_id : "synthetic");
    });
}

fade_status fade_impact_force(double mass_kg, double height_m, double duration_s,
                              double g, double* newtons, double* kgf) {
    return guarded([&] {
        if (!newtons || !kgf) throw fade::ConfigError("null output pointer");
        auto r = fade::impact_force(mass_kg, height_m, duration_s, g);
        *newtons = r.force_newtons;
        *kgf = r.equivalent_kgf;
    });
}

fade_status fade_dynamic_threshold(double w, double h, double alpha,
                                   double log_base, double* out) {
    return guarded([&] {
        if (!out) throw fade::ConfigError("null output pointer");
        *out = fade::dynamic_threshold(w, h, alpha, log_base);
    });
}

fade_status fade_tro(double pred_begin, double pred_end, double gt_begin,
                     double gt_end, double* out) {
    return guarded([&] {
        if (!out) throw fade::ConfigError("null output pointer");
        *out = fade::tro(fade::Incident{"", pred_begin, pred_end},
                         fade::Incident{"", gt_begin, gt_end});
    });
}

}  // extern "C"
