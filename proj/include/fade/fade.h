/* Falling-object detection toolkit: C API over the C++ core.
 *
 * All functions return a fade_status; on failure fade_last_error() holds a
 * thread-local message. Handles are opaque and must be released with their
 * destroy function.
 */
#ifndef FADE_FADE_H
#define FADE_FADE_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum fade_status {
    FADE_OK = 0,
    FADE_ERR = 1,        /* unexpected failure */
    FADE_ERR_CONFIG = 2, /* bad config / parameters / input schema */
    FADE_ERR_IO = 3,     /* filesystem or decode failure */
    FADE_ERR_SPLIT = 4   /* dataset split check failed */
} fade_status;

typedef struct fade_config fade_config;

const char* fade_version(void);
const char* fade_last_error(void);

fade_status fade_config_create(fade_config** out);
fade_status fade_config_load(const char* path, fade_config** out);
/* key is "section.key", e.g. "gmm.var_threshold". */
fade_status fade_config_set(fade_config* cfg, const char* key, const char* value);
void fade_config_destroy(fade_config* cfg);

/* Newline-separated "key = default" listing of every config key. */
const char* fade_config_keys(void);

/* Detection over input_dir (a frame directory, or a directory of per-video
 * frame directories). Writes detections.jsonl and incidents.json under
 * out_dir; PGM masks under out_dir/masks/ when dump_masks is nonzero. */
fade_status fade_detect(const fade_config* cfg, const char* input_dir,
                        const char* out_dir, int dump_masks, int threads);

/* Evaluates a detections.jsonl against VOC annotations; writes the report
 * JSON and fills summary (if non-NULL) with "P=... R=... F=... TRO=...". */
fade_status fade_evaluate(const fade_config* cfg, const char* detections_path,
                          const char* annotations_dir, const char* metadata_dir,
                          const char* report_path, char* summary,
                          size_t summary_cap);

/* Area histogram, median area, and split check; the JSON goes into out_json.
 * Returns FADE_ERR_SPLIT when scene splits overlap. */
fade_status fade_stats(const fade_config* cfg, const char* annotations_dir,
                       const char* metadata_dir, char* out_json, size_t out_cap);

/* Foreground masks only, one PGM per frame under out_dir/<video>/. */
fade_status fade_mask_dump(const fade_config* cfg, const char* input_dir,
                           const char* out_dir);

typedef struct fade_bench_result {
    double fps;
    double decode_s;
    double gmm_s;
    double mask_ops_s;
    double scoring_s;
    double tracking_s;
    int frames;
} fade_bench_result;

/* Full default pipeline on an in-memory synthetic video. */
fade_status fade_bench(const fade_config* cfg, int frames, fade_bench_result* out);

/* Synthetic video + VOC ground truth from a JSON spec. */
fade_status fade_synth(const char* spec_json_path, const char* out_dir,
                       const char* video_id);

/* Scalar helpers. */
fade_status fade_impact_force(double mass_kg, double height_m, double duration_s,
                              double g, double* newtons, double* kgf);
/* log_base <= 0 selects the natural log. */
fade_status fade_dynamic_threshold(double w, double h, double alpha,
                                   double log_base, double* out);
/* Time-range overlap of [pred_begin, pred_end] and [gt_begin, gt_end]. */
fade_status fade_tro(double pred_begin, double pred_end, double gt_begin,
                     double gt_end, double* out);

#ifdef __cplusplus
}
#endif

#endif /* FADE_FADE_H */
