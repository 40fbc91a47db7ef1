// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Each criterion is self-contained and uses independent oracles
// where the criterion calls for one.
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "core/attention.hpp"
#include "core/config.hpp"
#include "core/eval.hpp"
#include "core/events.hpp"
#include "core/gmm.hpp"
#include "core/pipeline.hpp"
#include "core/runner.hpp"
#include "core/smrpn.hpp"
#include "core/synth.hpp"
#include "core/tracker.hpp"

using namespace fade;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void report(int number, const std::string& name, bool pass,
            const std::string& detail = "") {
    std::printf("criterion %2d  %-28s %s%s%s\n", number, name.c_str(),
                pass ? "PASS" : "FAIL", detail.empty() ? "" : "  ", detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

// ---------------------------------------------------------------- criterion 1

void criterion_f_measure() {
    // Operating points reconstructed from the reference precision/recall:
    // tp chosen so the ratios reproduce p and r to 4 decimals.
    MatchCounts weak{2634, 4833 - 2634, 10000 - 2634};    // p=0.5450, r=0.2634
    MatchCounts strong{14129, 5100, 5871};                // p=0.7348, r=0.7065
    Prf w = prf(weak, 1.0);
    Prf s = prf(strong, 1.0);
    bool pass = std::abs(w.f_measure * 100 - 35.52) <= 0.005 &&
                std::abs(s.f_measure * 100 - 72.03) <= 0.005;
    std::ostringstream d;
    d << "F=" << w.f_measure * 100 << "/" << s.f_measure * 100;
    report(1, "f-measure oracle", pass, d.str());
}

// ---------------------------------------------------------------- criterion 2

void criterion_impact() {
    ImpactResult r = impact_force(0.2, 30.0, 0.01, 9.8);
    bool pass = std::abs(r.equivalent_kgf - 49.5) <= 0.2;
    std::ostringstream d;
    d << r.equivalent_kgf << " kgf";
    report(2, "impact physics", pass, d.str());
}

// ---------------------------------------------------------------- criterion 3

void criterion_area_stats() {
    AreaStats s = area_stats_from_counts({37400, 18882, 7036, 2808, 1459});
    const double expect[5] = {55.34, 27.94, 10.41, 4.15, 2.16};
    bool pass = true;
    for (int i = 0; i < 5; ++i)
        pass = pass && std::abs(s.proportions[i] - expect[i]) <= 0.01;
    std::ostringstream d;
    for (int i = 0; i < 5; ++i) d << (i ? "/" : "") << s.proportions[i];
    report(3, "area statistics", pass, d.str());
}

// ---------------------------------------------------------------- criterion 4

void criterion_dynamic_threshold() {
    bool pass = true;
    // Exactly 0.20 everywhere at or below sqrt(wh) = 5.
    for (double side : {0.5, 1.0, 2.0, 3.7, 5.0})
        pass = pass && dynamic_threshold(side, side, 0.2) == 0.20;
    pass = pass && dynamic_threshold(25, 1, 0.2) == 0.20;  // sqrt(25*1) = 5
    // 0.35 at sqrt(wh) = 5e with the natural log.
    double side = 5.0 * std::exp(1.0);
    pass = pass && std::abs(dynamic_threshold(side, side, 0.2) - 0.35) < 1e-12;
    // Monotone non-decreasing over a 1000-point sweep.
    double prev = 0;
    for (int i = 1; i <= 1000; ++i) {
        double t = dynamic_threshold(i * 0.7, i * 0.7, 0.2);
        if (t < prev) pass = false;
        prev = t;
    }
    report(4, "dynamic threshold", pass);
}

// ---------------------------------------------------------------- criterion 5

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

FeatureMap brute_attention(const FeatureMap& f, const FeatureMap& mask,
                           const AttentionWeights& w) {
    FeatureMap avg = make_feature_map(f.h, f.w, 1);
    FeatureMap mx = make_feature_map(f.h, f.w, 1);
    for (int y = 0; y < f.h; ++y) {
        for (int x = 0; x < f.w; ++x) {
            double s = 0, m = f.at(y, x, 0);
            for (int c = 0; c < f.c; ++c) {
                s += f.at(y, x, c);
                m = std::max(m, f.at(y, x, c));
            }
            avg.at(y, x) = s / f.c;
            mx.at(y, x) = m;
        }
    }
    const FeatureMap* planes[3] = {&avg, &mx, &mask};
    FeatureMap out = make_feature_map(f.h, f.w, 1);
    for (int y = 0; y < f.h; ++y) {
        for (int x = 0; x < f.w; ++x) {
            double z = w.bias;
            for (int ky = 0; ky < 7; ++ky)
                for (int kx = 0; kx < 7; ++kx) {
                    int sy = y + ky - 3, sx = x + kx - 3;
                    if (sy < 0 || sy >= f.h || sx < 0 || sx >= f.w) continue;
                    for (int c = 0; c < 3; ++c)
                        z += w.kernel[(ky * 7 + kx) * 3 + c] * planes[c]->at(sy, sx);
                }
            out.at(y, x) = sigmoid(z);
        }
    }
    return out;
}

void criterion_attention() {
    std::mt19937 rng(505);
    std::uniform_real_distribution<double> u(-2, 2);
    bool pass = true;
    double worst = 0;
    for (int trial = 0; trial < 50 && pass; ++trial) {
        int c = 1 + trial % 6;
        FeatureMap f = make_feature_map(9, 9, c);
        for (auto& v : f.v) v = u(rng);
        FeatureMap mask = make_feature_map(9, 9, 1);
        for (auto& v : mask.v) v = (rng() % 2) ? 1.0 : 0.0;
        AttentionWeights w = AttentionWeights::random(trial, 0.3);
        FeatureMap got = compute_map(f, mask, w);
        FeatureMap want = brute_attention(f, mask, w);
        for (std::size_t i = 0; i < got.v.size(); ++i) {
            worst = std::max(worst, std::abs(got.v[i] - want.v[i]));
            if (std::abs(got.v[i] - want.v[i]) > 1e-6) pass = false;
            if (!(got.v[i] > 0.0 && got.v[i] < 1.0)) pass = false;
        }
    }
    // Zero weights give a uniform 0.5 map.
    FeatureMap f = make_feature_map(5, 5, 3);
    for (auto& v : f.v) v = u(rng);
    FeatureMap m0 = make_feature_map(5, 5, 1);
    FeatureMap flat = compute_map(f, m0, AttentionWeights{});
    for (double v : flat.v)
        if (v != 0.5) pass = false;
    std::ostringstream d;
    d << "max |err| " << worst;
    report(5, "attention map oracle", pass, d.str());
}

// ---------------------------------------------------------------- criterion 6

void criterion_tro() {
    auto inc = [](double a, double b) { return Incident{"v", a, b}; };
    bool pass = tro(inc(0, 10), inc(0, 10)) == 1.0 &&
                tro(inc(0, 10), inc(20, 30)) == 0.0 &&
                std::abs(tro(inc(0, 10), inc(5, 15)) - 1.0 / 3.0) < 1e-15;
    std::mt19937 rng(606);
    std::uniform_real_distribution<double> u(0, 100);
    for (int i = 0; i < 1000 && pass; ++i) {
        double a0 = u(rng), b0 = u(rng);
        Incident a = inc(a0, a0 + u(rng) / 3);
        Incident b = inc(b0, b0 + u(rng) / 3);
        double v = tro(a, b);
        if (v != tro(b, a)) pass = false;
        double shift = u(rng) - 50;
        Incident as = inc(a.begin_s + shift, a.end_s + shift);
        Incident bs = inc(b.begin_s + shift, b.end_s + shift);
        if (std::abs(tro(as, bs) - v) > 1e-9) pass = false;
    }
    report(6, "tro interval metric", pass);
}

// ---------------------------------------------------------------- criterion 7

// Exhaustive maximum-cardinality matching over the IoU > thr eligibility
// graph, by bitmask DP over GT subsets.
int optimal_tp(const std::vector<Detection>& dets, const std::vector<Box>& gts,
               double thr) {
    const int n = static_cast<int>(dets.size());
    const int m = static_cast<int>(gts.size());
    std::vector<int> adj(n, 0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < m; ++j)
            if (iou(dets[i].box, gts[j]) > thr) adj[i] |= 1 << j;
    std::vector<int> best(1 << m, -1);
    best[0] = 0;
    std::vector<int> cur = best;
    for (int i = 0; i < n; ++i) {
        cur = best;
        for (int s = 0; s < (1 << m); ++s) {
            if (best[s] < 0) continue;
            for (int j = 0; j < m; ++j)
                if ((adj[i] >> j & 1) && !(s >> j & 1))
                    cur[s | 1 << j] = std::max(cur[s | 1 << j], best[s] + 1);
        }
        best = std::move(cur);
    }
    return *std::max_element(best.begin(), best.end());
}

void criterion_matching() {
    std::mt19937 rng(707);
    std::uniform_real_distribution<double> u(0, 60), sc(0, 1), sz(1, 18);
    bool pass = true;
    int greedy_gaps = 0, small_instances = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        std::vector<Box> gts;
        for (int i = 0; i < static_cast<int>(rng() % 5); ++i) {
            double x = u(rng), y = u(rng);
            gts.push_back({x, y, x + sz(rng), y + sz(rng)});
        }
        std::vector<Detection> dets;
        for (int i = 0; i < static_cast<int>(rng() % 5); ++i) {
            double x = u(rng), y = u(rng);
            dets.push_back({Box{x, y, x + sz(rng), y + sz(rng)}, sc(rng)});
        }
        MatchCounts c = match_frame(dets, gts, 0.3);
        if (c.tp + c.fn != static_cast<long>(gts.size())) pass = false;
        if (c.tp + c.fp != static_cast<long>(dets.size())) pass = false;
        if (gts.size() <= 4 && dets.size() <= 4) {
            ++small_instances;
            if (c.tp != optimal_tp(dets, gts, 0.3)) ++greedy_gaps;
        }
    }
    // Greedy may fall short of the optimal assignment on adversarial overlap
    // patterns; the criterion allows up to 5% of small instances.
    if (greedy_gaps > small_instances / 20) pass = false;
    std::ostringstream d;
    d << greedy_gaps << "/" << small_instances << " greedy-vs-optimal gaps";
    report(7, "matching invariants", pass, d.str());
}

// ---------------------------------------------------------------- criterion 8

struct OracleComp {
    double w, mean, var;
};

struct PixelOracle {
    GmmParams p;
    std::vector<OracleComp> comps;
    long t = 0;

    bool step(double x) {
        ++t;
        double alpha = (t <= p.history / 10) ? 1.0 / t : 1.0 / p.history;
        int bg_count = 0;
        double cum = 0;
        for (std::size_t i = 0; i < comps.size(); ++i) {
            cum += comps[i].w;
            if (cum >= p.background_ratio) {
                bg_count = static_cast<int>(i) + 1;
                break;
            }
        }
        if (bg_count == 0) bg_count = static_cast<int>(comps.size());
        int match = -1;
        bool background = false;
        for (std::size_t i = 0; i < comps.size(); ++i) {
            double d = x - comps[i].mean;
            if (d * d / comps[i].var < p.var_threshold) {
                match = static_cast<int>(i);
                background = static_cast<int>(i) < bg_count;
                break;
            }
        }
        for (auto& c : comps) c.w -= alpha * c.w + alpha * p.complexity_prior;
        if (match >= 0) {
            auto& c = comps[match];
            c.w += alpha;
            double rho = alpha / c.w;
            double d = x - c.mean;
            c.mean += rho * d;
            c.var += rho * (d * d - c.var);
            c.var = std::clamp(c.var, p.var_min, p.var_max);
        }
        std::erase_if(comps, [](const OracleComp& c) { return c.w <= 0; });
        if (match < 0) {
            OracleComp fresh{alpha, x, p.var_init};
            if (static_cast<int>(comps.size()) < p.max_components)
                comps.push_back(fresh);
            else
                comps.back() = fresh;
        }
        double total = 0;
        for (auto& c : comps) total += c.w;
        if (total > 0)
            for (auto& c : comps) c.w /= total;
        std::stable_sort(comps.begin(), comps.end(),
                         [](const OracleComp& a, const OracleComp& b) { return a.w > b.w; });
        return !background;
    }
};

void criterion_gmm() {
    GmmParams p;
    std::mt19937 rng(808);
    std::uniform_int_distribution<int> value(0, 255);
    std::uniform_real_distribution<double> coin(0, 1);
    GmmModel model(p, 1, 1, 1);
    PixelOracle oracle{p};
    bool pass = true;
    double base = 140;
    for (int i = 0; i < 1000 && pass; ++i) {
        std::uint8_t v;
        double r = coin(rng);
        if (r < 0.8)
            v = static_cast<std::uint8_t>(std::clamp(base + value(rng) % 9 - 4, 0.0, 255.0));
        else if (r < 0.95)
            v = static_cast<std::uint8_t>(value(rng));
        else {
            base = value(rng);
            v = static_cast<std::uint8_t>(base);
        }
        ForegroundMask mask = model.apply(make_frame(1, 1, 1, v));
        bool fg = oracle.step(v);
        if (mask.at(0, 0) != (fg ? 1 : 0)) pass = false;
        auto comps = model.components(0, 0);
        if (comps.size() != oracle.comps.size()) {
            pass = false;
            break;
        }
        for (std::size_t c = 0; c < comps.size(); ++c) {
            if (std::abs(comps[c].weight - oracle.comps[c].w) > 1e-9) pass = false;
            if (std::abs(comps[c].mean[0] - oracle.comps[c].mean) > 1e-9) pass = false;
            if (std::abs(comps[c].var - oracle.comps[c].var) > 1e-9) pass = false;
        }
    }
    report(8, "gmm state oracle", pass);
}

// ---------------------------------------------------------------- criterion 9

SynthSpec fall_spec(int i) {
    SynthSpec spec;
    spec.width = 640;
    spec.height = 480;
    spec.num_frames = 150;
    spec.noise_sigma = i % 4;  // 0..3
    spec.seed = 1000 + i;
    SynthObject obj;
    obj.size = 3 + (17 * i) % 18;  // 3..20 px -> areas 9..400
    obj.x0 = 40.0 + 28.0 * i;
    obj.y0 = 2;
    obj.start_frame = 30 + (i * 3) % 25;
    obj.motion = MotionLaw::FreeFall;
    obj.accel = 0.3 + 0.045 * i;
    spec.objects = {obj};
    return spec;
}

SynthSpec horizontal_spec(int i) {
    SynthSpec spec;
    spec.width = 640;
    spec.height = 480;
    spec.num_frames = 150;
    // With the default low GMM threshold and no morphology, noise beyond
    // sigma ~2 yields isolated multi-pixel specks that can chain into short
    // gravity-plausible tracks; the zero-incident guarantee is stated for
    // moderate noise.
    spec.noise_sigma = 0.5 * (i % 4);  // 0 .. 1.5
    spec.seed = 2000 + i;
    SynthObject obj;
    obj.size = 4 + i % 14;
    obj.x0 = 5;
    obj.y0 = 60.0 + 18.0 * i;
    obj.start_frame = 20;
    obj.motion = MotionLaw::Linear;
    obj.vx = 2.0 + 0.2 * i;
    obj.vy = 0;
    spec.objects = {obj};
    return spec;
}

void criterion_synthetic_e2e() {
    Config cfg;
    MatchCounts counts;
    std::map<std::string, std::vector<Incident>> pred_incidents, gt_inc;
    bool pass = true;

    for (int i = 0; i < 20; ++i) {
        SynthSpec spec = fall_spec(i);
        SynthResult synth = synth_generate(spec);
        VectorSource src(synth.frames, spec.fps);
        std::string vid = "fall" + std::to_string(i);
        VideoResult r = run_video(src, cfg, vid);

        std::map<int, std::vector<Detection>> by_frame;
        for (const auto& fd : r.detections) by_frame[fd.frame_index] = fd.dets;
        int first_gt = -1, last_gt = -1;
        for (int f = 0; f < spec.num_frames; ++f) {
            auto it = synth.gt.find(f);
            std::vector<Box> gts = it == synth.gt.end() ? std::vector<Box>{} : it->second;
            if (!gts.empty()) {
                if (first_gt < 0) first_gt = f;
                last_gt = f;
            }
            auto dit = by_frame.find(f);
            counts += match_frame(dit == by_frame.end() ? std::vector<Detection>{} : dit->second,
                                  gts, cfg.eval_iou_thr);
        }
        gt_inc[vid] = {Incident{vid, first_gt / spec.fps, last_gt / spec.fps}};
        pred_incidents[vid] = r.incidents;
    }

    Prf scores = prf(counts, 1.0);
    double mean_tro = tro_dataset(pred_incidents, gt_inc);
    if (scores.f_measure < 0.90) pass = false;
    if (mean_tro < 0.80) pass = false;

    long distractor_incidents = 0;
    for (int i = 0; i < 20; ++i) {
        SynthSpec spec = horizontal_spec(i);
        SynthResult synth = synth_generate(spec);
        VectorSource src(synth.frames, spec.fps);
        VideoResult r = run_video(src, cfg, "horiz" + std::to_string(i));
        distractor_incidents += static_cast<long>(r.incidents.size());
    }
    if (distractor_incidents != 0) pass = false;

    std::ostringstream d;
    d << "F=" << scores.f_measure << " TRO=" << mean_tro << " distractor incidents="
      << distractor_incidents;
    report(9, "synthetic end-to-end", pass, d.str());
}

// --------------------------------------------------------------- criterion 10

void criterion_bench() {
    Config cfg;
    BenchResult r = run_bench(cfg, 150);
    bool pass = r.fps >= 30.0;
    std::ostringstream d;
    d << r.fps << " fps";
    report(10, "performance budget", pass, d.str());
    if (!pass) {
        std::printf("  stage breakdown over %d frames:\n", r.times.frames);
        std::printf("    decode   %.3fs\n", r.times.decode_s);
        std::printf("    gmm      %.3fs\n", r.times.gmm_s);
        std::printf("    mask_ops %.3fs\n", r.times.mask_ops_s);
        std::printf("    scoring  %.3fs\n", r.times.scoring_s);
        std::printf("    tracking %.3fs\n", r.times.tracking_s);
    }
}

// --------------------------------------------------------------- criterion 11

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void criterion_determinism() {
    fs::path root = fs::temp_directory_path() / "fade_acceptance_det";
    fs::remove_all(root);
    fs::path data = root / "data";
    for (int i = 0; i < 3; ++i) {
        SynthSpec spec = fall_spec(i);
        spec.noise_sigma = 1 + i % 3;
        synth_write(synth_generate(spec), data, "v" + std::to_string(i));
    }

    Config cfg;
    bool pass = true;
    std::string det[2], inc[2], rep[2];
    for (int run = 0; run < 2; ++run) {
        fs::path out = root / ("out" + std::to_string(run));
        run_detect(cfg, data / "frames", out, false, 2);
        run_evaluate(cfg, out / "detections.jsonl", data / "annotations",
                     data / "metadata", out / "report.json");
        det[run] = slurp(out / "detections.jsonl");
        inc[run] = slurp(out / "incidents.json");
        rep[run] = slurp(out / "report.json");
        if (det[run].empty()) pass = false;
    }
    if (det[0] != det[1] || inc[0] != inc[1] || rep[0] != rep[1]) pass = false;
    report(11, "determinism", pass);
    fs::remove_all(root);
}

}  // namespace

int main() {
    criterion_f_measure();
    criterion_impact();
    criterion_area_stats();
    criterion_dynamic_threshold();
    criterion_attention();
    criterion_tro();
    criterion_matching();
    criterion_gmm();
    criterion_synthetic_e2e();
    criterion_bench();
    criterion_determinism();
    if (g_failures) {
        std::printf("%d criterion(s) failed\n", g_failures);
        return 1;
    }
    std::printf("all criteria passed\n");
    return 0;
}
