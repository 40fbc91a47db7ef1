#include "attention.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>

#include <nlohmann/json.hpp>

#include "errors.hpp"

namespace fade {

namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

constexpr int kPad = kAttentionKernelSize / 2;

// Pre-sigmoid response at one output position over the 3 stacked planes.
double conv_at(const FeatureMap& avg, const FeatureMap& mx, const FeatureMap& mask,
               const AttentionWeights& w, int y, int x) {
    double z = w.bias;
    const FeatureMap* planes[3] = {&avg, &mx, &mask};
    int k = 0;
    for (int ky = 0; ky < kAttentionKernelSize; ++ky) {
        const int sy = y + ky - kPad;
        for (int kx = 0; kx < kAttentionKernelSize; ++kx) {
            const int sx = x + kx - kPad;
            const bool inside = sy >= 0 && sy < avg.h && sx >= 0 && sx < avg.w;
            for (int c = 0; c < 3; ++c, ++k) {
                if (inside) z += w.kernel[k] * planes[c]->at(sy, sx);
            }
        }
    }
    return z;
}

}  // namespace

FeatureMap make_feature_map(int h, int w, int c, double fill) {
    if (h < 1 || w < 1 || c < 1) throw ConfigError("invalid feature map shape");
    FeatureMap f;
    f.h = h;
    f.w = w;
    f.c = c;
    f.v.assign(static_cast<std::size_t>(h) * w * c, fill);
    return f;
}

FeatureMap frame_to_feature_map(const Frame& fr) {
    FeatureMap f = make_feature_map(fr.height, fr.width, fr.channels);
    for (std::size_t i = 0; i < fr.pixels.size(); ++i) f.v[i] = fr.pixels[i] / 255.0;
    return f;
}

AttentionWeights AttentionWeights::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open attention weights " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError("bad attention weights " + path.string() + ": " + e.what());
    }
    AttentionWeights w;
    auto k = j.at("kernel");
    if (k.size() != kAttentionKernelCoeffs)
        throw FormatError("attention kernel must have 147 coefficients");
    for (int i = 0; i < kAttentionKernelCoeffs; ++i) w.kernel[i] = k[i].get<double>();
    w.bias = j.at("bias").get<double>();
    return w;
}

void AttentionWeights::save(const std::filesystem::path& path) const {
    nlohmann::json j;
    j["kernel"] = kernel;
    j["bias"] = bias;
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out << j.dump(2) << "\n";
}

AttentionWeights AttentionWeights::random(std::uint64_t seed, double scale) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-scale, scale);
    AttentionWeights w;
    for (auto& k : w.kernel) k = u(rng);
    w.bias = u(rng);
    return w;
}

std::pair<FeatureMap, FeatureMap> channel_pool(const FeatureMap& f) {
    FeatureMap avg = make_feature_map(f.h, f.w, 1);
    FeatureMap mx = make_feature_map(f.h, f.w, 1);
    for (int y = 0; y < f.h; ++y) {
        for (int x = 0; x < f.w; ++x) {
            double s = 0.0, m = f.at(y, x, 0);
            for (int c = 0; c < f.c; ++c) {
                double v = f.at(y, x, c);
                s += v;
                m = std::max(m, v);
            }
            avg.at(y, x) = s / f.c;
            mx.at(y, x) = m;
        }
    }
    return {std::move(avg), std::move(mx)};
}

FeatureMap resize_mask(const ForegroundMask& m, int out_h, int out_w) {
    FeatureMap out = make_feature_map(out_h, out_w, 1);
    const double sx = static_cast<double>(m.width) / out_w;
    const double sy = static_cast<double>(m.height) / out_h;
    for (int y = 0; y < out_h; ++y) {
        const double y0 = y * sy, y1 = (y + 1) * sy;
        for (int x = 0; x < out_w; ++x) {
            const double x0 = x * sx, x1 = (x + 1) * sx;
            // Exact fractional-coverage average over the source rectangle.
            double sum = 0.0;
            for (int iy = static_cast<int>(y0); iy < m.height && iy < y1; ++iy) {
                const double hy = std::min<double>(iy + 1, y1) - std::max<double>(iy, y0);
                for (int ix = static_cast<int>(x0); ix < m.width && ix < x1; ++ix) {
                    if (!m.at(ix, iy)) continue;
                    const double wx = std::min<double>(ix + 1, x1) - std::max<double>(ix, x0);
                    sum += hy * wx;
                }
            }
            out.at(y, x) = sum / (sx * sy);
        }
    }
    return out;
}

FeatureMap compute_map(const FeatureMap& f, const FeatureMap& mask_resized,
                       const AttentionWeights& w) {
    if (mask_resized.h != f.h || mask_resized.w != f.w || mask_resized.c != 1)
        throw ConfigError("compute_map: mask plane shape mismatch");
    auto [avg, mx] = channel_pool(f);
    FeatureMap map = make_feature_map(f.h, f.w, 1);
    for (int y = 0; y < f.h; ++y)
        for (int x = 0; x < f.w; ++x)
            map.at(y, x) = sigmoid(conv_at(avg, mx, mask_resized, w, y, x));
    return map;
}

FeatureMap apply_attention(const FeatureMap& f, const FeatureMap& map) {
    if (map.h != f.h || map.w != f.w || map.c != 1)
        throw ConfigError("apply_attention: map shape mismatch");
    FeatureMap out = f;
    for (int y = 0; y < f.h; ++y)
        for (int x = 0; x < f.w; ++x)
            for (int c = 0; c < f.c; ++c) out.at(y, x, c) = f.at(y, x, c) * map.at(y, x);
    return out;
}

std::pair<std::array<double, kAttentionKernelCoeffs>, double> attention_grad(
    const FeatureMap& f, const FeatureMap& mask_resized, const AttentionWeights& w,
    const FeatureMap& upstream) {
    auto [avg, mx] = channel_pool(f);
    const FeatureMap* planes[3] = {&avg, &mx, &mask_resized};
    std::array<double, kAttentionKernelCoeffs> dk{};
    double db = 0.0;
    for (int y = 0; y < f.h; ++y) {
        for (int x = 0; x < f.w; ++x) {
            const double s = sigmoid(conv_at(avg, mx, mask_resized, w, y, x));
            const double g = upstream.at(y, x) * s * (1.0 - s);
            db += g;
            int k = 0;
            for (int ky = 0; ky < kAttentionKernelSize; ++ky) {
                const int sy = y + ky - kPad;
                for (int kx = 0; kx < kAttentionKernelSize; ++kx) {
                    const int sx = x + kx - kPad;
                    const bool inside = sy >= 0 && sy < f.h && sx >= 0 && sx < f.w;
                    for (int c = 0; c < 3; ++c, ++k) {
                        if (inside) dk[k] += g * planes[c]->at(sy, sx);
                    }
                }
            }
        }
    }
    return {dk, db};
}

}  // namespace fade
