#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <utility>
#include <vector>

#include "gmm.hpp"

namespace fade {

// Dense H x W x C feature map, channel-interleaved.
struct FeatureMap {
    int h = 0, w = 0, c = 0;
    std::vector<double> v;

    double at(int y, int x, int ch = 0) const {
        return v[(static_cast<std::size_t>(y) * w + x) * c + ch];
    }
    double& at(int y, int x, int ch = 0) {
        return v[(static_cast<std::size_t>(y) * w + x) * c + ch];
    }
};

FeatureMap make_feature_map(int h, int w, int c, double fill = 0.0);
FeatureMap frame_to_feature_map(const Frame& f);  // intensities scaled to [0,1]

inline constexpr int kAttentionKernelSize = 7;
inline constexpr int kAttentionKernelCoeffs = 7 * 7 * 3;

// 7x7x3 -> 1 convolution weights, (ky, kx, cin) order, plus scalar bias.
struct AttentionWeights {
    std::array<double, kAttentionKernelCoeffs> kernel{};
    double bias = 0.0;

    static AttentionWeights load(const std::filesystem::path& json_path);
    static AttentionWeights random(std::uint64_t seed, double scale = 0.1);
    void save(const std::filesystem::path& json_path) const;
};

// Per-position mean and max across the channel axis.
std::pair<FeatureMap, FeatureMap> channel_pool(const FeatureMap& f);

// Binary mask scaled to feature resolution by exact area averaging.
FeatureMap resize_mask(const ForegroundMask& m, int out_h, int out_w);

// sigmoid(conv7x7([avg, max, mask]) + bias), zero padding 3, stride 1.
// Output is H x W x 1 with values strictly in (0,1).
FeatureMap compute_map(const FeatureMap& f, const FeatureMap& mask_resized,
                       const AttentionWeights& w);

// Elementwise multiply, map broadcast across all channels.
FeatureMap apply_attention(const FeatureMap& f, const FeatureMap& map);

// Gradient of sum(upstream .* MAP) with respect to kernel and bias. Training
// is out of scope; this backs the finite-difference check.
std::pair<std::array<double, kAttentionKernelCoeffs>, double> attention_grad(
    const FeatureMap& f, const FeatureMap& mask_resized, const AttentionWeights& w,
    const FeatureMap& upstream);

}  // namespace fade
