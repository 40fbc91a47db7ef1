#include "gmm.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "errors.hpp"

namespace fade {

std::size_t ForegroundMask::foreground_count() const {
    return static_cast<std::size_t>(
        std::count(bits.begin(), bits.end(), std::uint8_t{1}));
}

ForegroundMask make_mask(int width, int height, std::uint8_t fill) {
    ForegroundMask m;
    m.width = width;
    m.height = height;
    m.bits.assign(static_cast<std::size_t>(width) * height, fill);
    return m;
}

Frame mask_to_frame(const ForegroundMask& m) {
    Frame f = make_frame(m.width, m.height, 1);
    for (std::size_t i = 0; i < m.bits.size(); ++i)
        f.pixels[i] = m.bits[i] ? 255 : 0;
    return f;
}

void GmmParams::validate() const {
    if (max_components < 1) throw ConfigError("gmm: max_components must be >= 1");
    if (history < 1) throw ConfigError("gmm: history must be >= 1");
    if (var_threshold <= 0) throw ConfigError("gmm: var_threshold must be positive");
    if (!(var_min <= var_init && var_init <= var_max))
        throw ConfigError("gmm: need var_min <= var_init <= var_max");
    if (!(background_ratio > 0 && background_ratio < 1))
        throw ConfigError("gmm: background_ratio must be in (0,1)");
    if (complexity_prior < 0) throw ConfigError("gmm: complexity_prior must be >= 0");
}

GmmModel::GmmModel(const GmmParams& params, int width, int height, int channels)
    : params_(params), width_(width), height_(height), channels_(channels) {
    params_.validate();
    if (width < 1 || height < 1 || (channels != 1 && channels != 3))
        throw ConfigError("gmm: invalid frame shape");
    const std::size_t n = static_cast<std::size_t>(width) * height;
    ncomp_.assign(n, 0);
    comp_.assign(n * params_.max_components, GmmComponent{});
}

ForegroundMask GmmModel::apply(const Frame& f) {
    if (f.width != width_ || f.height != height_ || f.channels != channels_)
        throw ConfigError("gmm: frame shape mismatch");

    ++frame_count_;
    // Warm-up: boosted learning rate for the first history/10 frames.
    const double alpha = (frame_count_ <= params_.history / 10)
                             ? 1.0 / static_cast<double>(frame_count_)
                             : 1.0 / static_cast<double>(params_.history);
    const double ct = params_.complexity_prior;
    const int maxc = params_.max_components;
    const int ch = channels_;

    ForegroundMask mask = make_mask(width_, height_);
    const std::size_t npix = static_cast<std::size_t>(width_) * height_;

    for (std::size_t p = 0; p < npix; ++p) {
        GmmComponent* comps = comp_.data() + p * maxc;
        int n = ncomp_[p];
        const std::uint8_t* px = f.pixels.data() + p * ch;

        // Background component count: smallest prefix reaching cf total weight.
        int bg_count = 0;
        double cum = 0.0;
        for (int i = 0; i < n; ++i) {
            cum += comps[i].weight;
            if (cum >= params_.background_ratio) {
                bg_count = i + 1;
                break;
            }
        }
        if (bg_count == 0) bg_count = n;

        // Match = squared Mahalanobis distance below var_threshold.
        int match = -1;
        bool background = false;
        for (int i = 0; i < n; ++i) {
            double d2 = 0.0;
            for (int c = 0; c < ch; ++c) {
                double d = px[c] - comps[i].mean[c];
                d2 += d * d;
            }
            if (d2 / comps[i].var < params_.var_threshold) {
                match = i;
                background = i < bg_count;
                break;
            }
        }
        if (!background) mask.bits[p] = 1;

        // Weight decay plus complexity prior for every component.
        for (int i = 0; i < n; ++i)
            comps[i].weight -= alpha * comps[i].weight + alpha * ct;

        if (match >= 0) {
            GmmComponent& m = comps[match];
            m.weight += alpha;
            if (m.weight > 0) {
                const double rho = alpha / m.weight;
                double d2 = 0.0;
                for (int c = 0; c < ch; ++c) {
                    double d = px[c] - m.mean[c];
                    m.mean[c] += rho * d;
                    d2 += d * d;
                }
                m.var += rho * (d2 / ch - m.var);
                m.var = std::clamp(m.var, params_.var_min, params_.var_max);
            }
        }

        // Prune dead components.
        int keep = 0;
        for (int i = 0; i < n; ++i) {
            if (comps[i].weight > 0) comps[keep++] = comps[i];
        }
        n = keep;

        if (match < 0) {
            GmmComponent fresh;
            fresh.weight = alpha;
            fresh.var = params_.var_init;
            for (int c = 0; c < ch; ++c) fresh.mean[c] = px[c];
            if (n < maxc)
                comps[n++] = fresh;
            else
                comps[n - 1] = fresh;  // replace the weakest (sorted tail)
        }

        double total = 0.0;
        for (int i = 0; i < n; ++i) total += comps[i].weight;
        if (total > 0) {
            for (int i = 0; i < n; ++i) comps[i].weight /= total;
        }

        std::stable_sort(comps, comps + n, [](const GmmComponent& a, const GmmComponent& b) {
            return a.weight > b.weight;
        });
        ncomp_[p] = static_cast<std::uint8_t>(n);
    }
    return mask;
}

Frame GmmModel::background_image() const {
    if (frame_count_ < 1) throw Error("gmm: background image requested before any frame");
    Frame out = make_frame(width_, height_, channels_);
    const std::size_t npix = static_cast<std::size_t>(width_) * height_;
    for (std::size_t p = 0; p < npix; ++p) {
        const GmmComponent* comps = comp_.data() + p * params_.max_components;
        for (int c = 0; c < channels_; ++c) {
            double v = ncomp_[p] > 0 ? comps[0].mean[c] : 0.0;
            out.pixels[p * channels_ + c] =
                static_cast<std::uint8_t>(std::clamp(std::floor(v + 0.5), 0.0, 255.0));
        }
    }
    return out;
}

std::span<const GmmComponent> GmmModel::components(int x, int y) const {
    const std::size_t p = static_cast<std::size_t>(y) * width_ + x;
    return {comp_.data() + p * params_.max_components, static_cast<std::size_t>(ncomp_[p])};
}

}  // namespace fade
