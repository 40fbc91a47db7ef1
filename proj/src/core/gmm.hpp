#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "frame.hpp"

namespace fade {

// Binary foreground mask, 0 = background, 1 = foreground.
struct ForegroundMask {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> bits;

    std::uint8_t at(int x, int y) const {
        return bits[static_cast<std::size_t>(y) * width + x];
    }
    std::uint8_t& at(int x, int y) {
        return bits[static_cast<std::size_t>(y) * width + x];
    }
    std::size_t foreground_count() const;
};

ForegroundMask make_mask(int width, int height, std::uint8_t fill = 0);
Frame mask_to_frame(const ForegroundMask& m);  // 0/255 PGM-ready view

struct GmmParams {
    int max_components = 5;
    int history = 500;            // learning rate alpha = 1/history
    double var_threshold = 8.0;   // squared-Mahalanobis match cutoff, kept low
    double var_init = 225.0;
    double var_min = 4.0;
    double var_max = 5.0 * 225.0;
    double background_ratio = 0.9;   // cf
    double complexity_prior = 0.05;  // cT

    void validate() const;
};

struct GmmComponent {
    double weight = 0.0;
    double var = 0.0;
    std::array<double, 3> mean{};
};

// Per-pixel adaptive Gaussian mixture background model (Zivkovic update).
// Stateful, single writer; apply() must see frames of one video in order.
class GmmModel {
  public:
    GmmModel(const GmmParams& params, int width, int height, int channels);

    // Classifies against the pre-update mixture, then updates it.
    ForegroundMask apply(const Frame& f);

    // Mean of the highest-weight component per pixel.
    Frame background_image() const;

    long frame_count() const { return frame_count_; }
    const GmmParams& params() const { return params_; }
    int width() const { return width_; }
    int height() const { return height_; }
    int channels() const { return channels_; }

    // Test introspection: live components of one pixel, sorted by weight.
    std::span<const GmmComponent> components(int x, int y) const;

  private:
    GmmParams params_;
    int width_, height_, channels_;
    long frame_count_ = 0;
    std::vector<std::uint8_t> ncomp_;
    std::vector<GmmComponent> comp_;
};

}  // namespace fade
