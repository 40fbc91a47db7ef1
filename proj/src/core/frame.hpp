#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace fade {

// One decoded video frame, 8-bit, interleaved row-major.
struct Frame {
    int width = 0;
    int height = 0;
    int channels = 1;  // 1 (gray) or 3 (RGB)
    std::vector<std::uint8_t> pixels;
    int index = 0;
    double timestamp_s = 0.0;

    std::uint8_t at(int x, int y, int c = 0) const {
        return pixels[(static_cast<std::size_t>(y) * width + x) * channels + c];
    }
    std::uint8_t& at(int x, int y, int c = 0) {
        return pixels[(static_cast<std::size_t>(y) * width + x) * channels + c];
    }
    bool same_shape(const Frame& o) const {
        return width == o.width && height == o.height && channels == o.channels;
    }
};

Frame make_frame(int width, int height, int channels, std::uint8_t fill = 0);

// gray = 0.299 R + 0.587 G + 0.114 B, rounded half-up. Grayscale input is
// returned unchanged.
Frame to_grayscale(const Frame& f);

// Bilinear resampling with half-pixel centers; 8-bit output rounded half-up.
Frame resize(const Frame& f, int out_w, int out_h);

// Image file I/O: binary PGM (P5), PPM (P6), 8-bit PNG.
Frame load_image(const std::filesystem::path& path);
void save_pgm(const Frame& f, const std::filesystem::path& path);
void save_ppm(const Frame& f, const std::filesystem::path& path);
// Dispatches on channel count (1 -> PGM, 3 -> PPM).
void save_image(const Frame& f, const std::filesystem::path& path);

enum class ColorMode { RGB, Grayscale };

class FrameSource {
  public:
    virtual ~FrameSource() = default;
    virtual std::optional<Frame> next() = 0;
    virtual double fps() const = 0;
};

// Frames from a directory of images, indexed in sorted filename order.
class SequenceSource : public FrameSource {
  public:
    SequenceSource(const std::filesystem::path& dir, double fps,
                   ColorMode mode = ColorMode::Grayscale);

    std::optional<Frame> next() override;
    double fps() const override { return fps_; }
    std::size_t size() const { return files_.size(); }

  private:
    std::vector<std::filesystem::path> files_;
    double fps_;
    ColorMode mode_;
    std::size_t pos_ = 0;
    int ref_w_ = -1, ref_h_ = -1;
};

// In-memory source for synthetic videos and benchmarks.
class VectorSource : public FrameSource {
  public:
    VectorSource(std::vector<Frame> frames, double fps)
        : frames_(std::move(frames)), fps_(fps) {}
    std::optional<Frame> next() override {
        if (pos_ >= frames_.size()) return std::nullopt;
        return frames_[pos_++];
    }
    double fps() const override { return fps_; }

  private:
    std::vector<Frame> frames_;
    double fps_;
    std::size_t pos_ = 0;
};

}  // namespace fade
