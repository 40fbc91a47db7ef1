#include "frame.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "errors.hpp"

namespace fs = std::filesystem;

namespace fade {

Frame make_frame(int width, int height, int channels, std::uint8_t fill) {
    if (width < 1 || height < 1 || (channels != 1 && channels != 3))
        throw ConfigError("invalid frame shape");
    Frame f;
    f.width = width;
    f.height = height;
    f.channels = channels;
    f.pixels.assign(static_cast<std::size_t>(width) * height * channels, fill);
    return f;
}

Frame to_grayscale(const Frame& f) {
    if (f.channels == 1) return f;
    Frame g = f;
    g.channels = 1;
    g.pixels.resize(static_cast<std::size_t>(f.width) * f.height);
    const std::uint8_t* src = f.pixels.data();
    for (std::size_t i = 0; i < g.pixels.size(); ++i, src += 3) {
        double v = 0.299 * src[0] + 0.587 * src[1] + 0.114 * src[2];
        g.pixels[i] = static_cast<std::uint8_t>(std::floor(v + 0.5));
    }
    return g;
}

Frame resize(const Frame& f, int out_w, int out_h) {
    if (out_w < 1 || out_h < 1) throw ConfigError("resize: non-positive size");
    if (out_w == f.width && out_h == f.height) return f;
    Frame out = make_frame(out_w, out_h, f.channels);
    out.index = f.index;
    out.timestamp_s = f.timestamp_s;
    const double sx = static_cast<double>(f.width) / out_w;
    const double sy = static_cast<double>(f.height) / out_h;
    for (int y = 0; y < out_h; ++y) {
        double fy = (y + 0.5) * sy - 0.5;
        fy = std::clamp(fy, 0.0, static_cast<double>(f.height - 1));
        int y0 = static_cast<int>(fy);
        int y1 = std::min(y0 + 1, f.height - 1);
        double wy = fy - y0;
        for (int x = 0; x < out_w; ++x) {
            double fx = (x + 0.5) * sx - 0.5;
            fx = std::clamp(fx, 0.0, static_cast<double>(f.width - 1));
            int x0 = static_cast<int>(fx);
            int x1 = std::min(x0 + 1, f.width - 1);
            double wx = fx - x0;
            for (int c = 0; c < f.channels; ++c) {
                double top = (1 - wx) * f.at(x0, y0, c) + wx * f.at(x1, y0, c);
                double bot = (1 - wx) * f.at(x0, y1, c) + wx * f.at(x1, y1, c);
                double v = (1 - wy) * top + wy * bot;
                out.at(x, y, c) = static_cast<std::uint8_t>(
                    std::clamp(std::floor(v + 0.5), 0.0, 255.0));
            }
        }
    }
    return out;
}

namespace {

int pnm_token(std::istream& in, const fs::path& path) {
    // Skips whitespace and '#' comments between header fields.
    int c;
    while ((c = in.get()) != EOF) {
        if (c == '#') {
            while ((c = in.get()) != EOF && c != '\n') {}
        } else if (!std::isspace(c)) {
            in.unget();
            break;
        }
    }
    int v;
    if (!(in >> v)) throw FormatError("bad PNM header: " + path.string());
    return v;
}

Frame load_pnm(const fs::path& path, int channels) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    char magic[2];
    in.read(magic, 2);
    int w = pnm_token(in, path);
    int h = pnm_token(in, path);
    int maxval = pnm_token(in, path);
    if (maxval != 255) throw FormatError("unsupported maxval in " + path.string());
    in.get();  // single whitespace after header
    Frame f = make_frame(w, h, channels);
    in.read(reinterpret_cast<char*>(f.pixels.data()),
            static_cast<std::streamsize>(f.pixels.size()));
    if (in.gcount() != static_cast<std::streamsize>(f.pixels.size()))
        throw FormatError("truncated image " + path.string());
    return f;
}

struct PngReader {
    png_structp png = nullptr;
    png_infop info = nullptr;
    std::FILE* fp = nullptr;
    ~PngReader() {
        if (png) png_destroy_read_struct(&png, &info, nullptr);
        if (fp) std::fclose(fp);
    }
};

Frame load_png(const fs::path& path) {
    PngReader r;
    r.fp = std::fopen(path.c_str(), "rb");
    if (!r.fp) throw IoError("cannot open " + path.string());
    r.png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    r.info = png_create_info_struct(r.png);
    if (setjmp(png_jmpbuf(r.png)))
        throw FormatError("bad PNG " + path.string());
    png_init_io(r.png, r.fp);
    png_read_info(r.png, r.info);

    png_set_strip_16(r.png);
    png_set_strip_alpha(r.png);
    png_set_palette_to_rgb(r.png);
    png_set_expand_gray_1_2_4_to_8(r.png);
    png_read_update_info(r.png, r.info);

    int w = static_cast<int>(png_get_image_width(r.png, r.info));
    int h = static_cast<int>(png_get_image_height(r.png, r.info));
    int ch = png_get_channels(r.png, r.info);
    if (ch != 1 && ch != 3) throw FormatError("unsupported PNG channels in " + path.string());
    Frame f = make_frame(w, h, ch);
    std::vector<png_bytep> rows(h);
    for (int y = 0; y < h; ++y)
        rows[y] = f.pixels.data() + static_cast<std::size_t>(y) * w * ch;
    png_read_image(r.png, rows.data());
    return f;
}

}  // namespace

Frame load_image(const fs::path& path) {
    std::ifstream probe(path, std::ios::binary);
    if (!probe) throw IoError("cannot open " + path.string());
    char magic[2] = {0, 0};
    probe.read(magic, 2);
    probe.close();
    if (magic[0] == 'P' && magic[1] == '5') return load_pnm(path, 1);
    if (magic[0] == 'P' && magic[1] == '6') return load_pnm(path, 3);
    if (static_cast<unsigned char>(magic[0]) == 0x89 && magic[1] == 'P')
        return load_png(path);
    throw FormatError("unrecognized image format: " + path.string());
}

void save_pgm(const Frame& f, const fs::path& path) {
    if (f.channels != 1) throw ConfigError("save_pgm needs a grayscale frame");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << "P5\n" << f.width << " " << f.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(f.pixels.data()),
              static_cast<std::streamsize>(f.pixels.size()));
}

void save_ppm(const Frame& f, const fs::path& path) {
    if (f.channels != 3) throw ConfigError("save_ppm needs an RGB frame");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << "P6\n" << f.width << " " << f.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(f.pixels.data()),
              static_cast<std::streamsize>(f.pixels.size()));
}

void save_image(const Frame& f, const fs::path& path) {
    if (f.channels == 1)
        save_pgm(f, path);
    else
        save_ppm(f, path);
}

SequenceSource::SequenceSource(const fs::path& dir, double fps, ColorMode mode)
    : fps_(fps), mode_(mode) {
    if (fps <= 0) throw ConfigError("fps must be positive");
    if (!fs::is_directory(dir)) throw IoError("not a directory: " + dir.string());
    for (const auto& e : fs::directory_iterator(dir)) {
        if (!e.is_regular_file()) continue;
        auto ext = e.path().extension().string();
        if (ext == ".pgm" || ext == ".ppm" || ext == ".png")
            files_.push_back(e.path());
    }
    std::sort(files_.begin(), files_.end());
    if (files_.empty()) throw IoError("no frames found in " + dir.string());
}

std::optional<Frame> SequenceSource::next() {
    if (pos_ >= files_.size()) return std::nullopt;
    const auto& path = files_[pos_];
    Frame f = load_image(path);
    if (ref_w_ < 0) {
        ref_w_ = f.width;
        ref_h_ = f.height;
    } else if (f.width != ref_w_ || f.height != ref_h_) {
        throw FormatError("frame size mismatch at " + path.string());
    }
    if (mode_ == ColorMode::Grayscale) f = to_grayscale(f);
    f.index = static_cast<int>(pos_);
    f.timestamp_s = f.index / fps_;
    ++pos_;
    return f;
}

}  // namespace fade
