#include "mask_ops.hpp"

#include <algorithm>
#include <numeric>

namespace fade {

namespace {

// Sliding min (erode=true) or max over a horizontal window of side 2r+1,
// border treated as background for erosion and ignored for dilation.
ForegroundMask morph_pass(const ForegroundMask& m, int r, bool horizontal, bool erode) {
    ForegroundMask out = make_mask(m.width, m.height);
    const int outer = horizontal ? m.height : m.width;
    const int inner = horizontal ? m.width : m.height;
    for (int o = 0; o < outer; ++o) {
        for (int i = 0; i < inner; ++i) {
            std::uint8_t v = erode ? 1 : 0;
            for (int k = -r; k <= r; ++k) {
                int j = i + k;
                std::uint8_t s = 0;
                if (j >= 0 && j < inner)
                    s = horizontal ? m.at(j, o) : m.at(o, j);
                if (erode)
                    v = std::min(v, s);
                else
                    v = std::max(v, s);
            }
            if (horizontal)
                out.at(i, o) = v;
            else
                out.at(o, i) = v;
        }
    }
    return out;
}

ForegroundMask erode(const ForegroundMask& m, int r) {
    return morph_pass(morph_pass(m, r, true, true), r, false, true);
}

ForegroundMask dilate(const ForegroundMask& m, int r) {
    return morph_pass(morph_pass(m, r, true, false), r, false, false);
}

struct UnionFind {
    std::vector<int> parent;
    int find(int x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    }
    void unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
};

}  // namespace

ForegroundMask morph_open(const ForegroundMask& m, int radius) {
    if (radius <= 0) return m;
    return dilate(erode(m, radius), radius);
}

std::vector<Blob> connected_components(const ForegroundMask& m, int min_area) {
    const int w = m.width, h = m.height;
    std::vector<int> label(static_cast<std::size_t>(w) * h, -1);
    UnionFind uf;

    // First pass: provisional labels, merging with the 4 already-seen
    // 8-neighbors (W, NW, N, NE).
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (!m.at(x, y)) continue;
            const std::size_t idx = static_cast<std::size_t>(y) * w + x;
            int lab = -1;
            const int nx[4] = {x - 1, x - 1, x, x + 1};
            const int ny[4] = {y, y - 1, y - 1, y - 1};
            for (int k = 0; k < 4; ++k) {
                if (nx[k] < 0 || nx[k] >= w || ny[k] < 0) continue;
                int nl = label[static_cast<std::size_t>(ny[k]) * w + nx[k]];
                if (nl < 0) continue;
                if (lab < 0)
                    lab = uf.find(nl);
                else
                    uf.unite(lab, nl);
            }
            if (lab < 0) {
                lab = static_cast<int>(uf.parent.size());
                uf.parent.push_back(lab);
            }
            label[idx] = lab;
        }
    }

    // Second pass: accumulate per root.
    struct Acc {
        int area = 0;
        int xmin = 0, ymin = 0, xmax = 0, ymax = 0;
        double sx = 0, sy = 0;
        bool seen = false;
    };
    std::vector<Acc> accs(uf.parent.size());
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            int l = label[static_cast<std::size_t>(y) * w + x];
            if (l < 0) continue;
            Acc& a = accs[uf.find(l)];
            if (!a.seen) {
                a.seen = true;
                a.xmin = a.xmax = x;
                a.ymin = a.ymax = y;
            } else {
                a.xmin = std::min(a.xmin, x);
                a.xmax = std::max(a.xmax, x);
                a.ymin = std::min(a.ymin, y);
                a.ymax = std::max(a.ymax, y);
            }
            ++a.area;
            a.sx += x + 0.5;
            a.sy += y + 0.5;
        }
    }

    std::vector<Blob> blobs;
    for (const Acc& a : accs) {
        if (!a.seen || a.area < min_area) continue;
        Blob b;
        b.box = Box{static_cast<double>(a.xmin), static_cast<double>(a.ymin),
                    static_cast<double>(a.xmax + 1), static_cast<double>(a.ymax + 1)};
        b.area = a.area;
        b.cx = a.sx / a.area;
        b.cy = a.sy / a.area;
        blobs.push_back(b);
    }
    std::sort(blobs.begin(), blobs.end(), [](const Blob& a, const Blob& b) {
        if (a.box.ymin != b.box.ymin) return a.box.ymin < b.box.ymin;
        return a.box.xmin < b.box.xmin;
    });
    return blobs;
}

}  // namespace fade
