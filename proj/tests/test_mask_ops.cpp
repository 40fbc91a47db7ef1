#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <queue>
#include <random>

#include "core/mask_ops.hpp"

using namespace fade;

namespace {

ForegroundMask mask_from(std::initializer_list<std::string> rows) {
    const int h = static_cast<int>(rows.size());
    const int w = static_cast<int>(rows.begin()->size());
    ForegroundMask m = make_mask(w, h);
    int y = 0;
    for (const auto& row : rows) {
        for (int x = 0; x < w; ++x) m.at(x, y) = row[x] == '#' ? 1 : 0;
        ++y;
    }
    return m;
}

// Brute-force erosion/dilation oracle with square SE, background padding.
ForegroundMask brute_open(const ForegroundMask& m, int r) {
    auto probe = [&](const ForegroundMask& s, int x, int y, bool erode) {
        for (int dy = -r; dy <= r; ++dy) {
            for (int dx = -r; dx <= r; ++dx) {
                int nx = x + dx, ny = y + dy;
                bool v = nx >= 0 && nx < s.width && ny >= 0 && ny < s.height &&
                         s.at(nx, ny);
                if (erode && !v) return false;
                if (!erode && v) return true;
            }
        }
        return erode;
    };
    ForegroundMask er = make_mask(m.width, m.height);
    for (int y = 0; y < m.height; ++y)
        for (int x = 0; x < m.width; ++x) er.at(x, y) = probe(m, x, y, true);
    ForegroundMask out = make_mask(m.width, m.height);
    for (int y = 0; y < m.height; ++y)
        for (int x = 0; x < m.width; ++x) out.at(x, y) = probe(er, x, y, false);
    return out;
}

// Independent 8-connectivity flood-fill labeling oracle.
std::vector<int> flood_labels(const ForegroundMask& m) {
    std::vector<int> labels(m.bits.size(), -1);
    int next = 0;
    for (int y = 0; y < m.height; ++y) {
        for (int x = 0; x < m.width; ++x) {
            std::size_t idx = static_cast<std::size_t>(y) * m.width + x;
            if (!m.bits[idx] || labels[idx] >= 0) continue;
            std::queue<std::pair<int, int>> q;
            q.push({x, y});
            labels[idx] = next;
            while (!q.empty()) {
                auto [cx, cy] = q.front();
                q.pop();
                for (int dy = -1; dy <= 1; ++dy) {
                    for (int dx = -1; dx <= 1; ++dx) {
                        int nx = cx + dx, ny = cy + dy;
                        if (nx < 0 || nx >= m.width || ny < 0 || ny >= m.height) continue;
                        std::size_t ni = static_cast<std::size_t>(ny) * m.width + nx;
                        if (m.bits[ni] && labels[ni] < 0) {
                            labels[ni] = next;
                            q.push({nx, ny});
                        }
                    }
                }
            }
            ++next;
        }
    }
    return labels;
}

ForegroundMask random_mask(int w, int h, double density, std::mt19937& rng) {
    ForegroundMask m = make_mask(w, h);
    std::uniform_real_distribution<double> u(0, 1);
    for (auto& b : m.bits) b = u(rng) < density ? 1 : 0;
    return m;
}

}  // namespace

TEST_CASE("open with radius 0 is the identity") {
    std::mt19937 rng(1);
    ForegroundMask m = random_mask(16, 16, 0.4, rng);
    CHECK(morph_open(m, 0).bits == m.bits);
}

TEST_CASE("opening removes isolated specks and keeps solid squares") {
    ForegroundMask speck = make_mask(7, 7);
    speck.at(3, 3) = 1;
    CHECK(morph_open(speck, 1).foreground_count() == 0);

    ForegroundMask sq = make_mask(9, 9);
    for (int y = 2; y < 7; ++y)
        for (int x = 2; x < 7; ++x) sq.at(x, y) = 1;
    CHECK(morph_open(sq, 1).bits == sq.bits);
}

TEST_CASE("opening matches the brute-force oracle and is anti-extensive") {
    std::mt19937 rng(2);
    for (int trial = 0; trial < 20; ++trial) {
        ForegroundMask m = random_mask(24, 18, 0.5, rng);
        for (int r : {1, 2}) {
            ForegroundMask fast = morph_open(m, r);
            CHECK(fast.bits == brute_open(m, r).bits);
            for (std::size_t i = 0; i < m.bits.size(); ++i)
                if (fast.bits[i]) CHECK(m.bits[i] == 1);
        }
    }
}

TEST_CASE("opening with radius r deletes blobs smaller than its element") {
    // A typical falling object covers ~20 px; a radius-2 opening erases a
    // 4x4 blob outright, so open_radius defaults to 0.
    ForegroundMask m = make_mask(12, 12);
    for (int y = 4; y < 8; ++y)
        for (int x = 4; x < 8; ++x) m.at(x, y) = 1;  // area 16 < (2*2+1)^2
    CHECK(morph_open(m, 2).foreground_count() == 0);
}

TEST_CASE("connected components on simple shapes") {
    CHECK(connected_components(make_mask(8, 8), 1).empty());

    ForegroundMask two = mask_from({
        "###....",
        "###....",
        "###..##",
        ".....##",
    });
    auto blobs = connected_components(two, 1);
    REQUIRE(blobs.size() == 2);
    CHECK(blobs[0].area == 9);
    CHECK(blobs[0].box.xmin == 0);
    CHECK(blobs[0].box.xmax == 3);
    CHECK(blobs[0].box.ymax == 3);
    CHECK(blobs[1].area == 4);
    CHECK(blobs[1].cx == doctest::Approx(6.0));

    // Diagonal touch is one blob under 8-connectivity.
    ForegroundMask diag = mask_from({
        "#..",
        ".#.",
        "..#",
    });
    CHECK(connected_components(diag, 1).size() == 1);
}

TEST_CASE("min_area filter and area bookkeeping") {
    ForegroundMask m = mask_from({
        "#.###",
        ".....",
        "##...",
    });
    auto all = connected_components(m, 1);
    std::size_t total = 0;
    for (const auto& b : all) total += static_cast<std::size_t>(b.area);
    CHECK(total == m.foreground_count());
    auto filtered = connected_components(m, 2);
    CHECK(filtered.size() == 2);
    for (const auto& b : filtered) CHECK(b.area >= 2);
}

TEST_CASE("labeling equals the flood-fill oracle on random masks") {
    std::mt19937 rng(3);
    for (int trial = 0; trial < 30; ++trial) {
        ForegroundMask m = random_mask(64, 64, 0.35 + 0.01 * trial, rng);
        auto labels = flood_labels(m);
        int n_components = labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end()) + 1;
        auto blobs = connected_components(m, 1);
        CHECK(static_cast<int>(blobs.size()) == n_components);
        std::size_t total = 0;
        for (const auto& b : blobs) {
            total += static_cast<std::size_t>(b.area);
            CHECK(b.area >= 1);
            CHECK(b.area <= b.box.area());
            CHECK(b.cx >= b.box.xmin);
            CHECK(b.cx <= b.box.xmax);
            CHECK(b.cy >= b.box.ymin);
            CHECK(b.cy <= b.box.ymax);
        }
        CHECK(total == m.foreground_count());
    }
}
