#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "core/errors.hpp"
#include "core/events.hpp"

using namespace fade;

namespace {

Incident inc(double a, double b, std::string video = "v") {
    return Incident{std::move(video), a, b};
}

Track falling_track(int first, int last, double step = 12) {
    Track t;
    for (int f = first; f <= last; ++f) {
        Blob b;
        double cy = step * (f - first);
        b.box = Box{48, cy - 2, 52, cy + 2};
        b.area = 16;
        b.cx = 50;
        b.cy = cy;
        b.frame_index = f;
        t.blobs.push_back(b);
    }
    return t;
}

}  // namespace

TEST_CASE("falling tracks map to second-resolution incidents") {
    FallPhysicsParams p;
    auto incidents = incidents_from_tracks({falling_track(30, 60)}, 30.0, p, "vid1");
    REQUIRE(incidents.size() == 1);
    CHECK(incidents[0].video_id == "vid1");
    CHECK(incidents[0].begin_s == doctest::Approx(1.0));
    CHECK(incidents[0].end_s == doctest::Approx(2.0));

    // A horizontal track contributes nothing.
    Track horiz;
    for (int f = 0; f < 6; ++f) {
        Blob b;
        b.cx = 10.0 + 15 * f;
        b.cy = 50;
        b.box = Box{b.cx - 2, 48, b.cx + 2, 52};
        b.frame_index = f;
        horiz.blobs.push_back(b);
    }
    CHECK(incidents_from_tracks({horiz}, 30.0, p, "vid1").empty());
}

TEST_CASE("nearby incidents merge, distant ones stay apart") {
    auto merged = merge_incidents({inc(1, 2), inc(2.2, 3)}, 0.5);
    REQUIRE(merged.size() == 1);
    CHECK(merged[0].begin_s == 1.0);
    CHECK(merged[0].end_s == 3.0);

    auto apart = merge_incidents({inc(1, 2), inc(2.8, 3)}, 0.5);
    REQUIRE(apart.size() == 2);

    // Merging is order-independent: input arrives shuffled.
    auto shuffled = merge_incidents({inc(5, 6), inc(0, 1), inc(1.2, 2)}, 0.5);
    REQUIRE(shuffled.size() == 2);
    CHECK(shuffled[0].begin_s == 0.0);
    CHECK(shuffled[0].end_s == 2.0);
    CHECK(shuffled[1].begin_s == 5.0);

    // Containment collapses to the outer range.
    auto contained = merge_incidents({inc(0, 10), inc(2, 3)}, 0.0);
    REQUIRE(contained.size() == 1);
    CHECK(contained[0].length() == 10.0);
}

TEST_CASE("tro hand values") {
    CHECK(tro(inc(0, 10), inc(0, 10)) == 1.0);
    CHECK(tro(inc(0, 10), inc(20, 30)) == 0.0);
    CHECK(tro(inc(0, 10), inc(5, 15)) == doctest::Approx(1.0 / 3.0));
    CHECK(tro(inc(0, 10), inc(10, 20)) == 0.0);  // touching, zero overlap
    CHECK(tro(inc(2, 4), inc(0, 10)) == doctest::Approx(0.2));

    // Zero-length conventions.
    CHECK(tro(inc(3, 3), inc(3, 3)) == 1.0);
    CHECK(tro(inc(3, 3), inc(4, 4)) == 0.0);
    CHECK(tro(inc(3, 3), inc(0, 10)) == 0.0);

    CHECK_THROWS_AS(tro(inc(0, 1, "a"), inc(0, 1, "b")), ConfigError);
}

TEST_CASE("tro is symmetric and translation invariant") {
    std::mt19937 rng(51);
    std::uniform_real_distribution<double> u(0, 100);
    for (int i = 0; i < 1000; ++i) {
        double a0 = u(rng), b0 = u(rng);
        Incident a = inc(a0, a0 + u(rng) / 4);
        Incident b = inc(b0, b0 + u(rng) / 4);
        double v = tro(a, b);
        CHECK(v == tro(b, a));
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
        double shift = u(rng) - 50;
        Incident as = inc(a.begin_s + shift, a.end_s + shift);
        Incident bs = inc(b.begin_s + shift, b.end_s + shift);
        CHECK(tro(as, bs) == doctest::Approx(v).epsilon(1e-9));
        // TRO can never exceed the length ratio of the shorter to the longer.
        double lo = std::min(a.length(), b.length());
        double hi = std::max(a.length(), b.length());
        if (hi > 0) CHECK(v <= lo / hi + 1e-12);
    }
}

TEST_CASE("dataset tro averages greedy per-video matches over GT incidents") {
    using M = std::map<std::string, std::vector<Incident>>;
    // Perfect single match.
    M gts{{"a", {inc(0, 10, "a")}}};
    M preds{{"a", {inc(0, 10, "a")}}};
    CHECK(tro_dataset(preds, gts) == 1.0);

    // Missed GT scores 0 and drags the mean down.
    M gts2{{"a", {inc(0, 10, "a"), inc(20, 30, "a")}}};
    CHECK(tro_dataset(preds, gts2) == doctest::Approx(0.5));

    // Extra predictions never help, and one prediction covers one GT only.
    M preds2{{"a", {inc(0, 10, "a"), inc(0, 10, "a"), inc(50, 60, "a")}}};
    CHECK(tro_dataset(preds2, gts) == 1.0);
    CHECK(tro_dataset(preds2, gts2) == doctest::Approx(0.5));

    // Greedy picks the best pairing: pred [0,10] goes to gt [0,10], leaving
    // [5,15] for the second pred [6,16].
    M gts3{{"a", {inc(0, 10, "a"), inc(5, 15, "a")}}};
    M preds3{{"a", {inc(6, 16, "a"), inc(0, 10, "a")}}};
    double expect = (1.0 + tro(inc(6, 16), inc(5, 15))) / 2.0;
    CHECK(tro_dataset(preds3, gts3) == doctest::Approx(expect));

    // Predictions in one video never match GT in another.
    M cross_preds{{"b", {inc(0, 10, "b")}}};
    CHECK(tro_dataset(cross_preds, gts) == 0.0);

    // Multiple videos: mean weighted by GT count.
    M gts4{{"a", {inc(0, 10, "a")}}, {"b", {inc(0, 4, "b"), inc(8, 12, "b")}}};
    M preds4{{"a", {inc(0, 10, "a")}}, {"b", {inc(0, 4, "b")}}};
    CHECK(tro_dataset(preds4, gts4) == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("dataset tro with no GT incidents") {
    using M = std::map<std::string, std::vector<Incident>>;
    CHECK(tro_dataset({}, {}) == 1.0);
    M empty_gts{{"a", {}}};
    CHECK(tro_dataset({}, empty_gts) == 1.0);
    M false_alarm{{"a", {inc(0, 1, "a")}}};
    CHECK(tro_dataset(false_alarm, empty_gts) == 0.0);
}

TEST_CASE("incidents from overlapping tracks merge into one event") {
    FallPhysicsParams p;
    auto incidents = incidents_from_tracks(
        {falling_track(0, 30), falling_track(25, 60), falling_track(120, 150)},
        30.0, p, "v");
    REQUIRE(incidents.size() == 2);
    CHECK(incidents[0].begin_s == doctest::Approx(0.0));
    CHECK(incidents[0].end_s == doctest::Approx(2.0));
    CHECK(incidents[1].begin_s == doctest::Approx(4.0));
}
