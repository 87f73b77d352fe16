#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "spinorbit/strips.hpp"

using namespace spinorbit;

namespace {
constexpr double kN = 26.0879;
const StripLayout& layout() {
    static StripLayout lay = default_layout(kN);
    return lay;
}
} // namespace

TEST_CASE("layout tiles [0, 5] exactly in integer hundredths", "[strips]") {
    const auto& lay = layout();
    int total = 0;
    int prev_hi = 0;
    for (const auto& s : lay.strips) {
        CHECK(s.lo100 == prev_hi);
        CHECK(s.hi100 > s.lo100);
        total += s.hi100 - s.lo100;
        prev_hi = s.hi100;
    }
    CHECK(total == 500);
    CHECK(lay.strips.front().lo100 == 0);
    CHECK(lay.strips.back().hi100 == 500);
}

TEST_CASE("band 0 structure matches the published strip set", "[strips]") {
    const auto& lay = layout();
    struct { double c, w; } want[] = {{0.1, 0.2}, {0.275, 0.15}, {0.39, 0.08}, {0.45, 0.04}};
    for (int i = 0; i < 4; ++i) {
        const Strip& s = lay.strips[static_cast<std::size_t>(i)];
        CHECK(s.kind == StripKind::H);
        CHECK(s.band == 0);
        CHECK(s.center == Catch::Approx(want[i].c * kN).epsilon(1e-14));
        CHECK(s.width_over_n() == Catch::Approx(want[i].w).epsilon(1e-14));
    }
    const Strip& n0 = lay.strips[4];
    CHECK(n0.kind == StripKind::N);
    CHECK(n0.lo100 == 47);
    CHECK(n0.hi100 == 53);
}

TEST_CASE("every kink lies strictly inside an N strip of half-width 0.03", "[strips]") {
    const auto& lay = layout();
    for (int q = -1; q <= 7; ++q) {
        const int kink100 = 50 * (q + 2);
        const double kink = (q + 2) * kN / 2.0;
        const Strip* s = lay.locate(kink);
        REQUIRE(s != nullptr);
        CHECK(s->kind == StripKind::N);
        CHECK(s->hi100 - s->lo100 == 6);
        CHECK(s->lo100 < kink100);
        CHECK(kink100 < s->hi100);
        CHECK(s->lo < kink);
        CHECK(kink < s->hi);
    }
}

TEST_CASE("strip counts per band and the N strip around 3/2", "[strips]") {
    const auto& lay = layout();
    int h_count = 0, n_count = 0;
    for (const auto& s : lay.strips)
        (s.kind == StripKind::H ? h_count : n_count)++;
    CHECK(h_count == 48);
    CHECK(n_count == 9);

    // bands 0 and 9 hold four H strips, bands 1-8 five each
    int per_band[10] = {};
    for (const auto& s : lay.strips)
        if (s.kind == StripKind::H) per_band[s.band]++;
    CHECK(per_band[0] == 4);
    CHECK(per_band[9] == 4);
    for (int b = 1; b <= 8; ++b) CHECK(per_band[b] == 5);

    const Strip* s32 = lay.locate(1.5 * kN);
    REQUIRE(s32 != nullptr);
    CHECK(s32->lo100 == 147);
    CHECK(s32->hi100 == 153);
}

TEST_CASE("per-band series degrees follow the band table", "[strips]") {
    const auto& lay = layout();
    const int want[10] = {16, 15, 15, 14, 14, 14, 15, 16, 17, 17};
    for (const auto& s : lay.strips)
        if (s.kind == StripKind::H) {
            CHECK(s.series_degree == want[s.band]);
            CHECK(s.taylor_degree_tide == 25);
            CHECK(s.center == Catch::Approx(0.5 * (s.lo + s.hi)).epsilon(1e-15));
        }
}

TEST_CASE("H strips cover at least 88 percent of [0, 5n]", "[strips]") {
    const auto& lay = layout();
    int h100 = 0;
    for (const auto& s : lay.strips)
        if (s.kind == StripKind::H) h100 += s.hi100 - s.lo100;
    CHECK(h100 >= 440);   // 0.88 * 500
}

TEST_CASE("locate boundary conventions", "[strips]") {
    const auto& lay = layout();
    // boundary points belong to the strip on their right
    const Strip* s = lay.locate(0.47 * kN);
    REQUIRE(s != nullptr);
    CHECK(s->kind == StripKind::N);
    CHECK(s->lo100 == 47);
    // outside
    CHECK(lay.locate(-0.2 * kN) == nullptr);
    CHECK(lay.locate(5.2 * kN) == nullptr);
    CHECK(lay.locate_index(-0.2 * kN) == StripLayout::outside);
    // a kink value lands in its N strip
    const Strip* k2 = lay.locate(2.0 * kN);
    REQUIRE(k2 != nullptr);
    CHECK(k2->kind == StripKind::N);
    // the right edge of the layout is closed
    const Strip* last = lay.locate(5.0 * kN);
    REQUIRE(last != nullptr);
    CHECK(last->hi100 == 500);
}

TEST_CASE("locate agrees with the ordered list at strip midpoints", "[strips]") {
    const auto& lay = layout();
    for (std::size_t i = 0; i < lay.strips.size(); ++i) {
        const Strip& s = lay.strips[i];
        CHECK(lay.locate_index(0.5 * (s.lo + s.hi)) == static_cast<int>(i));
    }
}

TEST_CASE("default_layout rejects a non-positive mean motion", "[strips]") {
    CHECK_THROWS_AS(default_layout(0.0), std::domain_error);
    CHECK_THROWS_AS(default_layout(-3.0), std::domain_error);
}
