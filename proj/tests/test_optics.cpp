#include "doctest.h"

#include <cmath>
#include <random>

#include "vlcmux/error.hpp"
#include "vlcmux/optics.hpp"

using namespace vlcmux;
using namespace vlcmux::optics;

namespace {

constexpr double kPi = 3.14159265358979323846;

OpticalSetup prototype() { return OpticalSetup{}; }

// image of a point: similar triangles through the lens centre
double image_x(const OpticalSetup& s, double x) {
    return x * s.back_focal_length_m / s.emitter_distance_m;
}

}  // namespace

TEST_SUITE("optics") {

TEST_CASE("prototype separation and angle") {
    const auto s = prototype();
    CHECK(min_separation(s) == doctest::Approx(0.1488).epsilon(1e-12));
    CHECK(std::abs(min_angle_deg(s) - 51.2) <= 0.1);
    CHECK(round_deg(min_angle_deg(s)) == doctest::Approx(51.3));
}

TEST_CASE("ten metre range") {
    auto s = prototype();
    s.emitter_distance_m = 10.0;
    CHECK(min_separation(s) == doctest::Approx(9.6).epsilon(1e-12));
}

TEST_CASE("zero pitch limit") {
    auto s = prototype();
    s.pixel_pitch_m = 1e-300;
    CHECK(min_separation(s) < 1e-290);
    CHECK(min_angle_deg(s) < 1e-290);
}

TEST_CASE("h equal to 2 S1 gives a right angle") {
    auto s = prototype();
    s.pixel_pitch_m = 2.0 * s.back_focal_length_m;  // h = 2 S1
    CHECK(min_angle_deg(s) == doctest::Approx(90.0).epsilon(1e-12));
}

TEST_CASE("invalid setups") {
    auto bad = [](auto mutate) {
        auto s = prototype();
        mutate(s);
        try {
            (void)min_separation(s);
        } catch (const Error& e) {
            return e.code() == ErrorCode::InvalidSetup;
        }
        return false;
    };
    CHECK(bad([](OpticalSetup& s) { s.pixel_pitch_m = 0.0; }));
    CHECK(bad([](OpticalSetup& s) { s.pixel_pitch_m = -1.0; }));
    CHECK(bad([](OpticalSetup& s) { s.emitter_distance_m = 0.0; }));
    CHECK(bad([](OpticalSetup& s) { s.back_focal_length_m = 0.0; }));
    CHECK(bad([](OpticalSetup& s) { s.grid_rows = 0; }));
    CHECK(bad([](OpticalSetup& s) { s.grid_cols = 0; }));
    CHECK(bad([](OpticalSetup& s) { s.emitter_distance_m = s.back_focal_length_m; }));
    CHECK_THROWS_AS(min_angle_deg(OpticalSetup{0.0}), Error);
}

TEST_CASE("homogeneity over random setups") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.01, 1.0);
    std::uniform_real_distribution<double> k(0.5, 4.0);
    for (int i = 0; i < 200; ++i) {
        OpticalSetup s;
        s.pixel_pitch_m = u(rng);
        s.back_focal_length_m = u(rng);
        s.emitter_distance_m = s.back_focal_length_m * (1.0 + 10.0 * u(rng));
        const double h = min_separation(s);
        CHECK(h == doctest::Approx(s.pixel_pitch_m * s.emitter_distance_m / s.back_focal_length_m)
                       .epsilon(1e-12));
        const double c = k(rng);
        auto sd = s;
        sd.pixel_pitch_m *= c;
        CHECK(min_separation(sd) == doctest::Approx(c * h).epsilon(1e-12));
        auto ss = s;
        ss.emitter_distance_m *= c;
        if (ss.emitter_distance_m > ss.back_focal_length_m)
            CHECK(min_separation(ss) == doctest::Approx(c * h).epsilon(1e-12));
        auto sb = s;
        sb.back_focal_length_m /= c;
        if (sb.emitter_distance_m > sb.back_focal_length_m)
            CHECK(min_separation(sb) == doctest::Approx(c * h).epsilon(1e-12));
    }
}

TEST_CASE("angle strictly increasing in pitch") {
    auto s = prototype();
    double prev = -1.0;
    for (int i = 1; i <= 400; ++i) {
        s.pixel_pitch_m = 0.001 * i;
        const double a = min_angle_deg(s);
        CHECK(a > prev);
        CHECK(a < 180.0);
        CHECK(a == doctest::Approx(2.0 * std::atan(min_separation(s) / (2.0 * s.emitter_distance_m)) *
                                   180.0 / kPi));
        prev = a;
    }
}

TEST_CASE("projection keeps orientation and scales by BFL/S1") {
    const auto s = prototype();
    const auto p = project(s, {0.08, -0.02});
    CHECK(p.x == doctest::Approx(image_x(s, 0.08)));
    CHECK(p.y == doctest::Approx(image_x(s, -0.02)));
}

TEST_CASE("pixel containment is half-open and centred") {
    auto s = prototype();
    const double d = s.pixel_pitch_m;
    CHECK(pixel_at(s, {-d, 0.0}) == std::optional<std::size_t>(0));
    CHECK(pixel_at(s, {-1e-9, 0.0}) == std::optional<std::size_t>(0));
    CHECK(pixel_at(s, {0.0, 0.0}) == std::optional<std::size_t>(1));
    CHECK_FALSE(pixel_at(s, {d, 0.0}).has_value());
    CHECK_FALSE(pixel_at(s, {-d - 1e-9, 0.0}).has_value());
    CHECK(pixel_at(s, {0.0, d / 2 - 1e-9}) == std::optional<std::size_t>(1));
    CHECK_FALSE(pixel_at(s, {0.0, d / 2}).has_value());

    s.grid_rows = 2;
    s.grid_cols = 3;
    // rows span [-d, d), cols span [-1.5d, 1.5d); row-major index
    CHECK(pixel_at(s, {-1.5 * d, -d}) == std::optional<std::size_t>(0));
    CHECK(pixel_at(s, {1.4 * d, 0.5 * d}) == std::optional<std::size_t>(5));
    CHECK(pixel_at(s, {0.0, 0.0}) == std::optional<std::size_t>(4));
}

TEST_CASE("mapping examples") {
    const auto s = prototype();
    const double h = min_separation(s);

    auto m = map_emitters_to_pixels(s, {{{-h / 2, 0.0}, {h / 2, 0.0}}});
    REQUIRE(m.feasible());
    CHECK(m.emitter_pixel == std::vector<std::size_t>{0, 1});

    m = map_emitters_to_pixels(s, {{{0.01, 0.0}, {0.01, 0.0}}});
    REQUIRE_FALSE(m.feasible());
    CHECK(*m.infeasible == InfeasibleReason::SamePixel);

    m = map_emitters_to_pixels(s, {{{-h / 4, 0.0}, {h / 4, 0.0}}});
    REQUIRE_FALSE(m.feasible());
    CHECK(*m.infeasible == InfeasibleReason::SamePixel);

    m = map_emitters_to_pixels(s, {{{-h / 2, 0.0}, {3.0 * h, 0.0}}});
    REQUIRE_FALSE(m.feasible());
    CHECK(*m.infeasible == InfeasibleReason::OutsideGrid);

    m = map_emitters_to_pixels(s, {{{0.08, 0.0}, {-0.08, 0.0}}});
    REQUIRE(m.feasible());
    CHECK(m.emitter_pixel == std::vector<std::size_t>{1, 0});
}

TEST_CASE("random placements on wide grids") {
    std::mt19937_64 rng(11);
    auto s = prototype();
    s.grid_cols = 16;
    const double h = min_separation(s);
    std::uniform_real_distribution<double> gap(1.0, 1.6);
    std::uniform_real_distribution<double> small(0.05, 0.999);
    for (int trial = 0; trial < 100; ++trial) {
        // emitters one pixel-centre apart, 2..8 of them, shifted by a random fraction
        const int n = 2 + trial % 7;
        const double start = -8.0 * h + h * 0.5;
        EmitterPlacement p;
        for (int i = 0; i < n; ++i) p.positions.push_back({start + i * h * 1.0, 0.0});
        auto m = map_emitters_to_pixels(s, p);
        REQUIRE(m.feasible());
        for (int i = 1; i < n; ++i) CHECK(m.emitter_pixel[i] == m.emitter_pixel[i - 1] + 1);

        // any pair closer than h along the axis is rejected
        const double g = h * small(rng);
        EmitterPlacement close{{{0.0, 0.0}, {g, 0.0}}};
        auto c = map_emitters_to_pixels(s, close);
        CHECK_FALSE(c.feasible());

        // wider than h stays feasible and injective
        const double w = h * gap(rng);
        EmitterPlacement wide{{{-w / 2, 0.0}, {w / 2, 0.0}}};
        auto f = map_emitters_to_pixels(s, wide);
        REQUIRE(f.feasible());
        CHECK(f.emitter_pixel[0] != f.emitter_pixel[1]);
    }
}

}  // TEST_SUITE
