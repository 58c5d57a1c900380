#include "doctest.h"

#include <cmath>
#include <limits>
#include <random>

#include "vlcmux/error.hpp"
#include "vlcmux/metrics.hpp"

using namespace vlcmux;
using namespace vlcmux::metrics;

namespace {

Bits random_bits(std::mt19937_64& rng, std::size_t n) {
    std::bernoulli_distribution b(0.5);
    Bits out(n);
    for (auto& x : out) x = b(rng) ? 1 : 0;
    return out;
}

Bits complement(Bits b) {
    for (auto& x : b) x ^= 1;
    return b;
}

SampleBlock gaussian(std::size_t n, double sigma, double mean, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(mean, sigma);
    SampleBlock b;
    b.sample_rate = 1.0;
    for (std::size_t i = 0; i < n; ++i) b.samples.push_back(g(rng));
    return b;
}

}  // namespace

TEST_SUITE("metrics") {

TEST_CASE("ber examples") {
    std::mt19937_64 rng(1);
    const auto tx = random_bits(rng, 10000);
    CHECK(bit_error_rate(tx, tx) == 0.0);
    CHECK(bit_error_rate(tx, complement(tx)) == 1.0);
    CHECK(std::abs(bit_error_rate(tx, random_bits(rng, 10000)) - 0.5) <= 0.02);
    CHECK(hamming_distance({1, 0, 1}, {1, 1, 0}) == 2);
    try {
        bit_error_rate({1, 0}, {1});
        FAIL("expected length-mismatch");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::LengthMismatch);
    }
}

TEST_CASE("ber symmetry and complement invariance") {
    std::mt19937_64 rng(2);
    std::uniform_int_distribution<std::size_t> len(1, 3000);
    for (int i = 0; i < 100; ++i) {
        const auto n = len(rng);
        const auto a = random_bits(rng, n);
        const auto b = random_bits(rng, n);
        CHECK(bit_error_rate(a, b) == bit_error_rate(b, a));
        CHECK(bit_error_rate(complement(a), complement(b)) == bit_error_rate(a, b));
    }
}

TEST_CASE("per examples") {
    CHECK(packet_error_rate(477, 477) == 0.0);
    CHECK(packet_error_rate(0, 477) == 100.0);
    const double per = packet_error_rate(449, 477);
    CHECK(per == doctest::Approx(5.87).epsilon(1e-3));
    CHECK(std::abs(per - 5.88) <= 100.0 / 477.0);  // one detection
    CHECK(packet_error_rate(500, 477) == 0.0);
    try {
        packet_error_rate(1, 0);
        FAIL("expected zero-expected");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ZeroExpected);
    }
}

TEST_CASE("per complements the valid fraction") {
    for (std::size_t e = 1; e <= 300; e += 7)
        for (std::size_t v = 0; v <= e; ++v)
            CHECK(packet_error_rate(v, e) + 100.0 * static_cast<double>(v) / static_cast<double>(e) ==
                  doctest::Approx(100.0).epsilon(1e-12));
}

TEST_CASE("valid detections") {
    using framing::Detection;
    const std::vector<Detection> d = {
        {5, 0, {}, 13}, {5 + 2096, 0, {}, 10}, {5 + 4192, 1, {}, 13}, {77, 0, {}, 12}};
    DetectionFilter f;
    CHECK(count_valid(d, f) == 3);
    f.label = 0;
    CHECK(count_valid(d, f) == 2);
    f.packet_phase = 5;
    CHECK(count_valid(d, f) == 1);
    CHECK(packet_error_rate(d, 2, f) == 50.0);
}

TEST_CASE("goodput") {
    CHECK(goodput(0.015, 1.0 / 3.0, 2e6, 2) == doctest::Approx(1.313333e6).epsilon(1e-6));
    CHECK(std::abs(goodput(0.015, 1.0 / 3.0, 2e6, 2) - 1.313e6) / 1.313e6 <= 0.01);
    CHECK(goodput(1.0, 0.5, 1e6, 2) == 0.0);
    CHECK(goodput(0.0, 1.0, 1e6, 1) == 1e6);
    CHECK_THROWS_AS(goodput(1.5, 1.0, 1.0, 1.0), Error);
    CHECK_THROWS_AS(goodput(0.1, 0.0, 1.0, 1.0), Error);

    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.01, 1.0);
    for (int i = 0; i < 100; ++i) {
        const double ber = u(rng) * 0.9, rate = u(rng), rs = 1e6 * u(rng), bps = 1 + 3 * u(rng);
        const double g = goodput(ber, rate, rs, bps);
        CHECK(goodput(ber + 0.05, rate, rs, bps) < g);
        CHECK(goodput(ber, rate / 2, rs, bps) == doctest::Approx(g / 2));
        CHECK(goodput(ber, rate, 3 * rs, bps) == doctest::Approx(3 * g));
        CHECK(goodput(ber, rate, rs, 2 * bps) == doctest::Approx(2 * g));
    }
}

TEST_CASE("snr from traces") {
    const auto noise = gaussian(100000, 0.05, 0.0, 1);
    const auto signal = gaussian(100000, 0.5, 0.0, 2);
    CHECK(std::abs(snr_from_trace(signal, noise) - 20.0) <= 0.2);
    CHECK(std::abs(snr_from_trace(gaussian(100000, 0.5, 0.0, 3), signal)) <= 0.1);
    auto shifted = noise;
    for (auto& x : shifted.samples) x += 3.0;
    CHECK(snr_from_trace(shifted, noise) == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("snr json encoding") {
    const double inf = std::numeric_limits<double>::infinity();
    CHECK(snr_to_json(inf) == "inf");
    CHECK(snr_to_json(-inf) == "-inf");
    CHECK(snr_to_json(std::nullopt).is_null());
    CHECK(*snr_from_json(snr_to_json(inf)) == inf);
    CHECK(*snr_from_json(snr_to_json(12.5)) == 12.5);
    CHECK_FALSE(snr_from_json(nlohmann::json()).has_value());
    CHECK_THROWS_AS(snr_from_json("big"), Error);
}

TEST_CASE("report json") {
    LinkReport r;
    r.emitter = 1;
    r.ber = 0.25;
    r.per_percent = 5.0;
    r.snr_db = std::numeric_limits<double>::infinity();
    const auto j = to_json(r);
    CHECK(j["emitter"] == 1);
    CHECK(j["per_percent"] == 5.0);
    CHECK(j["snr_db"] == "inf");
    r.per_percent.reset();
    CHECK(to_json(r)["per_percent"].is_null());
}

}  // TEST_SUITE
