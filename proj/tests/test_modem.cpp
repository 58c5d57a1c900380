#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <random>

#include "vlcmux/error.hpp"
#include "vlcmux/modem.hpp"

using namespace vlcmux;
using namespace vlcmux::modem;

namespace {

constexpr double kPi = 3.14159265358979323846;

Bits random_bits(std::mt19937_64& rng, std::size_t n) {
    std::bernoulli_distribution b(0.5);
    Bits out(n);
    for (auto& x : out) x = b(rng) ? 1 : 0;
    return out;
}

ModemConfig ook(std::size_t sps = 8) {
    ModemConfig c;
    c.scheme = Scheme::OOK;
    c.samples_per_symbol = sps;
    return c;
}

ModemConfig gmsk(std::size_t sps = 4) {
    ModemConfig c;
    c.scheme = Scheme::GMSK;
    c.symbol_rate = 1e5;
    c.samples_per_symbol = sps;
    return c;
}

double q_function(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

// Gaussian-filtered rectangle: difference of two normal CDFs with the filter
// deviation sqrt(ln 2) / (2 pi BT) in symbol periods.
double pulse_oracle(double t, double bt) {
    const double sigma = std::sqrt(std::log(2.0)) / (2.0 * kPi * bt);
    auto phi = [](double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); };
    return phi((t + 0.5) / sigma) - phi((t - 0.5) / sigma);
}

double simpson(double a, double b, int n, auto f) {
    const double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return s * h / 3.0;
}

// integrate-and-dump over AWGN with a decision level at dc_bias
double ook_ber(double sigma, std::size_t n_bits, std::uint64_t seed) {
    const auto cfg = ook(8);
    std::mt19937_64 rng(seed);
    const auto bits = random_bits(rng, n_bits);
    auto block = modulate(bits, cfg);
    std::normal_distribution<double> noise(0.0, sigma);
    for (auto& x : block.samples) x += noise(rng);
    const auto rx = demodulate(block, cfg, Threshold::fixed(cfg.dc_bias));
    std::size_t errors = 0;
    for (std::size_t i = 0; i < bits.size(); ++i) errors += bits[i] != rx[i];
    return static_cast<double>(errors) / static_cast<double>(n_bits);
}

}  // namespace

TEST_SUITE("modem") {

TEST_CASE("OOK levels") {
    auto c = ook(2);
    c.dc_bias = 1.0;
    c.modulation_depth = 0.5;
    const auto b = modulate({1, 0}, c);
    CHECK(b.samples == std::vector<double>{1.5, 1.5, 0.5, 0.5});
    CHECK(b.sample_rate == doctest::Approx(c.symbol_rate * 2));
}

TEST_CASE("inverted plus in-phase is twice the bias") {
    std::mt19937_64 rng(3);
    for (auto cfg : {ook(4), gmsk(4), gmsk(8)}) {
        const auto bits = random_bits(rng, 500);
        const auto a = modulate(bits, cfg, PhaseOffset::InPhase);
        const auto b = modulate(bits, cfg, PhaseOffset::Inverted);
        REQUIRE(a.samples.size() == b.samples.size());
        for (std::size_t i = 0; i < a.samples.size(); ++i)
            CHECK(a.samples[i] + b.samples[i] - 2.0 * cfg.dc_bias == doctest::Approx(0.0));
    }
}

TEST_CASE("frequency pulse matches the Gaussian oracle and has unit area") {
    for (double bt : {0.25, 0.35, 0.5}) {
        for (double t = -3.0; t <= 3.0; t += 0.125)
            CHECK(gmsk_frequency_pulse(t, bt) == doctest::Approx(pulse_oracle(t, bt)).epsilon(1e-9));
        const double area = simpson(-8.0, 8.0, 4000, [&](double t) { return gmsk_frequency_pulse(t, bt); });
        CHECK(area == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("isolated symbol phase is a quarter turn") {
    // continuous pulse truncated to the 4-symbol span keeps all but the tails
    const double span_area =
        simpson(-2.0, 2.0, 4000, [](double t) { return pulse_oracle(t, 0.35); });
    CHECK(std::abs(kPi / 2 * span_area - kPi / 2) < 1e-3);

    for (std::size_t sps : {4u, 8u, 16u}) {
        const auto cfg = gmsk(sps);
        const auto pulse = gmsk_phase_pulse(cfg);
        CHECK(pulse.size() == sps * cfg.gmsk_span_symbols);
        double sum = 0.0;
        for (double p : pulse) sum += p;
        CHECK(std::abs(sum - kPi / 2) < 1e-6);

        const auto up = gmsk_phase_trajectory({1}, cfg, true);
        const auto down = gmsk_phase_trajectory({0}, cfg, true);
        CHECK(std::abs(up.back() - kPi / 2) < 1e-6);
        CHECK(std::abs(down.back() + kPi / 2) < 1e-6);
    }
}

TEST_CASE("phase trajectory is continuous") {
    // the truncated pulse is rescaled to a quarter turn, which lifts the
    // steady-state increment by the lost tail mass
    const double span_area =
        simpson(-2.0, 2.0, 4000, [](double t) { return pulse_oracle(t, 0.35); });
    std::mt19937_64 rng(5);
    for (std::size_t sps : {4u, 6u, 8u, 16u}) {
        const auto cfg = gmsk(sps);
        const auto phi = gmsk_phase_trajectory(random_bits(rng, 2000), cfg, true);
        double worst = 0.0;
        for (std::size_t i = 1; i < phi.size(); ++i) worst = std::max(worst, std::abs(phi[i] - phi[i - 1]));
        CHECK(worst <= kPi / (2.0 * static_cast<double>(sps)) / span_area + 1e-12);
    }
}

TEST_CASE("GMSK sits on a quarter-rate subcarrier") {
    const auto cfg = gmsk(4);
    CHECK(gmsk_subcarrier_hz(cfg) == doctest::Approx(cfg.sample_rate() / 4));
}

TEST_CASE("noiseless roundtrip over 10^4 bits") {
    std::mt19937_64 rng(9);
    const auto bits = random_bits(rng, 10000);
    CHECK(demodulate(modulate(bits, ook(8)), ook(8)) == bits);
    CHECK(demodulate(modulate(bits, gmsk(4)), gmsk(4)) == bits);
    const auto g8 = gmsk(8);
    CHECK(demodulate(modulate(bits, g8), g8) == bits);
}

TEST_CASE("roundtrip property") {
    std::mt19937_64 rng(13);
    std::uniform_int_distribution<std::size_t> len(1, 600);
    std::uniform_int_distribution<std::size_t> sps_ook(2, 12);
    std::uniform_int_distribution<std::size_t> sps_gmsk(4, 12);
    std::uniform_real_distribution<double> depth(0.05, 1.0);
    for (int i = 0; i < 100; ++i) {
        const auto bits = random_bits(rng, len(rng));
        auto a = ook(sps_ook(rng));
        a.modulation_depth = depth(rng);
        a.dc_bias = a.modulation_depth + depth(rng);
        auto g = gmsk(sps_gmsk(rng));
        g.modulation_depth = a.modulation_depth;
        g.dc_bias = a.dc_bias;
        for (auto off : {PhaseOffset::InPhase, PhaseOffset::Inverted}) {
            const auto expect = [&] {
                if (off == PhaseOffset::InPhase) return bits;
                Bits inv = bits;
                for (auto& b : inv) b ^= 1;
                return inv;
            }();
            CHECK(demodulate(modulate(bits, a, off), a, Threshold::fixed(a.dc_bias)) == expect);
            // inversion is a constant half-turn of the subcarrier; the
            // differential detector does not see it
            CHECK(demodulate(modulate(bits, g, off), g) == bits);
        }
        CHECK(demodulate(modulate(bits, a), a, Threshold::fixed(a.dc_bias)) == bits);
    }
}

TEST_CASE("intensity is never negative") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(0.01, 1.0);
    for (int i = 0; i < 50; ++i) {
        for (auto cfg : {ook(4), gmsk(4)}) {
            cfg.modulation_depth = u(rng);
            cfg.dc_bias = cfg.modulation_depth;  // tightest legal bias
            const auto b = modulate(random_bits(rng, 300), cfg, i % 2 ? PhaseOffset::Inverted
                                                                      : PhaseOffset::InPhase);
            CHECK(*std::min_element(b.samples.begin(), b.samples.end()) >= -1e-12);
        }
    }
}

TEST_CASE("output length is floor(len / sps)") {
    auto cfg = ook(8);
    SampleBlock b;
    b.sample_rate = cfg.sample_rate();
    b.samples.assign(8 * 5 + 7, 1.0);
    CHECK(demodulate(b, cfg).size() == 5);
    b.samples.assign(7, 1.0);
    CHECK_THROWS_AS(demodulate(b, cfg), Error);
    try {
        demodulate(b, cfg);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::BlockTooShort);
    }
}

TEST_CASE("fixed threshold swamped by DC gives all ones") {
    auto cfg = ook(8);
    std::mt19937_64 rng(19);
    auto b = modulate(random_bits(rng, 200), cfg);
    for (auto& x : b.samples) x += 10.0;
    const auto rx = demodulate(b, cfg, Threshold::fixed(1.0));
    CHECK(std::all_of(rx.begin(), rx.end(), [](auto v) { return v == 1; }));
}

TEST_CASE("adaptive threshold follows the block mean") {
    auto cfg = ook(8);
    std::mt19937_64 rng(23);
    const auto bits = random_bits(rng, 400);
    auto b = modulate(bits, cfg);
    for (auto& x : b.samples) x += 10.0;
    CHECK(demodulate(b, cfg, Threshold::adaptive()) == bits);
}

TEST_CASE("OOK BER follows the Gaussian tail") {
    // integrate-and-dump over sps samples: decision noise sigma / sqrt(sps)
    const auto cfg = ook(8);
    for (double sigma : {1.2, 1.5, 1.9}) {
        const double analytic = q_function(cfg.modulation_depth * std::sqrt(8.0) / sigma);
        const double sim = ook_ber(sigma, 100000, 29);
        CHECK(sim <= 2.0 * analytic);
        CHECK(sim >= 0.5 * analytic);
    }
    CHECK(ook_ber(0.35, 10000, 31) <= 1e-3);
}

TEST_CASE("OOK BER decreases with SNR") {
    double prev = 1.0;
    for (double sigma : {2.4, 2.0, 1.6, 1.3, 1.0}) {
        const double ber = ook_ber(sigma, 100000, 37);
        CHECK(ber < prev);
        prev = ber;
    }
}

TEST_CASE("config validation") {
    auto code_of = [](ModemConfig c) {
        try {
            c.validate();
        } catch (const Error& e) {
            return std::optional<ErrorCode>(e.code());
        }
        return std::optional<ErrorCode>();
    };
    auto c = ook();
    CHECK_FALSE(code_of(c).has_value());
    c.samples_per_symbol = 1;
    CHECK(code_of(c) == ErrorCode::ConfigInvalid);
    c = ook();
    c.symbol_rate = 0.0;
    CHECK(code_of(c) == ErrorCode::ConfigInvalid);
    c = ook();
    c.dc_bias = 0.2;
    c.modulation_depth = 0.3;
    CHECK(code_of(c) == ErrorCode::ConfigInvalid);
    c = ook();
    c.modulation_depth = 1.5;
    c.dc_bias = 2.0;
    CHECK(code_of(c) == ErrorCode::ConfigInvalid);
    c = gmsk(3);
    CHECK(code_of(c) == ErrorCode::ConfigInvalid);
    CHECK_THROWS_AS(modulate({}, ook()), Error);

    auto g = gmsk(4);
    auto b = modulate({1, 0, 1}, g);
    b.sample_rate *= 2;
    CHECK_THROWS_AS(demodulate(b, g), Error);
}

TEST_CASE("names") {
    CHECK(scheme_from_string(to_string(Scheme::GMSK)) == Scheme::GMSK);
    CHECK(scheme_from_string("OOK") == Scheme::OOK);
    CHECK(phase_offset_from_string(to_string(PhaseOffset::Inverted)) == PhaseOffset::Inverted);
    CHECK_THROWS_AS(scheme_from_string("QPSK"), Error);
}

}  // TEST_SUITE
