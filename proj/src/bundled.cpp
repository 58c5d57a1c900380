
#include <cmath>
#include <numbers>
#include <utility>

#include "vlcmux/error.hpp"
#include "vlcmux/scenario.hpp"

namespace vlcmux {

namespace {

// Prototype bench: 1x2 shutter, LEDs 15.5 cm from the lens, placed 16 cm
// apart (just above the 14.88 cm minimum).
Scenario prototype(const std::string& name) {
    Scenario s;
    s.name = name;
    s.rng_seed = 20190701;
    s.placement.positions = {{-0.08, 0.0}, {0.08, 0.0}};
    EmitterSpec led1;
    led1.id = framing::IdKind::Barker13;
    led1.source.seed = 101;
    EmitterSpec led2;
    led2.id = framing::IdKind::Barker11Padded;
    led2.source.seed = 202;
    s.emitters = {led1, led2};
    s.channel.ambient_dc = {0.0, 0.0};
    s.channel.saturation_level = 3.0;
    return s;
}

// 100 Hz OOK, 10^4+ bits, fixed shutter mask.
Scenario table1(int type, int case_no) {
    auto s = prototype("table1_type" + std::to_string(type) + "_case" + std::to_string(case_no));
    s.modem.scheme = modem::Scheme::OOK;
    s.modem.symbol_rate = 100.0;
    s.modem.samples_per_symbol = 8;
    s.modem.dc_bias = 0.5;
    s.modem.modulation_depth = 0.5;
    s.duration_s = 105.0;
    s.channel.noise_sigma = 0.45;
    s.receiver.fixed_threshold = true;
    s.receiver.desired_emitter = 0;
    s.receiver.mask = case_no == 1 ? "11" : "10";
    switch (type) {
        case 1:
            s.emitters[1].enabled = false;
            break;
        case 2:
            // ambient light reaching the photodiode through pixel 2 saturates it
            s.emitters[1].enabled = false;
            s.channel.ambient_dc = {0.0, 4.0};
            break;
        case 3:
            s.emitters[1].source.seed = s.emitters[0].source.seed;
            break;
        case 4:
            s.emitters[1].source.seed = s.emitters[0].source.seed;
            s.emitters[1].phase_offset = modem::PhaseOffset::Inverted;
            break;
        default:
            throw Error(ErrorCode::ScenarioInvalid, "no Table I signaling type " + std::to_string(type));
    }
    return s;
}

// GMSK at the three high rates, simulated at 4 samples/symbol over 10^5 bits.
Scenario table2(const std::string& rate_name, double symbol_rate, int config) {
    auto s = prototype("table2_" + rate_name + "_config" + std::to_string(config));
    s.modem.scheme = modem::Scheme::GMSK;
    s.modem.symbol_rate = symbol_rate;
    s.modem.samples_per_symbol = 4;
    s.modem.dc_bias = 0.5;
    s.modem.modulation_depth = 0.5;
    s.rng_seed += static_cast<std::uint64_t>(symbol_rate / 1e3);
    s.duration_s = 1e5 / symbol_rate;
    s.channel.noise_sigma = 0.045;
    s.emitters[1].gain = 0.8;
    s.receiver.fixed_threshold = false;
    switch (config) {
        case 1: s.receiver.mask = "10"; s.receiver.desired_emitter = 0; break;
        case 2: s.receiver.mask = "01"; s.receiver.desired_emitter = 1; break;
        case 3: s.receiver.mask = "11"; s.receiver.desired_emitter = 0; break;
        default:
            throw Error(ErrorCode::ScenarioInvalid, "no Table II configuration " + std::to_string(config));
    }
    return s;
}

// Shutter controller runs: GMSK at 100 kbaud, T_s = 70 ms (7000 bits per
// dwell, enough for two whole packets at any packet phase).
Scenario protocol(const std::string& name) {
    auto s = prototype(name);
    s.modem.scheme = modem::Scheme::GMSK;
    s.modem.symbol_rate = 100e3;
    s.modem.samples_per_symbol = 4;
    s.channel.noise_sigma = 0.02;
    s.receiver.fixed_threshold = false;
    s.protocol.switching_time_s = 0.07;
    s.protocol.snr_threshold_db = 10.0;
    s.protocol.select_target = 0;
    s.duration_s = 0.1;
    return s;
}

// LED 2 off, pixels alternated; ~20 dB on pixel 1 and ~0 dB on pixel 2.
Scenario table4() {
    auto s = prototype("table4_snr");
    s.modem.scheme = modem::Scheme::GMSK;
    s.modem.symbol_rate = 25e3;
    s.modem.samples_per_symbol = 4;
    // (S+N)/N = 100 with S = depth^2/2 for GMSK. The all-closed reference
    // sees noise rectified at zero intensity, variance sigma^2 (1/2 - 1/2pi).
    const double signal_var = 0.5 * 0.5 / 2.0;
    const double rectified = 0.5 - 1.0 / (2.0 * std::numbers::pi);
    s.channel.noise_sigma = std::sqrt(signal_var / (100.0 * rectified - 1.0));
    s.emitters[1].enabled = false;
    s.receiver.fixed_threshold = false;
    s.protocol.switching_time_s = 0.1;
    s.protocol.select_target = 0;
    s.duration_s = 0.0;
    return s;
}

}  // namespace

std::vector<std::string> bundled_scenario_names() {
    std::vector<std::string> out;
    for (int type = 1; type <= 4; ++type)
        for (int c = 1; c <= 2; ++c)
            out.push_back("table1_type" + std::to_string(type) + "_case" + std::to_string(c));
    for (const char* rate : {"500k", "1m", "2m"})
        for (int c = 1; c <= 3; ++c)
            out.push_back(std::string("table2_") + rate + "_config" + std::to_string(c));
    out.push_back("table4_snr");
    out.push_back("protocol_clean");
    out.push_back("protocol_dark");
    out.push_back("protocol_corrupt_header");
    return out;
}

Scenario bundled_scenario(const std::string& name) {
    for (int type = 1; type <= 4; ++type)
        for (int c = 1; c <= 2; ++c)
            if (name == "table1_type" + std::to_string(type) + "_case" + std::to_string(c))
                return table1(type, c);
    const std::pair<const char*, double> rates[] = {{"500k", 500e3}, {"1m", 1e6}, {"2m", 2e6}};
    for (const auto& [rate, rs] : rates)
        for (int c = 1; c <= 3; ++c)
            if (name == std::string("table2_") + rate + "_config" + std::to_string(c))
                return table2(rate, rs, c);
    if (name == "table4_snr") return table4();
    if (name == "protocol_clean") return protocol(name);
    if (name == "protocol_dark") {
        auto s = protocol(name);
        s.emitters[0].enabled = false;
        s.emitters[1].enabled = false;
        return s;
    }
    if (name == "protocol_corrupt_header") {
        // LED 1 sends every header with 2 flipped bits (score 9 < 11)
        auto s = protocol(name);
        s.emitters[1].enabled = false;
        s.emitters[0].header_flips = 2;
        return s;
    }
    throw Error(ErrorCode::ScenarioInvalid, "no bundled scenario named '" + name + "'");
}

}  // namespace vlcmux
