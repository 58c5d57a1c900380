#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "vlcmux/signal.hpp"

namespace vlcmux::modem {

enum class Scheme { OOK, GMSK };
enum class PhaseOffset { InPhase, Inverted };

std::string to_string(Scheme s);
Scheme scheme_from_string(const std::string& s);
std::string to_string(PhaseOffset p);
PhaseOffset phase_offset_from_string(const std::string& s);

struct ModemConfig {
    Scheme scheme = Scheme::OOK;
    double symbol_rate = 100.0;
    std::size_t samples_per_symbol = 8;
    std::size_t bits_per_symbol = 1;
    double gmsk_bt = 0.35;
    std::size_t gmsk_span_symbols = 4;
    double dc_bias = 0.5;
    double modulation_depth = 0.5;

    double sample_rate() const { return symbol_rate * static_cast<double>(samples_per_symbol); }

    /// Throws Error(ConfigInvalid). GMSK additionally needs at least four
    /// samples per symbol for its fs/4 subcarrier.
    void validate() const;
};

/// Fixed decision level, or the block mean when absent.
struct Threshold {
    std::optional<double> fixed_level;

    static Threshold adaptive() { return {}; }
    static Threshold fixed(double level) { return {level}; }
};

SampleBlock modulate(const Bits& bits, const ModemConfig& cfg,
                     PhaseOffset offset = PhaseOffset::InPhase);

/// Returns floor(len / samples_per_symbol) bits.
Bits demodulate(const SampleBlock& block, const ModemConfig& cfg,
                Threshold threshold = Threshold::adaptive());

// GMSK internals, exposed for property checks.

/// Per-sample phase increments of one isolated +1 symbol. The pulse spans
/// gmsk_span_symbols symbols centered on the symbol and sums to pi/2.
std::vector<double> gmsk_phase_pulse(const ModemConfig& cfg);

/// Continuous Gaussian frequency pulse g(t) for time t in symbol periods,
/// normalized so its integral over the real line is one.
double gmsk_frequency_pulse(double t_symbols, double bt);

/// Modulator phase trajectory in radians, accumulated from the start of the
/// first symbol's pulse. Without tails the result covers exactly the bit
/// intervals; with tails it also covers the pulse spill before the first and
/// after the last bit, so an isolated symbol ends at +-pi/2.
std::vector<double> gmsk_phase_trajectory(const Bits& bits, const ModemConfig& cfg,
                                          bool include_tails = false);

/// Subcarrier frequency of the GMSK intensity waveform (a quarter of the
/// sample rate).
double gmsk_subcarrier_hz(const ModemConfig& cfg);

}  // namespace vlcmux::modem
