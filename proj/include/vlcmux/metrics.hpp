#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>

#include "vlcmux/framing.hpp"
#include "vlcmux/signal.hpp"

#include <json.hpp>

namespace vlcmux::metrics {

struct LinkReport {
    int emitter = 0;
    double ber = 0.0;
    std::optional<double> per_percent;  // absent when no whole packet was expected
    std::optional<double> snr_db;  // absent when no Discovery scan measured it
    double goodput_bps = 0.0;
    std::size_t bits_compared = 0;
    std::size_t bit_errors = 0;
    std::size_t packets_expected = 0;
    std::size_t packets_detected_valid = 0;
};

nlohmann::json to_json(const LinkReport& r);

/// Hamming distance over length. Throws Error(LengthMismatch).
double bit_error_rate(const Bits& tx, const Bits& rx);

std::size_t hamming_distance(const Bits& tx, const Bits& rx);

/// Which detections count toward PER.
struct DetectionFilter {
    std::optional<int> label;
    /// offset % packet length that true packet starts fall on
    std::optional<std::size_t> packet_phase;
    int min_score = framing::kDefaultCorrThreshold;
};

std::size_t count_valid(std::span<const framing::Detection> detections,
                        const DetectionFilter& filter);

/// 100 * (1 - valid/expected), clamped to [0, 100]. Throws Error(ZeroExpected).
double packet_error_rate(std::size_t valid, std::size_t expected);
double packet_error_rate(std::span<const framing::Detection> detections, std::size_t expected,
                         const DetectionFilter& filter = {});

/// (1 - BER) * code rate * symbols/s * bits/symbol.
double goodput(double ber, double code_rate, double symbol_rate, double bits_per_symbol);

/// SNR of a (signal dwell, noise dwell) trace pair.
double snr_from_trace(const SampleBlock& signal_dwell, const SampleBlock& noise_dwell);

/// JSON representation of an SNR value: number, or "inf"/"-inf".
nlohmann::json snr_to_json(std::optional<double> snr_db);
std::optional<double> snr_from_json(const nlohmann::json& j);

}  // namespace vlcmux::metrics
