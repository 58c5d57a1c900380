#include "vlcmux/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "vlcmux/channel.hpp"
#include "vlcmux/error.hpp"

namespace vlcmux::metrics {

nlohmann::json snr_to_json(std::optional<double> snr_db) {
    if (!snr_db) return nullptr;
    if (std::isinf(*snr_db)) return *snr_db > 0 ? "inf" : "-inf";
    return *snr_db;
}

std::optional<double> snr_from_json(const nlohmann::json& j) {
    if (j.is_null()) return std::nullopt;
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (s == "inf") return std::numeric_limits<double>::infinity();
        if (s == "-inf") return -std::numeric_limits<double>::infinity();
        throw Error(ErrorCode::ParseError, "bad snr value '" + s + "'");
    }
    return j.get<double>();
}

nlohmann::json to_json(const LinkReport& r) {
    nlohmann::json j;
    j["emitter"] = r.emitter;
    j["ber"] = r.ber;
    j["per_percent"] = r.per_percent ? nlohmann::json(*r.per_percent) : nlohmann::json(nullptr);
    j["snr_db"] = snr_to_json(r.snr_db);
    j["goodput_bps"] = r.goodput_bps;
    j["bits_compared"] = r.bits_compared;
    j["bit_errors"] = r.bit_errors;
    j["packets_expected"] = r.packets_expected;
    j["packets_detected_valid"] = r.packets_detected_valid;
    return j;
}

std::size_t hamming_distance(const Bits& tx, const Bits& rx) {
    if (tx.size() != rx.size())
        throw Error(ErrorCode::LengthMismatch, "bit streams differ in length");
    std::size_t d = 0;
    for (std::size_t i = 0; i < tx.size(); ++i) d += (tx[i] != 0) != (rx[i] != 0);
    return d;
}

double bit_error_rate(const Bits& tx, const Bits& rx) {
    const std::size_t d = hamming_distance(tx, rx);
    if (tx.empty()) throw Error(ErrorCode::LengthMismatch, "no bits to compare");
    return static_cast<double>(d) / static_cast<double>(tx.size());
}

std::size_t count_valid(std::span<const framing::Detection> detections,
                        const DetectionFilter& filter) {
    return static_cast<std::size_t>(
        std::count_if(detections.begin(), detections.end(), [&](const framing::Detection& d) {
            if (d.score < filter.min_score) return false;
            if (filter.label && d.label != *filter.label) return false;
            if (filter.packet_phase && d.offset % framing::kPacketBits != *filter.packet_phase)
                return false;
            return true;
        }));
}

double packet_error_rate(std::size_t valid, std::size_t expected) {
    if (expected == 0) throw Error(ErrorCode::ZeroExpected, "no packets were expected");
    const double per = 100.0 * (1.0 - static_cast<double>(valid) / static_cast<double>(expected));
    return std::clamp(per, 0.0, 100.0);
}

double packet_error_rate(std::span<const framing::Detection> detections, std::size_t expected,
                         const DetectionFilter& filter) {
    return packet_error_rate(count_valid(detections, filter), expected);
}

double goodput(double ber, double code_rate, double symbol_rate, double bits_per_symbol) {
    if (!(ber >= 0.0 && ber <= 1.0)) throw Error(ErrorCode::ConfigInvalid, "BER must lie in [0, 1]");
    if (!(code_rate > 0.0 && code_rate <= 1.0))
        throw Error(ErrorCode::ConfigInvalid, "code rate must lie in (0, 1]");
    return (1.0 - ber) * code_rate * symbol_rate * bits_per_symbol;
}

double snr_from_trace(const SampleBlock& signal_dwell, const SampleBlock& noise_dwell) {
    return channel::received_snr_db(signal_dwell, noise_dwell);
}

}  // namespace vlcmux::metrics
