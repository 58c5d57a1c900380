#include "vlcmux/modem.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <numeric>

#include "vlcmux/error.hpp"

namespace vlcmux::modem {

namespace {

constexpr double kPi = std::numbers::pi;

double q_function(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

struct Pulse {
    std::vector<double> taps;  // per-sample phase increment, sums to pi/2
    long first_offset = 0;     // sample offset of taps[0] from the symbol start
};

Pulse make_pulse(const ModemConfig& cfg) {
    const auto sps = static_cast<long>(cfg.samples_per_symbol);
    const auto span = static_cast<long>(cfg.gmsk_span_symbols);
    Pulse p;
    p.first_offset = -((span - 1) * sps) / 2;
    p.taps.resize(static_cast<std::size_t>(span * sps));
    for (std::size_t j = 0; j < p.taps.size(); ++j) {
        const long rel = p.first_offset + static_cast<long>(j);
        // sample midpoint relative to the symbol center, in symbol periods
        const double t = (static_cast<double>(rel) + 0.5) / static_cast<double>(sps) - 0.5;
        p.taps[j] = gmsk_frequency_pulse(t, cfg.gmsk_bt);
    }
    const double sum = std::accumulate(p.taps.begin(), p.taps.end(), 0.0);
    for (auto& v : p.taps) v *= (kPi / 2.0) / sum;
    return p;
}

// Phase increments for every sample from the first pulse start to the last
// pulse end. Returns the increments and the index of bit 0's first sample.
std::pair<std::vector<double>, std::size_t> phase_increments(const Bits& bits,
                                                             const ModemConfig& cfg) {
    const Pulse pulse = make_pulse(cfg);
    const auto sps = static_cast<long>(cfg.samples_per_symbol);
    const auto lead = static_cast<std::size_t>(-pulse.first_offset);
    const long n_bits = static_cast<long>(bits.size());
    const long last_end = (n_bits - 1) * sps + pulse.first_offset +
                          static_cast<long>(pulse.taps.size());
    const std::size_t total = static_cast<std::size_t>(last_end) + lead;
    std::vector<double> inc(total, 0.0);
    for (long k = 0; k < n_bits; ++k) {
        const double a = bits[static_cast<std::size_t>(k)] ? 1.0 : -1.0;
        const auto start = static_cast<std::size_t>(k * sps + pulse.first_offset +
                                                    static_cast<long>(lead));
        for (std::size_t j = 0; j < pulse.taps.size(); ++j) inc[start + j] += a * pulse.taps[j];
    }
    return {std::move(inc), lead};
}

void check_block(const SampleBlock& block, const ModemConfig& cfg) {
    if (block.size() < cfg.samples_per_symbol)
        throw Error(ErrorCode::BlockTooShort, "block holds fewer samples than one symbol");
    const double expected = cfg.sample_rate();
    if (std::abs(block.sample_rate - expected) > 1e-9 * expected)
        throw Error(ErrorCode::ConfigInvalid, "block sample rate does not match modem config");
}

Bits demodulate_ook(const SampleBlock& block, const ModemConfig& cfg, double level) {
    const std::size_t sps = cfg.samples_per_symbol;
    const std::size_t n = block.size() / sps;
    Bits out(n);
    for (std::size_t k = 0; k < n; ++k) {
        double acc = 0.0;
        for (std::size_t i = 0; i < sps; ++i) acc += block.samples[k * sps + i];
        out[k] = acc / static_cast<double>(sps) > level ? 1 : 0;
    }
    return out;
}

// Quadrature downconversion from the fs/4 subcarrier, two-tap image
// rejection, then per-symbol summation of the phase differences.
Bits demodulate_gmsk(const SampleBlock& block, const ModemConfig& cfg, double level) {
    using cd = std::complex<double>;
    static const cd kRot[4] = {cd(1, 0), cd(0, -1), cd(-1, 0), cd(0, 1)};
    const std::size_t sps = cfg.samples_per_symbol;
    const std::size_t len = block.size();
    const std::size_t n = len / sps;

    std::vector<cd> base(len);
    for (std::size_t m = 0; m < len; ++m) base[m] = (block.samples[m] - level) * kRot[m % 4];

    std::vector<double> dphi;
    if (len >= 3) {
        std::vector<cd> smooth(len - 1);
        for (std::size_t m = 0; m + 1 < len; ++m) smooth[m] = base[m] + base[m + 1];
        dphi.resize(len - 2);
        for (std::size_t m = 0; m + 2 < len; ++m)
            dphi[m] = std::arg(smooth[m + 1] * std::conj(smooth[m]));
    }

    Bits out(n);
    for (std::size_t k = 0; k < n; ++k) {
        double acc = 0.0;
        const std::size_t end = std::min((k + 1) * sps, dphi.size());
        for (std::size_t m = k * sps; m < end; ++m) acc += dphi[m];
        out[k] = acc > 0.0 ? 1 : 0;
    }
    return out;
}

}  // namespace

std::string to_string(Scheme s) { return s == Scheme::OOK ? "OOK" : "GMSK"; }

Scheme scheme_from_string(const std::string& s) {
    if (s == "OOK" || s == "ook") return Scheme::OOK;
    if (s == "GMSK" || s == "gmsk") return Scheme::GMSK;
    throw Error(ErrorCode::ConfigInvalid, "unknown modulation scheme '" + s + "'");
}

std::string to_string(PhaseOffset p) { return p == PhaseOffset::InPhase ? "IN_PHASE" : "INVERTED"; }

PhaseOffset phase_offset_from_string(const std::string& s) {
    if (s == "IN_PHASE") return PhaseOffset::InPhase;
    if (s == "INVERTED") return PhaseOffset::Inverted;
    throw Error(ErrorCode::ConfigInvalid, "unknown phase offset '" + s + "'");
}

void ModemConfig::validate() const {
    auto fail = [](const std::string& msg) { throw Error(ErrorCode::ConfigInvalid, msg); };
    if (!(symbol_rate > 0.0) || !std::isfinite(symbol_rate)) fail("symbol rate must be positive");
    if (samples_per_symbol < 2) fail("need at least two samples per symbol");
    if (bits_per_symbol != 1) fail("only one bit per symbol is supported");
    if (!(modulation_depth > 0.0) || modulation_depth > 1.0)
        fail("modulation depth must lie in (0, 1]");
    if (dc_bias < modulation_depth) fail("dc bias below modulation depth gives negative intensity");
    if (scheme == Scheme::GMSK) {
        if (samples_per_symbol < 4) fail("GMSK needs at least four samples per symbol");
        if (!(gmsk_bt > 0.0)) fail("GMSK bandwidth-time product must be positive");
        if (gmsk_span_symbols < 1) fail("GMSK pulse span must be at least one symbol");
    }
}

double gmsk_frequency_pulse(double t, double bt) {
    const double k = 2.0 * kPi * bt / std::sqrt(std::numbers::ln2);
    return q_function(k * (t - 0.5)) - q_function(k * (t + 0.5));
}

std::vector<double> gmsk_phase_pulse(const ModemConfig& cfg) {
    cfg.validate();
    return make_pulse(cfg).taps;
}

double gmsk_subcarrier_hz(const ModemConfig& cfg) { return cfg.sample_rate() / 4.0; }

std::vector<double> gmsk_phase_trajectory(const Bits& bits, const ModemConfig& cfg,
                                          bool include_tails) {
    cfg.validate();
    if (bits.empty()) return {};
    auto [inc, lead] = phase_increments(bits, cfg);
    std::vector<double> phase(inc.size());
    std::partial_sum(inc.begin(), inc.end(), phase.begin());
    if (include_tails) return phase;
    const std::size_t n = bits.size() * cfg.samples_per_symbol;
    return {phase.begin() + static_cast<long>(lead),
            phase.begin() + static_cast<long>(lead + n)};
}

SampleBlock modulate(const Bits& bits, const ModemConfig& cfg, PhaseOffset offset) {
    cfg.validate();
    if (bits.empty()) throw Error(ErrorCode::ConfigInvalid, "cannot modulate an empty bit sequence");
    const double sign = offset == PhaseOffset::Inverted ? -1.0 : 1.0;
    const std::size_t sps = cfg.samples_per_symbol;
    SampleBlock out;
    out.sample_rate = cfg.sample_rate();
    out.samples.resize(bits.size() * sps);

    if (cfg.scheme == Scheme::OOK) {
        for (std::size_t k = 0; k < bits.size(); ++k) {
            const double m = bits[k] ? 1.0 : -1.0;
            const double v = cfg.dc_bias + sign * cfg.modulation_depth * m;
            for (std::size_t i = 0; i < sps; ++i) out.samples[k * sps + i] = v;
        }
        return out;
    }

    const auto phase = gmsk_phase_trajectory(bits, cfg, false);
    for (std::size_t m = 0; m < phase.size(); ++m) {
        const double carrier = kPi / 2.0 * static_cast<double>(m % 4);
        out.samples[m] = cfg.dc_bias + sign * cfg.modulation_depth * std::cos(carrier + phase[m]);
    }
    return out;
}

Bits demodulate(const SampleBlock& block, const ModemConfig& cfg, Threshold threshold) {
    cfg.validate();
    check_block(block, cfg);
    double level = 0.0;
    if (threshold.fixed_level) {
        level = *threshold.fixed_level;
    } else {
        level = std::accumulate(block.samples.begin(), block.samples.end(), 0.0) /
                static_cast<double>(block.size());
    }
    return cfg.scheme == Scheme::OOK ? demodulate_ook(block, cfg, level)
                                     : demodulate_gmsk(block, cfg, level);
}

}  // namespace vlcmux::modem
