#include "vlcmux/channel.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "vlcmux/error.hpp"

namespace vlcmux::channel {

PixelMask PixelMask::only(std::size_t pixels, std::size_t pixel) {
    PixelMask m(pixels, false);
    m.set(pixel, true);
    return m;
}

PixelMask PixelMask::from_pixels(std::size_t pixels, const std::vector<std::size_t>& open) {
    PixelMask m(pixels, false);
    for (auto p : open) m.set(p, true);
    return m;
}

std::size_t PixelMask::open_count() const {
    return static_cast<std::size_t>(std::count(open_.begin(), open_.end(), std::uint8_t{1}));
}

std::vector<std::size_t> PixelMask::open_pixels() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < open_.size(); ++i)
        if (open_[i]) out.push_back(i);
    return out;
}

std::string PixelMask::to_string() const {
    std::string s(open_.size(), '0');
    for (std::size_t i = 0; i < open_.size(); ++i)
        if (open_[i]) s[i] = '1';
    return s;
}

void ChannelConfig::validate(std::size_t pixels) const {
    auto fail = [](const std::string& msg) { throw Error(ErrorCode::ConfigInvalid, msg); };
    if (emitter_gain.size() != emitter_pixel.size())
        fail("emitter gain and pixel lists differ in length");
    for (double g : emitter_gain)
        if (!(g >= 0.0)) fail("emitter gains must be nonnegative");
    for (auto p : emitter_pixel)
        if (p >= pixels)
            throw Error(ErrorCode::InvalidPixel, "emitter mapped to pixel " + std::to_string(p) +
                                                     " of a " + std::to_string(pixels) +
                                                     "-pixel shutter");
    if (!(closed_leakage >= 0.0 && closed_leakage < 1.0)) fail("closed leakage must lie in [0, 1)");
    if (!ambient_dc.empty() && ambient_dc.size() != pixels)
        fail("ambient dc needs one entry per pixel");
    if (!(noise_sigma >= 0.0)) fail("noise sigma must be nonnegative");
    if (!(saturation_level > 0.0)) fail("saturation level must be positive");
}

SampleBlock receive(std::span<const SampleBlock> emitter_blocks, const PixelMask& mask,
                    const ChannelConfig& cfg) {
    cfg.validate(mask.size());
    if (emitter_blocks.size() != cfg.emitter_gain.size())
        throw Error(ErrorCode::LengthMismatch, "one waveform per configured emitter is required");

    SampleBlock out;
    std::size_t len = 0;
    if (!emitter_blocks.empty()) {
        len = emitter_blocks.front().size();
        out.sample_rate = emitter_blocks.front().sample_rate;
        for (const auto& b : emitter_blocks)
            if (b.size() != len || b.sample_rate != out.sample_rate)
                throw Error(ErrorCode::LengthMismatch, "emitter waveforms differ in length or rate");
    }

    auto gate = [&](std::size_t pixel) { return mask.is_open(pixel) ? 1.0 : cfg.closed_leakage; };

    double ambient = 0.0;
    for (std::size_t p = 0; p < cfg.ambient_dc.size(); ++p) ambient += cfg.ambient_dc[p] * gate(p);

    out.samples.assign(len, ambient);
    for (std::size_t e = 0; e < emitter_blocks.size(); ++e) {
        const double w = cfg.emitter_gain[e] * gate(cfg.emitter_pixel[e]);
        if (w == 0.0) continue;
        const auto& x = emitter_blocks[e].samples;
        for (std::size_t t = 0; t < len; ++t) out.samples[t] += w * x[t];
    }

    if (cfg.noise_sigma > 0.0) {
        std::mt19937_64 rng(cfg.rng_seed);
        std::normal_distribution<double> noise(0.0, cfg.noise_sigma);
        for (auto& v : out.samples) v += noise(rng);
    }
    for (auto& v : out.samples) v = std::clamp(v, 0.0, cfg.saturation_level);
    return out;
}

double ac_power(const SampleBlock& block) {
    if (block.empty()) throw Error(ErrorCode::BlockTooShort, "empty block has no power");
    double mean = 0.0;
    for (double v : block.samples) mean += v;
    mean /= static_cast<double>(block.size());
    double acc = 0.0;
    for (double v : block.samples) acc += (v - mean) * (v - mean);
    return acc / static_cast<double>(block.size());
}

double received_snr_db(const SampleBlock& signal_only, const SampleBlock& noise_only) {
    const double ps = ac_power(signal_only);
    const double pn = ac_power(noise_only);
    if (pn == 0.0) return ps == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(ps / pn);
}

}  // namespace vlcmux::channel
