#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "vlcmux/signal.hpp"

namespace vlcmux::channel {

/// OPEN/CLOSED state of every shutter pixel, row-major.
class PixelMask {
public:
    PixelMask() = default;
    explicit PixelMask(std::size_t pixels, bool open = false) : open_(pixels, open) {}

    static PixelMask all_open(std::size_t pixels) { return PixelMask(pixels, true); }
    static PixelMask all_closed(std::size_t pixels) { return PixelMask(pixels, false); }
    static PixelMask only(std::size_t pixels, std::size_t pixel);
    static PixelMask from_pixels(std::size_t pixels, const std::vector<std::size_t>& open);

    std::size_t size() const { return open_.size(); }
    bool is_open(std::size_t pixel) const { return open_.at(pixel) != 0; }
    void set(std::size_t pixel, bool open) { open_.at(pixel) = open ? 1 : 0; }
    std::size_t open_count() const;
    std::vector<std::size_t> open_pixels() const;

    /// "10" style string, one character per pixel.
    std::string to_string() const;

    bool operator==(const PixelMask&) const = default;

private:
    std::vector<std::uint8_t> open_;
};

struct ChannelConfig {
    std::vector<double> emitter_gain;
    std::vector<std::size_t> emitter_pixel;
    double closed_leakage = 0.0;
    std::vector<double> ambient_dc;  // per pixel; empty means none
    double noise_sigma = 0.0;
    double saturation_level = std::numeric_limits<double>::infinity();
    std::uint64_t rng_seed = 0;

    /// Throws Error(ConfigInvalid) or Error(InvalidPixel) for `pixels` pixels.
    void validate(std::size_t pixels) const;
};

/// Gated sum of emitter waveforms plus ambient DC and AWGN, clipped to
/// [0, saturation_level]. Gate is 1 for an open pixel and closed_leakage
/// otherwise. Noise comes from a generator seeded with cfg.rng_seed.
SampleBlock receive(std::span<const SampleBlock> emitter_blocks, const PixelMask& mask,
                    const ChannelConfig& cfg);

/// AC-coupled power ratio in dB. A zero-power noise reference gives +inf
/// (or 0 dB when the signal has zero power as well).
double received_snr_db(const SampleBlock& signal_only, const SampleBlock& noise_only);

/// Mean-removed power of a block.
double ac_power(const SampleBlock& block);

}  // namespace vlcmux::channel
