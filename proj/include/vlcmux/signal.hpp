#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace vlcmux {

/// One bit per element, values 0 or 1.
using Bits = std::vector<std::uint8_t>;

/// Real-valued intensity samples at a fixed rate.
struct SampleBlock {
    std::vector<double> samples;
    double sample_rate = 1.0;

    std::size_t size() const { return samples.size(); }
    bool empty() const { return samples.empty(); }
};

/// "0101" <-> {0,1,0,1}. Throws Error(ParseError) on other characters.
Bits bits_from_string(std::string_view text);
std::string bits_to_string(const Bits& bits);

}  // namespace vlcmux
