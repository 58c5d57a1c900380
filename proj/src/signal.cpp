#include "vlcmux/signal.hpp"

#include "vlcmux/error.hpp"

namespace vlcmux {

Bits bits_from_string(std::string_view text) {
    Bits out;
    out.reserve(text.size());
    for (char c : text) {
        if (c == '0' || c == '1')
            out.push_back(static_cast<std::uint8_t>(c - '0'));
        else
            throw Error(ErrorCode::ParseError, std::string("bad bit character '") + c + "'");
    }
    return out;
}

std::string bits_to_string(const Bits& bits) {
    std::string out(bits.size(), '0');
    for (std::size_t i = 0; i < bits.size(); ++i)
        if (bits[i]) out[i] = '1';
    return out;
}

}  // namespace vlcmux
