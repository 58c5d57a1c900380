#include "vlcmux/framing.hpp"

#include <algorithm>

#include "vlcmux/error.hpp"

namespace vlcmux::framing {

std::string to_string(IdKind k) { return k == IdKind::Barker13 ? "BARKER13" : "BARKER11_PADDED"; }

IdKind id_kind_from_string(const std::string& s) {
    if (s == "BARKER13") return IdKind::Barker13;
    if (s == "BARKER11_PADDED") return IdKind::Barker11Padded;
    throw Error(ErrorCode::ConfigInvalid, "unknown transmitter id kind '" + s + "'");
}

std::vector<int> barker_chips(std::size_t length) {
    switch (length) {
        case 2: return {1, -1};
        case 3: return {1, 1, -1};
        case 4: return {1, 1, -1, 1};
        case 5: return {1, 1, 1, -1, 1};
        case 7: return {1, 1, 1, -1, -1, 1, -1};
        case 11: return {1, 1, 1, -1, -1, -1, 1, -1, -1, 1, -1};
        case 13: return {1, 1, 1, 1, 1, -1, -1, 1, 1, -1, 1, -1, 1};
        default: break;
    }
    throw Error(ErrorCode::ConfigInvalid, "no Barker code of length " + std::to_string(length));
}

std::vector<int> aperiodic_autocorrelation(const std::vector<int>& chips) {
    std::vector<int> out(chips.size(), 0);
    for (std::size_t lag = 0; lag < chips.size(); ++lag)
        for (std::size_t i = 0; i + lag < chips.size(); ++i) out[lag] += chips[i] * chips[i + lag];
    return out;
}

TransmitterId make_id(IdKind kind, int label) {
    TransmitterId id;
    id.label = label;
    const auto chips = barker_chips(kind == IdKind::Barker13 ? 13 : 11);
    for (int c : chips) id.id_bits.push_back(c > 0 ? 1 : 0);
    if (kind == IdKind::Barker11Padded) {
        id.id_bits.push_back(1);
        id.id_bits.push_back(1);
    }
    return id;
}

Bits Packet::bits() const {
    Bits out = header.id_bits;
    out.insert(out.end(), payload.begin(), payload.end());
    return out;
}

Packet frame(const Bits& payload, const TransmitterId& id) {
    if (payload.size() != kPayloadBits)
        throw Error(ErrorCode::WrongPayloadLength,
                    "payload has " + std::to_string(payload.size()) + " bits, expected " +
                        std::to_string(kPayloadBits));
    if (id.id_bits.size() != kIdBits)
        throw Error(ErrorCode::ConfigInvalid, "transmitter id must be 13 bits");
    return Packet{id, payload};
}

std::pair<Bits, Bits> deframe(const Bits& packet_bits) {
    if (packet_bits.size() != kPacketBits)
        throw Error(ErrorCode::WrongPayloadLength, "packet must be 2096 bits");
    return {Bits(packet_bits.begin(), packet_bits.begin() + kIdBits),
            Bits(packet_bits.begin() + kIdBits, packet_bits.end())};
}

IdLookupTable::IdLookupTable(std::vector<TransmitterId> entries) : entries_(std::move(entries)) {
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        if (entries_[i].id_bits.size() != kIdBits)
            throw Error(ErrorCode::ConfigInvalid, "transmitter id must be 13 bits");
        for (std::size_t j = 0; j < i; ++j)
            if (entries_[j].id_bits == entries_[i].id_bits)
                throw Error(ErrorCode::ConfigInvalid, "duplicate transmitter id in lookup table");
    }
}

std::optional<int> IdLookupTable::lookup(const Bits& id_bits) const {
    for (const auto& e : entries_)
        if (e.id_bits == id_bits) return e.label;
    return std::nullopt;
}

const TransmitterId* IdLookupTable::find_label(int label) const {
    for (const auto& e : entries_)
        if (e.label == label) return &e;
    return nullptr;
}

int header_score(const Bits& bits, std::size_t offset, const Bits& id) {
    int score = 0;
    for (std::size_t i = 0; i < id.size(); ++i) score += bits[offset + i] == id[i] ? 1 : -1;
    return score;
}

namespace {

void check_detect_args(const IdLookupTable& table, int corr_threshold) {
    if (table.empty()) throw Error(ErrorCode::EmptyTable, "no transmitter ids registered");
    if (corr_threshold < 1 || corr_threshold > static_cast<int>(kIdBits))
        throw Error(ErrorCode::ConfigInvalid, "correlation threshold must lie in [1, 13]");
}

std::pair<const TransmitterId*, int> best_id(const Bits& bits, std::size_t pos,
                                             const IdLookupTable& table) {
    const TransmitterId* best = nullptr;
    int best_score = -static_cast<int>(kIdBits) - 1;
    for (const auto& e : table.entries()) {
        const int s = header_score(bits, pos, e.id_bits);
        if (s > best_score) {
            best_score = s;
            best = &e;
        }
    }
    return {best, best_score};
}

}  // namespace

std::vector<Detection> detect_packets(const Bits& bits, const IdLookupTable& table,
                                      int corr_threshold) {
    check_detect_args(table, corr_threshold);

    std::vector<Detection> out;
    std::size_t pos = 0;
    while (pos + kPacketBits <= bits.size()) {
        int best_score = corr_threshold - 1;
        const TransmitterId* best = nullptr;
        for (const auto& e : table.entries()) {
            const int s = header_score(bits, pos, e.id_bits);
            if (s > best_score) {
                best_score = s;
                best = &e;
            }
        }
        if (best == nullptr) {
            ++pos;
            continue;
        }
        Detection d;
        d.offset = pos;
        d.label = best->label;
        d.score = best_score;
        d.payload.assign(bits.begin() + static_cast<long>(pos + kIdBits),
                         bits.begin() + static_cast<long>(pos + kPacketBits));
        out.push_back(std::move(d));
        pos += kPacketBits;
    }
    return out;
}

std::optional<std::size_t> acquire_packet_phase(const Bits& bits, const IdLookupTable& table) {
    if (table.empty()) throw Error(ErrorCode::EmptyTable, "no transmitter ids registered");
    if (bits.size() < kIdBits) return std::nullopt;
    const std::size_t last = bits.size() - kIdBits;  // last offset where a header fits
    std::optional<std::size_t> phase;
    long best_total = 0;
    for (std::size_t p = 0; p < kPacketBits && p <= last; ++p) {
        long total = 0;
        for (std::size_t pos = p; pos <= last; pos += kPacketBits)
            total += best_id(bits, pos, table).second;
        if (!phase || total > best_total) {
            best_total = total;
            phase = p;
        }
    }
    return phase;
}

std::vector<Detection> detect_aligned(const Bits& bits, const IdLookupTable& table,
                                      int corr_threshold, std::size_t phase) {
    check_detect_args(table, corr_threshold);
    std::vector<Detection> out;
    for (std::size_t pos = phase; pos + kPacketBits <= bits.size(); pos += kPacketBits) {
        const auto [id, score] = best_id(bits, pos, table);
        if (score < corr_threshold) continue;
        Detection d;
        d.offset = pos;
        d.label = id->label;
        d.score = score;
        d.payload.assign(bits.begin() + static_cast<long>(pos + kIdBits),
                         bits.begin() + static_cast<long>(pos + kPacketBits));
        out.push_back(std::move(d));
    }
    return out;
}

std::vector<Detection> detect_synchronized(const Bits& bits, const IdLookupTable& table,
                                           int corr_threshold) {
    check_detect_args(table, corr_threshold);
    const auto phase = acquire_packet_phase(bits, table);
    if (!phase) return {};
    return detect_aligned(bits, table, corr_threshold, *phase);
}

std::vector<int> confirmed_labels(const std::vector<Detection>& detections) {
    std::vector<int> out;
    for (std::size_t i = 0; i + 1 < detections.size(); ++i) {
        const auto& a = detections[i];
        const auto& b = detections[i + 1];
        if (b.offset - a.offset != kPacketBits || a.label != b.label) continue;
        if (std::find(out.begin(), out.end(), a.label) == out.end()) out.push_back(a.label);
    }
    return out;
}

}  // namespace vlcmux::framing
