#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "vlcmux/signal.hpp"

namespace vlcmux::framing {

inline constexpr std::size_t kIdBits = 13;
inline constexpr std::size_t kPacketBits = 2096;
inline constexpr std::size_t kPayloadBits = kPacketBits - kIdBits;
inline constexpr int kDefaultCorrThreshold = 11;

enum class IdKind { Barker13, Barker11Padded };

std::string to_string(IdKind k);
IdKind id_kind_from_string(const std::string& s);

/// Canonical Barker chips in bipolar form.
std::vector<int> barker_chips(std::size_t length);

/// Aperiodic autocorrelation of a bipolar sequence at lags 0..n-1.
std::vector<int> aperiodic_autocorrelation(const std::vector<int>& chips);

struct TransmitterId {
    Bits id_bits;     // exactly kIdBits
    int label = 0;    // emitter index

    bool operator==(const TransmitterId&) const = default;
};

/// Barker-13 chips, or Barker-11 chips followed by "11"; +1 -> 1, -1 -> 0.
TransmitterId make_id(IdKind kind, int label = 0);

struct Packet {
    TransmitterId header;
    Bits payload;  // kPayloadBits

    Bits bits() const;
};

Packet frame(const Bits& payload, const TransmitterId& id);

/// Splits a packet-sized bit block back into header bits and payload.
std::pair<Bits, Bits> deframe(const Bits& packet_bits);

/// Registered transmitter IDs. Immutable once built.
class IdLookupTable {
public:
    IdLookupTable() = default;
    explicit IdLookupTable(std::vector<TransmitterId> entries);

    const std::vector<TransmitterId>& entries() const { return entries_; }
    bool empty() const { return entries_.empty(); }
    std::optional<int> lookup(const Bits& id_bits) const;
    const TransmitterId* find_label(int label) const;

private:
    std::vector<TransmitterId> entries_;
};

/// agreements - disagreements between `id` and bits[offset, offset+13).
int header_score(const Bits& bits, std::size_t offset, const Bits& id);

struct Detection {
    std::size_t offset = 0;
    int label = 0;
    Bits payload;
    int score = 0;
};

/// Greedy left-to-right scan. At each offset the best-scoring registered ID
/// is taken if it reaches corr_threshold and a whole packet fits; the scan
/// then jumps one packet length. Throws Error(EmptyTable) for an empty table
/// and Error(ConfigInvalid) for a threshold outside [1, 13].
std::vector<Detection> detect_packets(const Bits& bits, const IdLookupTable& table,
                                      int corr_threshold = kDefaultCorrThreshold);

/// Frame sync for a continuous back-to-back packet stream: the offset in
/// [0, 2096) whose header positions give the largest summed best-ID score.
/// Ties go to the smallest offset. Returns nullopt when no header fits.
std::optional<std::size_t> acquire_packet_phase(const Bits& bits, const IdLookupTable& table);

/// Detection restricted to offsets phase + k*2096. Once synchronised a missed
/// header costs one packet and never shifts the scan onto payload bits.
std::vector<Detection> detect_aligned(const Bits& bits, const IdLookupTable& table,
                                      int corr_threshold, std::size_t phase);

/// acquire_packet_phase followed by detect_aligned.
std::vector<Detection> detect_synchronized(const Bits& bits, const IdLookupTable& table,
                                           int corr_threshold);

/// Labels seen in two consecutive packet slots, i.e. two detections exactly
/// one packet length apart. Payload false alarms almost never repeat at
/// that spacing, real headers always do.
std::vector<int> confirmed_labels(const std::vector<Detection>& detections);

}  // namespace vlcmux::framing
