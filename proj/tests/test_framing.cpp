#include "doctest.h"

#include <cmath>
#include <random>

#include "vlcmux/error.hpp"
#include "vlcmux/framing.hpp"

using namespace vlcmux;
using namespace vlcmux::framing;

namespace {

Bits random_bits(std::mt19937_64& rng, std::size_t n) {
    std::bernoulli_distribution b(0.5);
    Bits out(n);
    for (auto& x : out) x = b(rng) ? 1 : 0;
    return out;
}

IdLookupTable both_ids() {
    return IdLookupTable({make_id(IdKind::Barker13, 0), make_id(IdKind::Barker11Padded, 1)});
}

void append(Bits& dst, const Bits& src) { dst.insert(dst.end(), src.begin(), src.end()); }

}  // namespace

TEST_SUITE("framing") {

TEST_CASE("id bit patterns") {
    CHECK(bits_to_string(make_id(IdKind::Barker13).id_bits) == "1111100110101");
    CHECK(bits_to_string(make_id(IdKind::Barker11Padded).id_bits) == "1110001001011");
    CHECK(make_id(IdKind::Barker13).id_bits != make_id(IdKind::Barker11Padded).id_bits);
    CHECK(make_id(IdKind::Barker11Padded, 4).label == 4);
    CHECK(id_kind_from_string(to_string(IdKind::Barker11Padded)) == IdKind::Barker11Padded);
    CHECK_THROWS_AS(id_kind_from_string("GOLD"), Error);
}

TEST_CASE("Barker autocorrelation by brute force") {
    for (std::size_t n : {11u, 13u}) {
        const auto c = barker_chips(n);
        REQUIRE(c.size() == n);
        const auto r = aperiodic_autocorrelation(c);
        REQUIRE(r.size() == n);
        for (std::size_t lag = 0; lag < n; ++lag) {
            int acc = 0;
            for (std::size_t i = 0; i + lag < n; ++i) acc += c[i] * c[i + lag];
            CHECK(r[lag] == acc);
            if (lag == 0)
                CHECK(acc == static_cast<int>(n));
            else
                CHECK(std::abs(acc) <= 1);
        }
    }
    CHECK_THROWS_AS(barker_chips(12), Error);
}

TEST_CASE("frame and deframe") {
    const Bits zeros(kPayloadBits, 0);
    const auto p = frame(zeros, make_id(IdKind::Barker13));
    const auto bits = p.bits();
    CHECK(bits.size() == kPacketBits);
    CHECK(bits_to_string(Bits(bits.begin(), bits.begin() + 13)) == "1111100110101");
    const auto [header, payload] = deframe(bits);
    CHECK(header == make_id(IdKind::Barker13).id_bits);
    CHECK(payload == zeros);

    try {
        frame(Bits(kPayloadBits + 1, 0), make_id(IdKind::Barker13));
        FAIL("expected wrong-payload-length");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::WrongPayloadLength);
    }
    CHECK_THROWS_AS(deframe(Bits(kPacketBits - 1, 0)), Error);
}

TEST_CASE("lookup table") {
    const auto t = both_ids();
    CHECK(t.lookup(make_id(IdKind::Barker13).id_bits) == std::optional<int>(0));
    CHECK(t.lookup(make_id(IdKind::Barker11Padded).id_bits) == std::optional<int>(1));
    CHECK_FALSE(t.lookup(Bits(13, 0)).has_value());
    REQUIRE(t.find_label(1) != nullptr);
    CHECK(t.find_label(7) == nullptr);
    CHECK_THROWS_AS(IdLookupTable({make_id(IdKind::Barker13, 0), make_id(IdKind::Barker13, 1)}), Error);
}

TEST_CASE("two back-to-back packets") {
    std::mt19937_64 rng(1);
    const auto id = make_id(IdKind::Barker11Padded, 1);
    Bits s;
    const auto p = random_bits(rng, kPayloadBits);
    const auto q = random_bits(rng, kPayloadBits);
    append(s, frame(p, id).bits());
    append(s, frame(q, id).bits());
    const auto d = detect_packets(s, both_ids(), kDefaultCorrThreshold);
    REQUIRE(d.size() == 2);
    CHECK(d[0].offset == 0);
    CHECK(d[1].offset == kPacketBits);
    CHECK(d[0].label == 1);
    CHECK(d[1].label == 1);
    CHECK(d[0].score == 13);
    CHECK(d[0].payload == p);
    CHECK(d[1].payload == q);
}

TEST_CASE("score arithmetic with flipped header bits") {
    std::mt19937_64 rng(2);
    auto bits = frame(random_bits(rng, kPayloadBits), make_id(IdKind::Barker13, 0)).bits();
    for (std::size_t i : {0u, 5u, 12u}) bits[i] ^= 1;
    CHECK(header_score(bits, 0, make_id(IdKind::Barker13).id_bits) == 7);
    const IdLookupTable t({make_id(IdKind::Barker13, 0)});
    const auto d = detect_packets(bits, t, 7);
    REQUIRE_FALSE(d.empty());
    CHECK(d[0].offset == 0);
    CHECK(d[0].score == 7);
    const auto strict = detect_packets(bits, t, 8);
    CHECK((strict.empty() || strict[0].offset != 0));
}

TEST_CASE("packet must fit in the stream") {
    const auto bits = frame(Bits(kPayloadBits, 0), make_id(IdKind::Barker13, 0)).bits();
    const Bits cut(bits.begin(), bits.end() - 1);
    CHECK(detect_packets(cut, both_ids(), 13).empty());
    CHECK(detect_packets(bits, both_ids(), 13).size() == 1);
}

TEST_CASE("argument errors") {
    const Bits bits(5000, 0);
    try {
        detect_packets(bits, IdLookupTable{}, 11);
        FAIL("expected empty-table");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::EmptyTable);
    }
    CHECK_THROWS_AS(detect_packets(bits, both_ids(), 0), Error);
    CHECK_THROWS_AS(detect_packets(bits, both_ids(), 14), Error);
    CHECK_THROWS_AS(detect_synchronized(bits, IdLookupTable{}, 11), Error);
}

TEST_CASE("detection completeness") {
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<int> k_dist(1, 50);
    std::bernoulli_distribution pick(0.5);
    const auto table = both_ids();
    for (int trial = 0; trial < 100; ++trial) {
        const int k = k_dist(rng);
        Bits s;
        std::vector<int> labels;
        std::vector<Bits> payloads;
        for (int i = 0; i < k; ++i) {
            const int label = pick(rng) ? 1 : 0;
            const auto id = make_id(label ? IdKind::Barker11Padded : IdKind::Barker13, label);
            payloads.push_back(random_bits(rng, kPayloadBits));
            labels.push_back(label);
            append(s, frame(payloads.back(), id).bits());
        }
        for (const auto& d : {detect_packets(s, table, kDefaultCorrThreshold),
                              detect_synchronized(s, table, kDefaultCorrThreshold)}) {
            REQUIRE(d.size() == static_cast<std::size_t>(k));
            for (int i = 0; i < k; ++i) {
                CHECK(d[i].offset == static_cast<std::size_t>(i) * kPacketBits);
                CHECK(d[i].label == labels[i]);
                CHECK(d[i].payload == payloads[i]);
            }
        }
    }
}

TEST_CASE("phantom detections on random bits at threshold 13") {
    // exact 13-bit matches occur with probability 2^-13 per offset and id
    std::mt19937_64 rng(4);
    const auto table = both_ids();
    const std::size_t n = 100000;
    const auto noise = random_bits(rng, n);
    std::size_t raw = 0;
    for (std::size_t pos = 0; pos + kPacketBits <= n; ++pos)
        for (const auto& e : table.entries()) raw += header_score(noise, pos, e.id_bits) == 13;
    const double mean = 2.0 * static_cast<double>(n - kPacketBits + 1) / 8192.0;
    CHECK(static_cast<double>(raw) <= mean + 5.0 * std::sqrt(mean));

    const auto d = detect_packets(noise, table, 13);
    CHECK(d.size() <= raw);
    CHECK(d.size() <= n / kPacketBits);
    for (std::size_t i = 1; i < d.size(); ++i) CHECK(d[i].offset - d[i - 1].offset >= kPacketBits);
}

TEST_CASE("frame sync skips payload false alarms") {
    std::mt19937_64 rng(5);
    const auto table = both_ids();
    for (int trial = 0; trial < 20; ++trial) {
        Bits s = random_bits(rng, 300 + 97 * trial);
        const std::size_t start = s.size();
        for (int i = 0; i < 8; ++i)
            append(s, frame(random_bits(rng, kPayloadBits), make_id(IdKind::Barker13, 0)).bits());
        append(s, random_bits(rng, 1000));

        const auto phase = acquire_packet_phase(s, table);
        REQUIRE(phase.has_value());
        CHECK(*phase == start % kPacketBits);
        const auto d = detect_synchronized(s, table, kDefaultCorrThreshold);
        std::size_t hits = 0;
        for (const auto& x : d)
            if (x.offset >= start && (x.offset - start) % kPacketBits == 0 && x.label == 0) ++hits;
        CHECK(hits == 8);
    }
}

TEST_CASE("aligned detection survives a lost header") {
    std::mt19937_64 rng(6);
    Bits s;
    for (int i = 0; i < 6; ++i)
        append(s, frame(random_bits(rng, kPayloadBits), make_id(IdKind::Barker13, 0)).bits());
    for (std::size_t i = 0; i < 6; ++i) s[2 * kPacketBits + i] ^= 1;  // score 1
    const auto d = detect_aligned(s, both_ids(), kDefaultCorrThreshold, 0);
    REQUIRE(d.size() == 5);
    for (const auto& x : d) CHECK(x.offset % kPacketBits == 0);
    CHECK_FALSE(acquire_packet_phase(Bits(12, 1), both_ids()).has_value());
}

TEST_CASE("confirmed labels need two consecutive packet slots") {
    std::vector<Detection> d = {{100, 0, {}, 11}, {500, 1, {}, 13}, {500 + kPacketBits, 1, {}, 13}};
    CHECK(confirmed_labels(d) == std::vector<int>{1});
    d = {{0, 0, {}, 13}, {2 * kPacketBits, 0, {}, 13}};
    CHECK(confirmed_labels(d).empty());
    d = {{0, 0, {}, 13}, {kPacketBits, 1, {}, 13}};
    CHECK(confirmed_labels(d).empty());
}

}  // TEST_SUITE
