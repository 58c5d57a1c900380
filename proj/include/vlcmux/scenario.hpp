#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "vlcmux/channel.hpp"
#include "vlcmux/framing.hpp"
#include "vlcmux/modem.hpp"
#include "vlcmux/optics.hpp"

namespace vlcmux {

inline constexpr int kSchemaVersion = 1;

struct BitSource {
    enum class Kind { Random, Pattern, File };
    Kind kind = Kind::Random;
    std::optional<std::uint64_t> seed;  // Random; derived from the scenario seed when absent
    std::string pattern;                // Pattern: looped payload bits
    std::string path;                   // File: text file of 0/1, looped
};

struct EmitterSpec {
    framing::IdKind id = framing::IdKind::Barker13;
    bool enabled = true;
    double gain = 1.0;
    modem::PhaseOffset phase_offset = modem::PhaseOffset::InPhase;
    std::optional<modem::ModemConfig> modem;  // overrides the scenario modem
    BitSource source;
    int header_flips = 0;  // leading header bits inverted in every packet
};

struct ReceiverSpec {
    bool fixed_threshold = true;         // FIXED level calibrated on a clean reference
    std::size_t desired_emitter = 0;     // BER target when several pixels are open
    std::optional<std::string> mask;     // fixed mask ("10"); skips the controller
};

struct ProtocolSpec {
    double switching_time_s = 1.0;
    double dead_time_s = 0.0;
    double snr_threshold_db = 10.0;
    int corr_threshold = framing::kDefaultCorrThreshold;
    int retry_budget = 3;
    std::optional<std::size_t> select_target;  // emitter index whose ID to lock
};

struct ChannelSpec {
    double closed_leakage = 0.0;
    std::vector<double> ambient_dc;
    double noise_sigma = 0.0;
    double saturation_level = 1e9;
};

struct Scenario {
    std::string name;
    std::uint64_t rng_seed = 1;
    double duration_s = 0.0;
    optics::OpticalSetup optics;
    optics::EmitterPlacement placement;
    modem::ModemConfig modem;
    std::vector<EmitterSpec> emitters;
    ChannelSpec channel;
    ReceiverSpec receiver;
    ProtocolSpec protocol;
    double code_rate = 1.0;
    std::filesystem::path base_dir;  // for relative file sources; not serialized

    const modem::ModemConfig& modem_for(std::size_t emitter) const;

    /// Checks every cross-field invariant and returns the emitter -> pixel
    /// mapping. Throws Error(ScenarioInvalid).
    std::vector<std::size_t> validate() const;
};

nlohmann::json to_json(const Scenario& s);
Scenario scenario_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
Scenario load_scenario(const std::filesystem::path& path);

/// FNV-1a 64 of the canonical scenario JSON, as 16 hex digits.
std::string scenario_hash(const Scenario& s);

/// Names of the scenarios shipped under scenarios/.
std::vector<std::string> bundled_scenario_names();
Scenario bundled_scenario(const std::string& name);

}  // namespace vlcmux
