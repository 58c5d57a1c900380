#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "vlcmux/channel.hpp"
#include "vlcmux/framing.hpp"
#include "vlcmux/signal.hpp"

namespace vlcmux::shutter {

using channel::PixelMask;

enum class Phase { Init, Discovery, Identification, Locked, Reset };

std::string to_string(Phase p);

inline constexpr double kDefaultSnrThresholdDb = 10.0;
inline constexpr int kDefaultRetryBudget = 3;

struct ShutterControllerState {
    Phase phase = Phase::Init;
    PixelMask mask;
    double switching_time_s = 0.0;
    double snr_threshold_db = kDefaultSnrThresholdDb;
    std::vector<std::optional<double>> pixel_snr_db;
    std::vector<std::size_t> candidate_pixels;
    std::vector<std::size_t> locked_pixels;
    framing::IdLookupTable id_table;

    std::size_t pixel_count() const { return mask.size(); }
};

/// Initialization: all pixels open, SNR records cleared, ID table loaded.
ShutterControllerState initialize(std::size_t pixels, double switching_time_s,
                                  double snr_threshold_db, framing::IdLookupTable table);

/// Measured SNR of `pixel` while `mask` (only that pixel open) is applied.
using SnrProbe = std::function<double(std::size_t pixel, const PixelMask& mask)>;

/// Transmitter IDs decoded on `pixel` while `mask` (only that pixel open) is applied.
using DetectionProbe =
    std::function<std::vector<framing::TransmitterId>(std::size_t pixel, const PixelMask& mask)>;

/// Scans every pixel alone. Pixels at or above the threshold become
/// candidates and are opened together (-> Identification); if none pass,
/// every pixel is closed (-> Reset). Throws Error(WrongPhase).
ShutterControllerState step_discovery(ShutterControllerState state, const SnrProbe& probe);

/// Decodes each candidate alone and keeps those whose IDs are registered
/// (and equal `target` when given) -> Locked. With no match every pixel is
/// closed and the controller returns to Discovery.
/// Throws Error(WrongPhase) or Error(EmptyCandidates).
ShutterControllerState step_identification(ShutterControllerState state,
                                           const DetectionProbe& detections,
                                           const std::optional<framing::TransmitterId>& target = {});

struct ControllerEvent {
    double sim_time_s = 0.0;
    Phase phase = Phase::Init;
    PixelMask mask;
    std::vector<std::optional<double>> pixel_snr_db;  // set on Discovery results
    std::optional<std::vector<int>> detected_ids;     // set on Identification dwells
    std::string note;
};

nlohmann::json to_json(const ControllerEvent& e);
ControllerEvent event_from_json(const nlohmann::json& j);

struct ControllerOptions {
    std::size_t pixels = 2;
    double switching_time_s = 1.0;
    double dead_time_s = 0.0;
    double snr_threshold_db = kDefaultSnrThresholdDb;
    int corr_threshold = framing::kDefaultCorrThreshold;
    int retry_budget = kDefaultRetryBudget;
    std::optional<framing::TransmitterId> select_target;
};

/// The controller's access to the physical link. `capture` applies `mask`,
/// discards `dead_time_s` of settling, then returns `dwell_s` of samples.
struct LinkAccess {
    std::function<SampleBlock(const PixelMask& mask, double dead_time_s, double dwell_s)> capture;
    std::function<Bits(const SampleBlock&)> decode;
};

struct ControllerResult {
    ShutterControllerState state;
    std::vector<ControllerEvent> events;
    bool converged = false;
    int cycles = 0;
    std::size_t dwells = 0;
    double sim_time_s = 0.0;
};

/// Runs Discovery/Identification until Locked or the retry budget (full
/// cycles) is spent. An identification dwell reports an ID only when it was
/// detected in two consecutive packet slots, so a dwell must span at least
/// three packets. Non-convergence is reported, not thrown; the final
/// mask then has every pixel closed.
ControllerResult run_controller(const ControllerOptions& opts, const framing::IdLookupTable& table,
                                const LinkAccess& link);

/// One reception slot after lock.
struct Slot {
    std::size_t pixel = 0;
    double start_s = 0.0;
    double dwell_s = 0.0;
};

/// Round-robin slots of switching_time_s over the locked pixels; a single
/// locked pixel gets one slot spanning the whole duration.
std::vector<Slot> reception_schedule(const std::vector<std::size_t>& locked_pixels,
                                     double start_s, double duration_s, double switching_time_s);

struct LatencyModel {
    std::size_t grid_pixels = 1;
    std::size_t n_transmitters = 1;
    std::size_t packet_bits = framing::kPacketBits;
    double bit_time_s = 1e-6;
    double switching_time_s = 1e-6;
};

struct LatencyEstimate {
    double discovery_s = 0.0;
    double identification_s = 0.0;
    double total_s = 0.0;
};

/// Discovery: one switching slot per pixel. Identification: one packet per
/// transmitter.
LatencyEstimate estimate_latency(const LatencyModel& model);

/// Whole packets fitting in one slot.
std::size_t packets_per_slot(double symbol_rate, double bits_per_symbol, double slot_s,
                             std::size_t packet_bits);

}  // namespace vlcmux::shutter
