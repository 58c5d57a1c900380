#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "vlcmux/framing.hpp"
#include "vlcmux/metrics.hpp"
#include "vlcmux/scenario.hpp"
#include "vlcmux/shutter.hpp"

namespace vlcmux {

/// Decoded bits of one reception slot.
struct SlotTrace {
    std::size_t emitter = 0;     // stream the slot is decoded for
    std::string mask;            // shutter state during the slot
    double start_s = 0.0;
    std::size_t start_bit = 0;   // transmit-stream index of the slot's first bit
    Bits bits;
};

struct ControllerTrace {
    bool ran = false;
    bool converged = false;
    int cycles = 0;
    std::size_t dwells = 0;
    double sim_time_s = 0.0;
    std::vector<std::size_t> locked_pixels;
    std::vector<std::optional<double>> pixel_snr_db;
};

struct TraceRecord {
    nlohmann::json scenario;
    std::string scenario_hash;
    std::string base_dir;  // resolves relative bit-source files on replay
    std::uint64_t rng_seed = 0;
    std::vector<std::size_t> emitter_pixel;
    ControllerTrace controller;
    std::vector<shutter::ControllerEvent> events;
    std::vector<SlotTrace> slots;
    std::vector<std::vector<framing::Detection>> detections;  // per slot
    std::vector<metrics::LinkReport> reports;
    /// (sim time s, intensity) of every reception sample, when requested.
    /// Written to CSV only; not part of trace.json.
    std::vector<std::pair<double, double>> samples;
};

nlohmann::json to_json(const TraceRecord& t);
/// Throws Error(ParseError) or Error(SchemaVersionMismatch).
TraceRecord trace_from_json(const nlohmann::json& j);

struct RunOptions {
    bool keep_samples = false;
};

/// Transmitted bit stream of one emitter: back-to-back packets of its ID
/// followed by payload from its bit source.
Bits emitter_stream(const Scenario& s, std::size_t emitter, std::size_t n_bits);

/// Controller options derived from a scenario.
shutter::ControllerOptions controller_options(const Scenario& s);

/// Full end-to-end run; deterministic for a given scenario and seed.
/// Non-convergence is recorded in the trace, not thrown.
TraceRecord run_scenario(const Scenario& s, const RunOptions& opts = {});

/// Recomputes detections and link reports from the stored decoded bits.
std::vector<metrics::LinkReport> recompute_reports(const Scenario& s, const TraceRecord& t,
                                                   std::vector<std::vector<framing::Detection>>*
                                                       detections_out = nullptr);

std::vector<metrics::LinkReport> replay_trace(const TraceRecord& t);
std::vector<metrics::LinkReport> replay_trace(const std::filesystem::path& path);

nlohmann::json reports_to_json(const std::vector<metrics::LinkReport>& reports);

/// Writes trace.json, reports.json, events.jsonl and (when kept) samples.csv.
void write_trace_files(const TraceRecord& t, const std::filesystem::path& dir);

}  // namespace vlcmux
