#include "vlcmux/shutter.hpp"

#include <algorithm>
#include <cmath>

#include "vlcmux/error.hpp"
#include "vlcmux/metrics.hpp"

namespace vlcmux::shutter {

std::string to_string(Phase p) {
    switch (p) {
        case Phase::Init: return "INIT";
        case Phase::Discovery: return "DISCOVERY";
        case Phase::Identification: return "IDENTIFICATION";
        case Phase::Locked: return "LOCKED";
        case Phase::Reset: return "RESET";
    }
    return "UNKNOWN";
}

namespace {

Phase phase_from_string(const std::string& s) {
    for (Phase p : {Phase::Init, Phase::Discovery, Phase::Identification, Phase::Locked,
                    Phase::Reset})
        if (to_string(p) == s) return p;
    throw Error(ErrorCode::ParseError, "unknown controller phase '" + s + "'");
}

}  // namespace

ShutterControllerState initialize(std::size_t pixels, double switching_time_s,
                                  double snr_threshold_db, framing::IdLookupTable table) {
    if (pixels == 0) throw Error(ErrorCode::ConfigInvalid, "shutter needs at least one pixel");
    if (!(switching_time_s > 0.0))
        throw Error(ErrorCode::ConfigInvalid, "switching time must be positive");
    ShutterControllerState s;
    s.phase = Phase::Init;
    s.mask = PixelMask::all_open(pixels);
    s.switching_time_s = switching_time_s;
    s.snr_threshold_db = snr_threshold_db;
    s.pixel_snr_db.assign(pixels, std::nullopt);
    s.id_table = std::move(table);
    return s;
}

ShutterControllerState step_discovery(ShutterControllerState state, const SnrProbe& probe) {
    if (state.phase != Phase::Discovery)
        throw Error(ErrorCode::WrongPhase, "discovery step requires the DISCOVERY phase, not " +
                                               to_string(state.phase));
    const std::size_t n = state.pixel_count();
    state.pixel_snr_db.assign(n, std::nullopt);
    state.candidate_pixels.clear();
    state.locked_pixels.clear();
    for (std::size_t p = 0; p < n; ++p) {
        state.mask = PixelMask::only(n, p);
        const double snr = probe(p, state.mask);
        state.pixel_snr_db[p] = snr;
        if (snr >= state.snr_threshold_db) state.candidate_pixels.push_back(p);
    }
    if (state.candidate_pixels.empty()) {
        state.mask = PixelMask::all_closed(n);
        state.phase = Phase::Reset;
    } else {
        state.mask = PixelMask::from_pixels(n, state.candidate_pixels);
        state.phase = Phase::Identification;
    }
    return state;
}

ShutterControllerState step_identification(ShutterControllerState state,
                                           const DetectionProbe& detections,
                                           const std::optional<framing::TransmitterId>& target) {
    if (state.phase != Phase::Identification)
        throw Error(ErrorCode::WrongPhase,
                    "identification step requires the IDENTIFICATION phase, not " +
                        to_string(state.phase));
    if (state.candidate_pixels.empty())
        throw Error(ErrorCode::EmptyCandidates, "no candidate pixels to identify");
    const std::size_t n = state.pixel_count();
    state.locked_pixels.clear();
    for (std::size_t p : state.candidate_pixels) {
        state.mask = PixelMask::only(n, p);
        const auto ids = detections(p, state.mask);
        const bool matched = std::any_of(ids.begin(), ids.end(), [&](const auto& id) {
            if (!state.id_table.lookup(id.id_bits)) return false;
            return !target || id.id_bits == target->id_bits;
        });
        if (matched) state.locked_pixels.push_back(p);
    }
    if (state.locked_pixels.empty()) {
        state.mask = PixelMask::all_closed(n);
        state.candidate_pixels.clear();
        state.phase = Phase::Discovery;
    } else {
        state.mask = PixelMask::from_pixels(n, state.locked_pixels);
        state.phase = Phase::Locked;
    }
    return state;
}

nlohmann::json to_json(const ControllerEvent& e) {
    nlohmann::json j;
    j["sim_time_s"] = e.sim_time_s;
    j["phase"] = to_string(e.phase);
    j["mask"] = e.mask.to_string();
    if (!e.pixel_snr_db.empty()) {
        auto arr = nlohmann::json::array();
        for (const auto& v : e.pixel_snr_db) arr.push_back(metrics::snr_to_json(v));
        j["pixel_snr_db"] = arr;
    }
    if (e.detected_ids) j["detected_ids"] = *e.detected_ids;
    if (!e.note.empty()) j["note"] = e.note;
    return j;
}

ControllerEvent event_from_json(const nlohmann::json& j) {
    ControllerEvent e;
    e.sim_time_s = j.at("sim_time_s").get<double>();
    e.phase = phase_from_string(j.at("phase").get<std::string>());
    const auto mask = j.at("mask").get<std::string>();
    e.mask = PixelMask(mask.size());
    for (std::size_t i = 0; i < mask.size(); ++i) e.mask.set(i, mask[i] == '1');
    if (j.contains("pixel_snr_db"))
        for (const auto& v : j["pixel_snr_db"]) e.pixel_snr_db.push_back(metrics::snr_from_json(v));
    if (j.contains("detected_ids")) e.detected_ids = j["detected_ids"].get<std::vector<int>>();
    if (j.contains("note")) e.note = j["note"].get<std::string>();
    return e;
}

ControllerResult run_controller(const ControllerOptions& opts, const framing::IdLookupTable& table,
                                const LinkAccess& link) {
    if (opts.retry_budget < 1) throw Error(ErrorCode::ConfigInvalid, "retry budget must be >= 1");
    if (!(opts.dead_time_s >= 0.0)) throw Error(ErrorCode::ConfigInvalid, "negative dead time");
    if (table.empty()) throw Error(ErrorCode::EmptyTable, "no transmitter ids registered");

    ControllerResult res;
    double now = 0.0;
    auto log = [&](const ShutterControllerState& s, std::string note = {}) {
        ControllerEvent e;
        e.sim_time_s = now;
        e.phase = s.phase;
        e.mask = s.mask;
        e.note = std::move(note);
        res.events.push_back(std::move(e));
    };
    auto dwell = [&](const PixelMask& mask, Phase phase, std::string note) {
        ControllerEvent e;
        e.sim_time_s = now;
        e.phase = phase;
        e.mask = mask;
        e.note = std::move(note);
        res.events.push_back(e);
        auto block = link.capture(mask, opts.dead_time_s, opts.switching_time_s);
        now += opts.dead_time_s + opts.switching_time_s;
        ++res.dwells;
        return block;
    };

    auto state = initialize(opts.pixels, opts.switching_time_s, opts.snr_threshold_db, table);
    log(state, "initialize");

    for (int cycle = 0; cycle < opts.retry_budget; ++cycle) {
        res.cycles = cycle + 1;
        if (state.phase == Phase::Reset) {
            // refresh the lookup table for the new cycle
            state = initialize(opts.pixels, opts.switching_time_s, opts.snr_threshold_db, table);
            log(state, "refresh");
        }
        state.phase = Phase::Discovery;

        const auto reference = dwell(PixelMask::all_closed(opts.pixels), Phase::Discovery,
                                     "noise reference");
        state = step_discovery(state, [&](std::size_t p, const PixelMask& mask) {
            const auto block = dwell(mask, Phase::Discovery, "scan pixel " + std::to_string(p));
            return channel::received_snr_db(block, reference);
        });
        {
            ControllerEvent e;
            e.sim_time_s = now;
            e.phase = state.phase;
            e.mask = state.mask;
            e.pixel_snr_db = state.pixel_snr_db;
            res.events.push_back(std::move(e));
        }
        if (state.phase == Phase::Reset) continue;

        state = step_identification(
            state,
            [&](std::size_t p, const PixelMask& mask) {
                const auto block =
                    dwell(mask, Phase::Identification, "identify pixel " + std::to_string(p));
                const auto found =
                    framing::detect_synchronized(link.decode(block), table, opts.corr_threshold);
                const auto labels = framing::confirmed_labels(found);
                std::vector<framing::TransmitterId> ids;
                for (int label : labels) ids.push_back(*table.find_label(label));
                res.events.back().detected_ids = labels;
                return ids;
            },
            opts.select_target);
        log(state);
        if (state.phase == Phase::Locked) {
            res.converged = true;
            break;
        }
    }

    if (!res.converged) {
        state.mask = PixelMask::all_closed(opts.pixels);
        state.phase = Phase::Reset;
        log(state, "no convergence after " + std::to_string(opts.retry_budget) + " cycles");
    }
    res.state = std::move(state);
    res.sim_time_s = now;
    return res;
}

std::vector<Slot> reception_schedule(const std::vector<std::size_t>& locked_pixels,
                                     double start_s, double duration_s, double switching_time_s) {
    std::vector<Slot> out;
    if (locked_pixels.empty() || !(duration_s > 0.0)) return out;
    if (locked_pixels.size() == 1) {
        out.push_back({locked_pixels.front(), start_s, duration_s});
        return out;
    }
    if (!(switching_time_s > 0.0))
        throw Error(ErrorCode::ConfigInvalid, "switching time must be positive");
    double t = 0.0;
    std::size_t i = 0;
    while (t < duration_s) {
        const double d = std::min(switching_time_s, duration_s - t);
        out.push_back({locked_pixels[i % locked_pixels.size()], start_s + t, d});
        t += d;
        ++i;
    }
    return out;
}

LatencyEstimate estimate_latency(const LatencyModel& m) {
    if (m.grid_pixels == 0 || m.n_transmitters == 0 || m.packet_bits == 0 ||
        !(m.bit_time_s > 0.0) || !(m.switching_time_s > 0.0))
        throw Error(ErrorCode::ConfigInvalid, "latency model parameters must be positive");
    LatencyEstimate e;
    e.discovery_s = static_cast<double>(m.grid_pixels) * m.switching_time_s;
    e.identification_s =
        static_cast<double>(m.n_transmitters * m.packet_bits) * m.bit_time_s;
    e.total_s = e.discovery_s + e.identification_s;
    return e;
}

std::size_t packets_per_slot(double symbol_rate, double bits_per_symbol, double slot_s,
                             std::size_t packet_bits) {
    if (!(symbol_rate > 0.0) || !(bits_per_symbol > 0.0) || !(slot_s > 0.0) || packet_bits == 0)
        throw Error(ErrorCode::ConfigInvalid, "packet count parameters must be positive");
    const double ratio = symbol_rate * bits_per_symbol * slot_s / static_cast<double>(packet_bits);
    const double nearest = std::round(ratio);
    // an exact multiple must not floor one short after rounding error
    if (std::abs(ratio - nearest) <= 1e-9 * std::max(1.0, ratio))
        return static_cast<std::size_t>(nearest);
    return static_cast<std::size_t>(std::floor(ratio));
}

}  // namespace vlcmux::shutter
