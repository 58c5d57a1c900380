#include "vlcmux/scenario.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "vlcmux/error.hpp"

namespace vlcmux {

namespace {

using nlohmann::json;

[[noreturn]] void invalid(const std::string& msg) { throw Error(ErrorCode::ScenarioInvalid, msg); }

json modem_to_json(const modem::ModemConfig& m) {
    return {{"scheme", modem::to_string(m.scheme)},
            {"symbol_rate", m.symbol_rate},
            {"samples_per_symbol", m.samples_per_symbol},
            {"bits_per_symbol", m.bits_per_symbol},
            {"gmsk_bt", m.gmsk_bt},
            {"gmsk_span_symbols", m.gmsk_span_symbols},
            {"dc_bias", m.dc_bias},
            {"modulation_depth", m.modulation_depth}};
}

modem::ModemConfig modem_from_json(const json& j, modem::ModemConfig m = {}) {
    if (j.contains("scheme")) m.scheme = modem::scheme_from_string(j["scheme"].get<std::string>());
    m.symbol_rate = j.value("symbol_rate", m.symbol_rate);
    m.samples_per_symbol = j.value("samples_per_symbol", m.samples_per_symbol);
    m.bits_per_symbol = j.value("bits_per_symbol", m.bits_per_symbol);
    m.gmsk_bt = j.value("gmsk_bt", m.gmsk_bt);
    m.gmsk_span_symbols = j.value("gmsk_span_symbols", m.gmsk_span_symbols);
    m.dc_bias = j.value("dc_bias", m.dc_bias);
    m.modulation_depth = j.value("modulation_depth", m.modulation_depth);
    return m;
}

std::string source_kind(BitSource::Kind k) {
    switch (k) {
        case BitSource::Kind::Random: return "random";
        case BitSource::Kind::Pattern: return "pattern";
        case BitSource::Kind::File: return "file";
    }
    return "random";
}

}  // namespace

const modem::ModemConfig& Scenario::modem_for(std::size_t emitter) const {
    const auto& e = emitters.at(emitter);
    return e.modem ? *e.modem : modem;
}

std::vector<std::size_t> Scenario::validate() const {
    try {
        optics.validate();
        modem.validate();
        for (std::size_t i = 0; i < emitters.size(); ++i) {
            const auto& m = modem_for(i);
            m.validate();
            if (m.sample_rate() != modem.sample_rate() ||
                m.samples_per_symbol != modem.samples_per_symbol)
                invalid("emitter " + std::to_string(i) + " modem differs in sample timing");
        }
    } catch (const Error& e) {
        if (e.code() == ErrorCode::ScenarioInvalid) throw;
        invalid(e.what());
    }
    if (emitters.empty()) invalid("scenario has no emitters");
    if (placement.positions.size() != emitters.size())
        invalid("placement needs one position per emitter");
    if (!(duration_s >= 0.0)) invalid("duration must be nonnegative");
    if (!(code_rate > 0.0 && code_rate <= 1.0)) invalid("code rate must lie in (0, 1]");

    const auto mapping = optics::map_emitters_to_pixels(optics, placement);
    if (!mapping.feasible())
        invalid("emitter placement infeasible (" + optics::to_string(*mapping.infeasible) +
                "): " + mapping.detail);
    const std::size_t pixels = optics.pixel_count();
    if (emitters.size() > pixels) invalid("more emitters than shutter pixels");

    std::vector<Bits> ids;
    for (const auto& e : emitters) {
        if (!(e.gain >= 0.0)) invalid("emitter gain must be nonnegative");
        if (e.header_flips < 0 || e.header_flips > static_cast<int>(framing::kIdBits))
            invalid("header_flips must lie in [0, 13]");
        auto bits = framing::make_id(e.id).id_bits;
        for (const auto& other : ids)
            if (other == bits) invalid("two emitters share a transmitter id");
        ids.push_back(bits);
        if (e.source.kind == BitSource::Kind::Pattern) {
            if (e.source.pattern.empty()) invalid("pattern source needs bits");
            bits_from_string(e.source.pattern);
        }
        if (e.source.kind == BitSource::Kind::File) {
            const auto p = base_dir / e.source.path;
            if (!std::filesystem::exists(p)) invalid("bit source file not found: " + p.string());
        }
    }
    if (!channel.ambient_dc.empty() && channel.ambient_dc.size() != pixels)
        invalid("ambient_dc needs one entry per pixel");
    if (!(channel.closed_leakage >= 0.0 && channel.closed_leakage < 1.0))
        invalid("closed leakage must lie in [0, 1)");
    if (!(channel.noise_sigma >= 0.0)) invalid("noise sigma must be nonnegative");
    if (!(channel.saturation_level > 0.0)) invalid("saturation level must be positive");
    if (receiver.desired_emitter >= emitters.size()) invalid("desired emitter out of range");
    if (receiver.mask && receiver.mask->size() != pixels)
        invalid("fixed mask needs one character per pixel");
    if (receiver.mask)
        for (char c : *receiver.mask)
            if (c != '0' && c != '1') invalid("fixed mask must be a 0/1 string");
    if (!(protocol.switching_time_s > 0.0)) invalid("switching time must be positive");
    if (!(protocol.dead_time_s >= 0.0)) invalid("dead time must be nonnegative");
    if (protocol.corr_threshold < 1 || protocol.corr_threshold > 13)
        invalid("correlation threshold must lie in [1, 13]");
    if (protocol.retry_budget < 1) invalid("retry budget must be at least 1");
    if (protocol.select_target && *protocol.select_target >= emitters.size())
        invalid("select_target out of range");
    return mapping.emitter_pixel;
}

json to_json(const Scenario& s) {
    json j;
    j["schema_version"] = kSchemaVersion;
    j["name"] = s.name;
    j["rng_seed"] = s.rng_seed;
    j["duration_s"] = s.duration_s;
    j["optics"] = {{"pixel_pitch_m", s.optics.pixel_pitch_m},
                   {"emitter_distance_m", s.optics.emitter_distance_m},
                   {"shutter_distance_m", s.optics.shutter_distance_m},
                   {"back_focal_length_m", s.optics.back_focal_length_m},
                   {"grid_rows", s.optics.grid_rows},
                   {"grid_cols", s.optics.grid_cols}};
    auto placement = json::array();
    for (const auto& p : s.placement.positions) placement.push_back({p.x, p.y});
    j["placement"] = placement;
    j["modem"] = modem_to_json(s.modem);
    auto emitters = json::array();
    for (const auto& e : s.emitters) {
        json je;
        je["id"] = framing::to_string(e.id);
        je["enabled"] = e.enabled;
        je["gain"] = e.gain;
        je["phase_offset"] = modem::to_string(e.phase_offset);
        if (e.modem) je["modem"] = modem_to_json(*e.modem);
        json src;
        src["kind"] = source_kind(e.source.kind);
        if (e.source.seed) src["seed"] = *e.source.seed;
        if (e.source.kind == BitSource::Kind::Pattern) src["pattern"] = e.source.pattern;
        if (e.source.kind == BitSource::Kind::File) src["path"] = e.source.path;
        je["source"] = src;
        if (e.header_flips) je["header_flips"] = e.header_flips;
        emitters.push_back(je);
    }
    j["emitters"] = emitters;
    j["channel"] = {{"closed_leakage", s.channel.closed_leakage},
                    {"ambient_dc", s.channel.ambient_dc},
                    {"noise_sigma", s.channel.noise_sigma},
                    {"saturation_level", s.channel.saturation_level}};
    json rx;
    rx["threshold"] = s.receiver.fixed_threshold ? "FIXED" : "ADAPTIVE";
    rx["desired_emitter"] = s.receiver.desired_emitter;
    if (s.receiver.mask) rx["mask"] = *s.receiver.mask;
    j["receiver"] = rx;
    json proto;
    proto["switching_time_s"] = s.protocol.switching_time_s;
    proto["dead_time_s"] = s.protocol.dead_time_s;
    proto["snr_threshold_db"] = s.protocol.snr_threshold_db;
    proto["corr_threshold"] = s.protocol.corr_threshold;
    proto["retry_budget"] = s.protocol.retry_budget;
    if (s.protocol.select_target) proto["select_target"] = *s.protocol.select_target;
    j["protocol"] = proto;
    j["metrics"] = {{"code_rate", s.code_rate}};
    return j;
}

Scenario scenario_from_json(const json& j, const std::filesystem::path& base_dir) {
    if (!j.is_object()) throw Error(ErrorCode::ParseError, "scenario must be a JSON object");
    if (!j.contains("schema_version"))
        throw Error(ErrorCode::SchemaVersionMismatch, "scenario lacks schema_version");
    if (j["schema_version"] != kSchemaVersion)
        throw Error(ErrorCode::SchemaVersionMismatch,
                    "scenario schema_version " + j["schema_version"].dump() + ", expected " +
                        std::to_string(kSchemaVersion));
    Scenario s;
    s.base_dir = base_dir;
    try {
        s.name = j.value("name", std::string{});
        s.rng_seed = j.value("rng_seed", s.rng_seed);
        s.duration_s = j.value("duration_s", s.duration_s);
        if (j.contains("optics")) {
            const auto& o = j["optics"];
            s.optics.pixel_pitch_m = o.value("pixel_pitch_m", s.optics.pixel_pitch_m);
            s.optics.emitter_distance_m = o.value("emitter_distance_m", s.optics.emitter_distance_m);
            s.optics.shutter_distance_m = o.value("shutter_distance_m", s.optics.shutter_distance_m);
            s.optics.back_focal_length_m =
                o.value("back_focal_length_m", s.optics.back_focal_length_m);
            s.optics.grid_rows = o.value("grid_rows", s.optics.grid_rows);
            s.optics.grid_cols = o.value("grid_cols", s.optics.grid_cols);
        }
        for (const auto& p : j.at("placement"))
            s.placement.positions.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
        s.modem = modem_from_json(j.at("modem"));
        for (const auto& je : j.at("emitters")) {
            EmitterSpec e;
            e.id = framing::id_kind_from_string(je.at("id").get<std::string>());
            e.enabled = je.value("enabled", true);
            e.gain = je.value("gain", 1.0);
            e.phase_offset =
                modem::phase_offset_from_string(je.value("phase_offset", std::string("IN_PHASE")));
            if (je.contains("modem")) e.modem = modem_from_json(je["modem"], s.modem);
            if (je.contains("source")) {
                const auto& src = je["source"];
                const auto kind = src.value("kind", std::string("random"));
                if (kind == "random") {
                    e.source.kind = BitSource::Kind::Random;
                } else if (kind == "pattern") {
                    e.source.kind = BitSource::Kind::Pattern;
                    e.source.pattern = src.at("pattern").get<std::string>();
                } else if (kind == "file") {
                    e.source.kind = BitSource::Kind::File;
                    e.source.path = src.at("path").get<std::string>();
                } else {
                    invalid("unknown bit source kind '" + kind + "'");
                }
                if (src.contains("seed")) e.source.seed = src["seed"].get<std::uint64_t>();
            }
            e.header_flips = je.value("header_flips", 0);
            s.emitters.push_back(std::move(e));
        }
        if (j.contains("channel")) {
            const auto& c = j["channel"];
            s.channel.closed_leakage = c.value("closed_leakage", s.channel.closed_leakage);
            s.channel.ambient_dc = c.value("ambient_dc", s.channel.ambient_dc);
            s.channel.noise_sigma = c.value("noise_sigma", s.channel.noise_sigma);
            s.channel.saturation_level = c.value("saturation_level", s.channel.saturation_level);
        }
        if (j.contains("receiver")) {
            const auto& r = j["receiver"];
            const auto th = r.value("threshold", std::string("FIXED"));
            if (th != "FIXED" && th != "ADAPTIVE") invalid("threshold must be FIXED or ADAPTIVE");
            s.receiver.fixed_threshold = th == "FIXED";
            s.receiver.desired_emitter = r.value("desired_emitter", std::size_t{0});
            if (r.contains("mask")) s.receiver.mask = r["mask"].get<std::string>();
        }
        if (j.contains("protocol")) {
            const auto& p = j["protocol"];
            s.protocol.switching_time_s = p.value("switching_time_s", s.protocol.switching_time_s);
            s.protocol.dead_time_s = p.value("dead_time_s", s.protocol.dead_time_s);
            s.protocol.snr_threshold_db = p.value("snr_threshold_db", s.protocol.snr_threshold_db);
            s.protocol.corr_threshold = p.value("corr_threshold", s.protocol.corr_threshold);
            s.protocol.retry_budget = p.value("retry_budget", s.protocol.retry_budget);
            if (p.contains("select_target"))
                s.protocol.select_target = p["select_target"].get<std::size_t>();
        }
        if (j.contains("metrics")) s.code_rate = j["metrics"].value("code_rate", s.code_rate);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::ParseError, e.what());
    } catch (const Error& e) {
        if (e.code() == ErrorCode::ScenarioInvalid || e.code() == ErrorCode::ParseError) throw;
        invalid(e.what());
    }
    return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::ParseError, "cannot open scenario " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw Error(ErrorCode::ParseError, path.string() + ": " + e.what());
    }
    return scenario_from_json(j, path.parent_path());
}

std::string scenario_hash(const Scenario& s) {
    const std::string canon = to_json(s).dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : canon) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace vlcmux
