#include "vlcmux/harness.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "vlcmux/channel.hpp"
#include "vlcmux/error.hpp"
#include "vlcmux/modem.hpp"

namespace vlcmux {

namespace {

using nlohmann::json;

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream, std::uint64_t index) {
    return splitmix64(splitmix64(base ^ (stream * 0xd1b54a32d192ed03ULL)) + index);
}

constexpr std::uint64_t kPayloadStream = 1;
constexpr std::uint64_t kNoiseStream = 2;

Bits load_pattern(const Scenario& s, const BitSource& src) {
    if (src.kind == BitSource::Kind::Pattern) return bits_from_string(src.pattern);
    std::ifstream in(s.base_dir / src.path);
    if (!in) throw Error(ErrorCode::ScenarioInvalid, "cannot open bit source " + src.path);
    std::string text, line;
    while (std::getline(in, line))
        for (char c : line)
            if (c == '0' || c == '1') text.push_back(c);
    if (text.empty()) throw Error(ErrorCode::ScenarioInvalid, "bit source " + src.path + " is empty");
    return bits_from_string(text);
}

std::size_t seconds_to_symbols(double seconds, double symbol_rate) {
    return static_cast<std::size_t>(std::llround(seconds * symbol_rate));
}

// Emitter waveforms and the receiver sample cursor.
class Link {
public:
    Link(const Scenario& s, std::vector<std::size_t> emitter_pixel, std::size_t total_symbols)
        : s_(s), sps_(s.modem.samples_per_symbol), fs_(s.modem.sample_rate()) {
        const std::size_t pixels = s.optics.pixel_count();
        cfg_.emitter_pixel = std::move(emitter_pixel);
        cfg_.closed_leakage = s.channel.closed_leakage;
        cfg_.ambient_dc = s.channel.ambient_dc;
        if (cfg_.ambient_dc.empty()) cfg_.ambient_dc.assign(pixels, 0.0);
        cfg_.noise_sigma = s.channel.noise_sigma;
        cfg_.saturation_level = s.channel.saturation_level;
        for (std::size_t e = 0; e < s.emitters.size(); ++e) {
            const auto& spec = s.emitters[e];
            cfg_.emitter_gain.push_back(spec.enabled ? spec.gain : 0.0);
            const auto bits = emitter_stream(s, e, total_symbols);
            waves_.push_back(modem::modulate(bits, s.modem_for(e), spec.phase_offset));
        }
        thresholds_.resize(s.emitters.size());
        for (std::size_t e = 0; e < s.emitters.size(); ++e) {
            if (!s.receiver.fixed_threshold) continue;
            // clean single-emitter reference: pixel open, no ambient, no noise
            const auto& w = waves_[e].samples;
            const std::size_t n = std::min<std::size_t>(w.size(), 1u << 16);
            double mean = 0.0;
            for (std::size_t i = 0; i < n; ++i) mean += w[i];
            thresholds_[e] = s.emitters[e].gain * mean / static_cast<double>(n);
        }
    }

    std::size_t cursor_symbols() const { return cursor_ / sps_; }
    double now_s() const { return static_cast<double>(cursor_) / fs_; }

    SampleBlock capture(const channel::PixelMask& mask, double dead_s, double dwell_s) {
        cursor_ += seconds_to_symbols(dead_s, s_.modem.symbol_rate) * sps_;
        const std::size_t n = seconds_to_symbols(dwell_s, s_.modem.symbol_rate) * sps_;
        std::vector<SampleBlock> slices;
        slices.reserve(waves_.size());
        for (const auto& w : waves_) {
            if (cursor_ + n > w.size())
                throw Error(ErrorCode::ScenarioInvalid, "simulation ran past the generated waveform");
            SampleBlock b;
            b.sample_rate = fs_;
            b.samples.assign(w.samples.begin() + static_cast<long>(cursor_),
                             w.samples.begin() + static_cast<long>(cursor_ + n));
            slices.push_back(std::move(b));
        }
        auto cfg = cfg_;
        cfg.rng_seed = derive_seed(s_.rng_seed, kNoiseStream, dwell_index_++);
        auto out = channel::receive(slices, mask, cfg);
        out.sample_rate = fs_;
        cursor_ += n;
        return out;
    }

    Bits decode(const SampleBlock& block, std::size_t emitter) const {
        if (block.size() < sps_) return {};
        const auto th = s_.receiver.fixed_threshold ? modem::Threshold::fixed(thresholds_[emitter])
                                                    : modem::Threshold::adaptive();
        return modem::demodulate(block, s_.modem_for(emitter), th);
    }

private:
    const Scenario& s_;
    std::size_t sps_;
    double fs_;
    channel::ChannelConfig cfg_;
    std::vector<SampleBlock> waves_;
    std::vector<double> thresholds_;
    std::size_t cursor_ = 0;
    std::uint64_t dwell_index_ = 0;
};

std::size_t emitter_on_pixel(const std::vector<std::size_t>& emitter_pixel, std::size_t pixel,
                             std::size_t fallback) {
    for (std::size_t e = 0; e < emitter_pixel.size(); ++e)
        if (emitter_pixel[e] == pixel) return e;
    return fallback;
}

json detection_to_json(const framing::Detection& d) {
    return {{"offset", d.offset}, {"label", d.label}, {"score", d.score}};
}

framing::IdLookupTable scenario_table(const Scenario& s) {
    std::vector<framing::TransmitterId> ids;
    for (std::size_t e = 0; e < s.emitters.size(); ++e)
        ids.push_back(framing::make_id(s.emitters[e].id, static_cast<int>(e)));
    return framing::IdLookupTable(std::move(ids));
}

}  // namespace

Bits emitter_stream(const Scenario& s, std::size_t emitter, std::size_t n_bits) {
    const auto& spec = s.emitters.at(emitter);
    auto header = framing::make_id(spec.id).id_bits;
    for (int i = 0; i < spec.header_flips && i < static_cast<int>(header.size()); ++i)
        header[static_cast<std::size_t>(i)] ^= 1;

    Bits pattern;
    std::mt19937_64 rng(spec.source.seed ? *spec.source.seed
                                         : derive_seed(s.rng_seed, kPayloadStream, emitter));
    if (spec.source.kind != BitSource::Kind::Random) pattern = load_pattern(s, spec.source);

    Bits out;
    out.reserve(n_bits);
    std::size_t pattern_pos = 0;
    while (out.size() < n_bits) {
        const std::size_t pos = out.size() % framing::kPacketBits;
        if (pos < framing::kIdBits) {
            out.push_back(header[pos]);
        } else if (spec.source.kind == BitSource::Kind::Random) {
            out.push_back(static_cast<std::uint8_t>(rng() >> 63));
        } else {
            out.push_back(pattern[pattern_pos]);
            pattern_pos = (pattern_pos + 1) % pattern.size();
        }
    }
    return out;
}

shutter::ControllerOptions controller_options(const Scenario& s) {
    shutter::ControllerOptions o;
    o.pixels = s.optics.pixel_count();
    o.switching_time_s = s.protocol.switching_time_s;
    o.dead_time_s = s.protocol.dead_time_s;
    o.snr_threshold_db = s.protocol.snr_threshold_db;
    o.corr_threshold = s.protocol.corr_threshold;
    o.retry_budget = s.protocol.retry_budget;
    if (s.protocol.select_target) {
        const auto e = *s.protocol.select_target;
        o.select_target = framing::make_id(s.emitters.at(e).id, static_cast<int>(e));
    }
    return o;
}

TraceRecord run_scenario(const Scenario& s, const RunOptions& opts) {
    const auto emitter_pixel = s.validate();
    const std::size_t pixels = s.optics.pixel_count();
    const double rs = s.modem.symbol_rate;

    TraceRecord t;
    t.scenario = to_json(s);
    t.scenario_hash = scenario_hash(s);
    t.base_dir = s.base_dir.string();
    t.rng_seed = s.rng_seed;
    t.emitter_pixel = emitter_pixel;

    const bool use_controller = !s.receiver.mask.has_value();
    std::size_t budget_symbols = seconds_to_symbols(s.duration_s, rs) + 1;
    if (use_controller) {
        const std::size_t per_dwell =
            seconds_to_symbols(s.protocol.dead_time_s, rs) +
            seconds_to_symbols(s.protocol.switching_time_s, rs);
        budget_symbols += static_cast<std::size_t>(s.protocol.retry_budget) * (2 * pixels + 1) *
                          per_dwell;
    }

    Link link(s, emitter_pixel, budget_symbols);
    std::vector<shutter::Slot> schedule;

    if (use_controller) {
        std::size_t current = s.protocol.select_target.value_or(s.receiver.desired_emitter);
        shutter::LinkAccess access;
        access.capture = [&](const channel::PixelMask& mask, double dead, double dwell) {
            const auto open = mask.open_pixels();
            if (open.size() == 1) current = emitter_on_pixel(emitter_pixel, open.front(), current);
            return link.capture(mask, dead, dwell);
        };
        access.decode = [&](const SampleBlock& b) { return link.decode(b, current); };
        const auto res = shutter::run_controller(controller_options(s), scenario_table(s), access);
        t.controller.ran = true;
        t.controller.converged = res.converged;
        t.controller.cycles = res.cycles;
        t.controller.dwells = res.dwells;
        t.controller.sim_time_s = res.sim_time_s;
        t.controller.locked_pixels = res.state.locked_pixels;
        t.controller.pixel_snr_db = res.state.pixel_snr_db;
        t.events = res.events;
        if (res.converged)
            schedule = shutter::reception_schedule(res.state.locked_pixels, link.now_s(),
                                                   s.duration_s, s.protocol.switching_time_s);
    } else {
        shutter::ControllerEvent e;
        e.sim_time_s = 0.0;
        e.phase = shutter::Phase::Locked;
        e.mask = channel::PixelMask(pixels);
        for (std::size_t i = 0; i < pixels; ++i) e.mask.set(i, (*s.receiver.mask)[i] == '1');
        e.note = "fixed mask";
        t.events.push_back(e);
        if (s.duration_s > 0.0) schedule.push_back({pixels, 0.0, s.duration_s});
    }

    for (const auto& slot : schedule) {
        channel::PixelMask mask(pixels);
        std::size_t emitter = s.receiver.desired_emitter;
        if (slot.pixel < pixels) {
            mask = channel::PixelMask::only(pixels, slot.pixel);
            emitter = emitter_on_pixel(emitter_pixel, slot.pixel, emitter);
        } else {
            for (std::size_t i = 0; i < pixels; ++i) mask.set(i, (*s.receiver.mask)[i] == '1');
        }
        if (seconds_to_symbols(slot.dwell_s, rs) == 0) continue;
        SlotTrace st;
        st.emitter = emitter;
        st.mask = mask.to_string();
        st.start_s = link.now_s();
        st.start_bit = link.cursor_symbols();
        const auto block = link.capture(mask, 0.0, slot.dwell_s);
        if (opts.keep_samples) {
            for (std::size_t i = 0; i < block.size(); ++i)
                t.samples.emplace_back(st.start_s + static_cast<double>(i) / block.sample_rate,
                                       block.samples[i]);
        }
        st.bits = link.decode(block, emitter);
        t.slots.push_back(std::move(st));
    }

    t.reports = recompute_reports(s, t, &t.detections);
    return t;
}

std::vector<metrics::LinkReport> recompute_reports(
    const Scenario& s, const TraceRecord& t,
    std::vector<std::vector<framing::Detection>>* detections_out) {
    const auto table = scenario_table(s);
    const int thr = s.protocol.corr_threshold;

    std::size_t max_bit = 0;
    for (const auto& slot : t.slots) max_bit = std::max(max_bit, slot.start_bit + slot.bits.size());
    std::vector<Bits> tx(s.emitters.size());

    struct Acc {
        bool used = false;
        std::size_t bits = 0, errors = 0, expected = 0, valid = 0;
    };
    std::vector<Acc> acc(s.emitters.size());
    if (detections_out) detections_out->clear();

    for (const auto& slot : t.slots) {
        if (slot.emitter >= s.emitters.size())
            throw Error(ErrorCode::ParseError, "slot references unknown emitter");
        auto& a = acc[slot.emitter];
        a.used = true;
        auto& stream = tx[slot.emitter];
        if (stream.empty()) stream = emitter_stream(s, slot.emitter, max_bit);

        const auto found = framing::detect_synchronized(slot.bits, table, thr);
        if (detections_out) {
            std::vector<framing::Detection> light;
            for (const auto& d : found) light.push_back({d.offset, d.label, {}, d.score});
            detections_out->push_back(std::move(light));
        }

        // BER from the first header of this emitter; nominal alignment otherwise
        std::size_t sync = 0;
        for (const auto& d : found)
            if (d.label == static_cast<int>(slot.emitter)) {
                sync = d.offset;
                break;
            }
        const std::size_t n = slot.bits.size();
        if (sync < n) {
            const Bits rx(slot.bits.begin() + static_cast<long>(sync), slot.bits.end());
            const auto from = stream.begin() + static_cast<long>(slot.start_bit + sync);
            const Bits ref(from, from + static_cast<long>(n - sync));
            a.errors += metrics::hamming_distance(ref, rx);
            a.bits += n - sync;
        }

        const std::size_t P = framing::kPacketBits;
        const std::size_t first = (P - slot.start_bit % P) % P;  // first packet start in slot
        if (n >= first + P) a.expected += (n - first) / P;
        metrics::DetectionFilter f;
        f.label = static_cast<int>(slot.emitter);
        f.packet_phase = first;
        f.min_score = thr;
        a.valid += metrics::count_valid(found, f);
    }

    std::vector<metrics::LinkReport> out;
    for (std::size_t e = 0; e < acc.size(); ++e) {
        const auto& a = acc[e];
        if (!a.used) continue;
        metrics::LinkReport r;
        r.emitter = static_cast<int>(e);
        r.bits_compared = a.bits;
        r.bit_errors = a.errors;
        r.ber = a.bits ? static_cast<double>(a.errors) / static_cast<double>(a.bits) : 0.0;
        r.packets_expected = a.expected;
        r.packets_detected_valid = std::min(a.valid, a.expected);
        if (a.expected > 0)
            r.per_percent = metrics::packet_error_rate(r.packets_detected_valid, a.expected);
        if (t.controller.ran && e < t.emitter_pixel.size() &&
            t.emitter_pixel[e] < t.controller.pixel_snr_db.size())
            r.snr_db = t.controller.pixel_snr_db[t.emitter_pixel[e]];
        const auto& m = s.modem_for(e);
        r.goodput_bps = metrics::goodput(r.ber, s.code_rate, m.symbol_rate,
                                         static_cast<double>(m.bits_per_symbol));
        out.push_back(r);
    }
    return out;
}

json reports_to_json(const std::vector<metrics::LinkReport>& reports) {
    auto arr = json::array();
    for (const auto& r : reports) arr.push_back(metrics::to_json(r));
    return arr;
}

json to_json(const TraceRecord& t) {
    json j;
    j["schema_version"] = kSchemaVersion;
    j["scenario"] = t.scenario;
    j["scenario_hash"] = t.scenario_hash;
    j["scenario_base_dir"] = t.base_dir;
    j["rng_seed"] = t.rng_seed;
    j["emitter_pixel"] = t.emitter_pixel;
    json c;
    c["ran"] = t.controller.ran;
    c["converged"] = t.controller.converged;
    c["cycles"] = t.controller.cycles;
    c["dwells"] = t.controller.dwells;
    c["sim_time_s"] = t.controller.sim_time_s;
    c["locked_pixels"] = t.controller.locked_pixels;
    auto snr = json::array();
    for (const auto& v : t.controller.pixel_snr_db) snr.push_back(metrics::snr_to_json(v));
    c["pixel_snr_db"] = snr;
    j["controller"] = c;
    auto ev = json::array();
    for (const auto& e : t.events) ev.push_back(shutter::to_json(e));
    j["events"] = ev;
    auto slots = json::array();
    for (std::size_t i = 0; i < t.slots.size(); ++i) {
        const auto& s = t.slots[i];
        json js;
        js["emitter"] = s.emitter;
        js["mask"] = s.mask;
        js["start_s"] = s.start_s;
        js["start_bit"] = s.start_bit;
        js["bits"] = bits_to_string(s.bits);
        auto dets = json::array();
        if (i < t.detections.size())
            for (const auto& d : t.detections[i]) dets.push_back(detection_to_json(d));
        js["detections"] = dets;
        slots.push_back(js);
    }
    j["slots"] = slots;
    j["reports"] = reports_to_json(t.reports);
    return j;
}

TraceRecord trace_from_json(const json& j) {
    if (!j.is_object()) throw Error(ErrorCode::ParseError, "trace must be a JSON object");
    if (!j.contains("schema_version") || j["schema_version"] != kSchemaVersion)
        throw Error(ErrorCode::SchemaVersionMismatch, "unsupported trace schema_version");
    TraceRecord t;
    try {
        t.scenario = j.at("scenario");
        t.scenario_hash = j.at("scenario_hash").get<std::string>();
        t.base_dir = j.value("scenario_base_dir", std::string{});
        t.rng_seed = j.at("rng_seed").get<std::uint64_t>();
        t.emitter_pixel = j.at("emitter_pixel").get<std::vector<std::size_t>>();
        const auto& c = j.at("controller");
        t.controller.ran = c.at("ran").get<bool>();
        t.controller.converged = c.at("converged").get<bool>();
        t.controller.cycles = c.at("cycles").get<int>();
        t.controller.dwells = c.at("dwells").get<std::size_t>();
        t.controller.sim_time_s = c.at("sim_time_s").get<double>();
        t.controller.locked_pixels = c.at("locked_pixels").get<std::vector<std::size_t>>();
        for (const auto& v : c.at("pixel_snr_db"))
            t.controller.pixel_snr_db.push_back(metrics::snr_from_json(v));
        for (const auto& e : j.at("events")) t.events.push_back(shutter::event_from_json(e));
        for (const auto& js : j.at("slots")) {
            SlotTrace s;
            s.emitter = js.at("emitter").get<std::size_t>();
            s.mask = js.at("mask").get<std::string>();
            s.start_s = js.at("start_s").get<double>();
            s.start_bit = js.at("start_bit").get<std::size_t>();
            s.bits = bits_from_string(js.at("bits").get<std::string>());
            std::vector<framing::Detection> dets;
            for (const auto& d : js.at("detections"))
                dets.push_back({d.at("offset").get<std::size_t>(), d.at("label").get<int>(), {},
                                d.at("score").get<int>()});
            t.detections.push_back(std::move(dets));
            t.slots.push_back(std::move(s));
        }
        for (const auto& r : j.at("reports")) {
            metrics::LinkReport lr;
            lr.emitter = r.at("emitter").get<int>();
            lr.ber = r.at("ber").get<double>();
            if (!r.at("per_percent").is_null()) lr.per_percent = r["per_percent"].get<double>();
            lr.snr_db = metrics::snr_from_json(r.at("snr_db"));
            lr.goodput_bps = r.at("goodput_bps").get<double>();
            lr.bits_compared = r.at("bits_compared").get<std::size_t>();
            lr.bit_errors = r.at("bit_errors").get<std::size_t>();
            lr.packets_expected = r.at("packets_expected").get<std::size_t>();
            lr.packets_detected_valid = r.at("packets_detected_valid").get<std::size_t>();
            t.reports.push_back(lr);
        }
    } catch (const json::exception& e) {
        throw Error(ErrorCode::ParseError, e.what());
    }
    return t;
}

std::vector<metrics::LinkReport> replay_trace(const TraceRecord& t) {
    const auto s = scenario_from_json(t.scenario, t.base_dir);
    if (scenario_hash(s) != t.scenario_hash)
        throw Error(ErrorCode::ParseError, "scenario hash does not match the embedded scenario");
    return recompute_reports(s, t);
}

std::vector<metrics::LinkReport> replay_trace(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::ParseError, "cannot open trace " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw Error(ErrorCode::ParseError, path.string() + ": " + e.what());
    }
    return replay_trace(trace_from_json(j));
}

void write_trace_files(const TraceRecord& t, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    {
        std::ofstream out(dir / "trace.json");
        out << to_json(t).dump() << '\n';
    }
    {
        std::ofstream out(dir / "reports.json");
        out << reports_to_json(t.reports).dump(2) << '\n';
    }
    {
        std::ofstream out(dir / "events.jsonl");
        for (const auto& e : t.events) out << shutter::to_json(e).dump() << '\n';
    }
    if (!t.samples.empty()) {
        std::ofstream out(dir / "samples.csv");
        out.precision(17);
        out << "sim_time_s,intensity\n";
        for (const auto& [time, v] : t.samples) out << time << ',' << v << '\n';
    }
}

}  // namespace vlcmux
