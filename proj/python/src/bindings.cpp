#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "vlcmux/channel.hpp"
#include "vlcmux/error.hpp"
#include "vlcmux/framing.hpp"
#include "vlcmux/harness.hpp"
#include "vlcmux/metrics.hpp"
#include "vlcmux/modem.hpp"
#include "vlcmux/optics.hpp"
#include "vlcmux/scenario.hpp"
#include "vlcmux/shutter.hpp"
#include "vlcmux/tables.hpp"

namespace py = pybind11;
using namespace vlcmux;
using nlohmann::json;

namespace {

SampleBlock block(std::vector<double> samples, double rate) {
    SampleBlock b;
    b.samples = std::move(samples);
    b.sample_rate = rate;
    return b;
}

framing::IdLookupTable table_of(const std::vector<std::string>& kinds) {
    std::vector<framing::TransmitterId> ids;
    for (std::size_t i = 0; i < kinds.size(); ++i)
        ids.push_back(framing::make_id(framing::id_kind_from_string(kinds[i]), static_cast<int>(i)));
    return framing::IdLookupTable(std::move(ids));
}

py::dict detection_dict(const framing::Detection& d) {
    py::dict out;
    out["offset"] = d.offset;
    out["label"] = d.label;
    out["score"] = d.score;
    out["payload"] = bits_to_string(d.payload);
    return out;
}

}  // namespace

PYBIND11_MODULE(_vlcmux, m) {
    m.doc() = "Pixelated-shutter VLC receiver simulator";

    // message carries the kebab-case code first: "invalid-setup: ..."
    py::register_exception<Error>(m, "VlcmuxError", PyExc_RuntimeError);

    py::class_<optics::OpticalSetup>(m, "OpticalSetup")
        .def(py::init<>())
        .def_readwrite("pixel_pitch_m", &optics::OpticalSetup::pixel_pitch_m)
        .def_readwrite("emitter_distance_m", &optics::OpticalSetup::emitter_distance_m)
        .def_readwrite("shutter_distance_m", &optics::OpticalSetup::shutter_distance_m)
        .def_readwrite("back_focal_length_m", &optics::OpticalSetup::back_focal_length_m)
        .def_readwrite("grid_rows", &optics::OpticalSetup::grid_rows)
        .def_readwrite("grid_cols", &optics::OpticalSetup::grid_cols);

    m.def("min_separation", &optics::min_separation, py::arg("setup"));
    m.def("min_angle_deg", &optics::min_angle_deg, py::arg("setup"));
    m.def(
        "map_emitters_to_pixels",
        [](const optics::OpticalSetup& s, const std::vector<std::pair<double, double>>& pos) -> py::object {
            optics::EmitterPlacement p;
            for (auto [x, y] : pos) p.positions.push_back({x, y});
            const auto r = optics::map_emitters_to_pixels(s, p);
            if (r.feasible()) return py::cast(r.emitter_pixel);
            return py::none();
        },
        py::arg("setup"), py::arg("positions"), "Pixel per emitter, or None when infeasible");

    py::class_<modem::ModemConfig>(m, "ModemConfig")
        .def(py::init<>())
        .def_property(
            "scheme", [](const modem::ModemConfig& c) { return modem::to_string(c.scheme); },
            [](modem::ModemConfig& c, const std::string& s) { c.scheme = modem::scheme_from_string(s); })
        .def_readwrite("symbol_rate", &modem::ModemConfig::symbol_rate)
        .def_readwrite("samples_per_symbol", &modem::ModemConfig::samples_per_symbol)
        .def_readwrite("gmsk_bt", &modem::ModemConfig::gmsk_bt)
        .def_readwrite("dc_bias", &modem::ModemConfig::dc_bias)
        .def_readwrite("modulation_depth", &modem::ModemConfig::modulation_depth)
        .def_property_readonly("sample_rate", &modem::ModemConfig::sample_rate);

    m.def(
        "modulate",
        [](const Bits& bits, const modem::ModemConfig& cfg, bool inverted) {
            return modem::modulate(bits, cfg, inverted ? modem::PhaseOffset::Inverted : modem::PhaseOffset::InPhase)
                .samples;
        },
        py::arg("bits"), py::arg("cfg"), py::arg("inverted") = false);
    m.def(
        "demodulate",
        [](std::vector<double> samples, const modem::ModemConfig& cfg, std::optional<double> level) {
            return modem::demodulate(block(std::move(samples), cfg.sample_rate()), cfg, modem::Threshold{level});
        },
        py::arg("samples"), py::arg("cfg"), py::arg("fixed_level") = py::none());

    m.def(
        "make_id", [](const std::string& kind) { return bits_to_string(framing::make_id(framing::id_kind_from_string(kind)).id_bits); },
        py::arg("kind"));
    m.def(
        "frame",
        [](const Bits& payload, const std::string& kind) {
            return framing::frame(payload, framing::make_id(framing::id_kind_from_string(kind))).bits();
        },
        py::arg("payload"), py::arg("kind"));
    m.def(
        "detect_packets",
        [](const Bits& bits, const std::vector<std::string>& kinds, int threshold, bool synchronized) {
            const auto table = table_of(kinds);
            const auto found = synchronized ? framing::detect_synchronized(bits, table, threshold)
                                            : framing::detect_packets(bits, table, threshold);
            py::list out;
            for (const auto& d : found) out.append(detection_dict(d));
            return out;
        },
        py::arg("bits"), py::arg("kinds"), py::arg("threshold") = framing::kDefaultCorrThreshold,
        py::arg("synchronized") = false, "Labels are indices into kinds");

    m.def(
        "receive",
        [](const std::vector<std::vector<double>>& emitters, double sample_rate, const std::string& mask,
           const std::vector<double>& gains, const std::vector<std::size_t>& pixels, double noise_sigma,
           std::uint64_t seed, std::vector<double> ambient, double leakage, double saturation) {
            std::vector<SampleBlock> blocks;
            for (const auto& e : emitters) blocks.push_back(block(e, sample_rate));
            channel::PixelMask pm(mask.size());
            for (std::size_t i = 0; i < mask.size(); ++i) pm.set(i, mask[i] == '1');
            channel::ChannelConfig c;
            c.emitter_gain = gains;
            c.emitter_pixel = pixels;
            c.noise_sigma = noise_sigma;
            c.rng_seed = seed;
            c.ambient_dc = std::move(ambient);
            c.closed_leakage = leakage;
            c.saturation_level = saturation;
            return channel::receive(blocks, pm, c).samples;
        },
        py::arg("emitters"), py::arg("sample_rate"), py::arg("mask"), py::arg("gains"), py::arg("pixels"),
        py::arg("noise_sigma") = 0.0, py::arg("seed") = 0, py::arg("ambient") = std::vector<double>{},
        py::arg("leakage") = 0.0, py::arg("saturation") = std::numeric_limits<double>::infinity());
    m.def(
        "received_snr_db",
        [](std::vector<double> signal, std::vector<double> noise) {
            return channel::received_snr_db(block(std::move(signal), 1.0), block(std::move(noise), 1.0));
        },
        py::arg("signal"), py::arg("noise"));

    m.def("bit_error_rate", &metrics::bit_error_rate, py::arg("tx"), py::arg("rx"));
    m.def("packet_error_rate", py::overload_cast<std::size_t, std::size_t>(&metrics::packet_error_rate),
          py::arg("valid"), py::arg("expected"));
    m.def("goodput", &metrics::goodput, py::arg("ber"), py::arg("code_rate"), py::arg("symbol_rate"),
          py::arg("bits_per_symbol"));

    m.def(
        "estimate_latency",
        [](std::size_t pixels, std::size_t transmitters, std::size_t packet_bits, double bit_time, double ts) {
            const auto e = shutter::estimate_latency({pixels, transmitters, packet_bits, bit_time, ts});
            return std::make_tuple(e.discovery_s, e.identification_s, e.total_s);
        },
        py::arg("pixels"), py::arg("transmitters"), py::arg("packet_bits") = framing::kPacketBits,
        py::arg("bit_time") = 1e-6, py::arg("switching_time") = 1e-6);
    m.def("packets_per_slot", &shutter::packets_per_slot, py::arg("symbol_rate"), py::arg("bits_per_symbol"),
          py::arg("slot_s"), py::arg("packet_bits") = framing::kPacketBits);

    m.def("bundled_scenario_names", &bundled_scenario_names);
    m.def(
        "bundled_scenario_json", [](const std::string& name) { return to_json(bundled_scenario(name)).dump(); },
        py::arg("name"));
    m.def(
        "run_scenario_json",
        [](const std::string& scenario, const std::string& base_dir) {
            const auto s = scenario_from_json(json::parse(scenario), base_dir);
            TraceRecord t;
            {
                py::gil_scoped_release release;
                t = run_scenario(s);
            }
            return to_json(t).dump();
        },
        py::arg("scenario"), py::arg("base_dir") = "");
    m.def(
        "replay_json",
        [](const std::string& trace) { return reports_to_json(replay_trace(trace_from_json(json::parse(trace)))).dump(); },
        py::arg("trace"));
    m.def(
        "reproduce_table_json",
        [](const std::string& name) { return reproduce_table(table_from_string(name)).json().dump(); },
        py::arg("name"));
}
