// vlcmux command-line front end: geometry, scenario runs, trace replay and
// table reproduction. Exit code 0 on success/pass, 1 on a tolerance failure,
// 2 on invalid input.

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "vlcmux/error.hpp"
#include "vlcmux/harness.hpp"
#include "vlcmux/optics.hpp"
#include "vlcmux/scenario.hpp"
#include "vlcmux/shutter.hpp"
#include "vlcmux/tables.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace vlcmux;

namespace {

void print_reports(const std::vector<metrics::LinkReport>& reports) {
    auto num = [](std::optional<double> v, int prec) {
        if (!v) return std::string("-");
        std::ostringstream os;
        os << std::fixed << std::setprecision(prec) << *v;
        return os.str();
    };
    std::cout << std::left << std::setw(9) << "emitter" << std::setw(12) << "BER" << std::setw(10)
              << "PER [%]" << std::setw(10) << "SNR [dB]" << std::setw(15) << "goodput [bps]"
              << std::setw(10) << "bits" << "packets\n";
    for (const auto& r : reports) {
        std::cout << std::left << std::setw(9) << r.emitter << std::setw(12) << num(r.ber, 6)
                  << std::setw(10) << num(r.per_percent, 2) << std::setw(10) << num(r.snr_db, 2)
                  << std::setw(15) << num(r.goodput_bps, 0) << std::setw(10) << r.bits_compared
                  << r.packets_detected_valid << "/" << r.packets_expected << '\n';
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Pixelated-shutter VLC multiple-access simulator"};
    app.require_subcommand(1);
    bool json_only = false;
    app.add_flag("--json", json_only, "Print JSON only");

    // geometry
    auto* geo = app.add_subcommand("geometry", "Minimum emitter separation and angle");
    optics::OpticalSetup setup;
    std::vector<double> placement;
    geo->add_option("--d", setup.pixel_pitch_m, "Pixel pitch [m]")->capture_default_str();
    geo->add_option("--s1", setup.emitter_distance_m, "Emitter to lens [m]")->capture_default_str();
    geo->add_option("--s2", setup.shutter_distance_m, "Lens to shutter [m]")->capture_default_str();
    geo->add_option("--bfl", setup.back_focal_length_m, "Back focal length [m]")->capture_default_str();
    geo->add_option("--rows", setup.grid_rows, "Shutter rows")->capture_default_str();
    geo->add_option("--cols", setup.grid_cols, "Shutter columns")->capture_default_str();
    geo->add_option("--emitters", placement, "Emitter positions x1 y1 x2 y2 ... [m]");

    // run
    auto* run = app.add_subcommand("run", "Run a scenario file");
    std::string scenario_path;
    std::optional<std::uint64_t> seed;
    std::string out_dir = "out";
    bool dump_samples = false;
    run->add_option("scenario", scenario_path, "Scenario JSON")->required();
    run->add_option("--seed", seed, "Override the scenario seed");
    run->add_option("--out-dir", out_dir, "Directory for trace files")->capture_default_str();
    run->add_flag("--dump-samples", dump_samples, "Also write samples.csv");

    // tables
    auto* tables = app.add_subcommand("tables", "Reproduce a published table");
    std::string table_name;
    std::string scenario_dir;
    tables->add_option("name", table_name,
                       "GEOMETRY | T1_BER | T2_BER | T3_PACKETS | T4_SNR | T5_LATENCY | GOODPUT | ALL")
        ->required();
    tables->add_option("--scenario-dir", scenario_dir, "Load bundled scenarios from this directory");

    // latency
    auto* lat = app.add_subcommand("latency", "Estimate controller latency");
    shutter::LatencyModel model;
    model.grid_pixels = 100 * 100;
    model.n_transmitters = 100;
    lat->add_option("--pixels", model.grid_pixels, "Shutter pixels")->capture_default_str();
    lat->add_option("--transmitters", model.n_transmitters, "Transmitters")->capture_default_str();
    lat->add_option("--packet-bits", model.packet_bits, "Packet size [bits]")->capture_default_str();
    lat->add_option("--bit-time", model.bit_time_s, "Seconds per bit")->capture_default_str();
    lat->add_option("--ts", model.switching_time_s, "Switching time [s]")->capture_default_str();

    // packets-per-slot
    auto* pps = app.add_subcommand("packets-per-slot", "Whole packets per switching slot");
    double symbol_rate = 500e3, bits_per_symbol = 1.0, slot_s = 2.0;
    std::size_t packet_bits = 2096;
    pps->add_option("--symbol-rate", symbol_rate, "Symbols per second")->capture_default_str();
    pps->add_option("--bits-per-symbol", bits_per_symbol, "Bits per symbol")->capture_default_str();
    pps->add_option("--ts", slot_s, "Slot [s]")->capture_default_str();
    pps->add_option("--packet-bits", packet_bits, "Packet size [bits]")->capture_default_str();

    // replay
    auto* rep = app.add_subcommand("replay", "Recompute reports from a trace");
    std::string trace_path;
    rep->add_option("trace", trace_path, "trace.json")->required();

    // scenarios
    auto* scen = app.add_subcommand("scenarios", "List or export the bundled scenarios");
    std::string write_dir;
    scen->add_option("--write", write_dir, "Write every bundled scenario into this directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*geo) {
            json j;
            j["h_m"] = optics::min_separation(setup);
            j["alpha_deg"] = optics::round_deg(optics::min_angle_deg(setup));
            j["alpha_deg_exact"] = optics::min_angle_deg(setup);
            if (!placement.empty()) {
                if (placement.size() % 2 != 0) throw Error(ErrorCode::ConfigInvalid, "--emitters needs x y pairs");
                optics::EmitterPlacement p;
                for (std::size_t i = 0; i + 1 < placement.size(); i += 2)
                    p.positions.push_back({placement[i], placement[i + 1]});
                const auto m = optics::map_emitters_to_pixels(setup, p);
                j["feasible"] = m.feasible();
                if (m.feasible())
                    j["emitter_pixel"] = m.emitter_pixel;
                else {
                    j["reason"] = optics::to_string(*m.infeasible);
                    j["detail"] = m.detail;
                }
            }
            if (!json_only) {
                std::cout << "h      " << j["h_m"].get<double>() * 100.0 << " cm\n";
                std::cout << "alpha  " << j["alpha_deg"].get<double>() << " deg\n";
                if (j.contains("feasible"))
                    std::cout << "placement " << (j["feasible"].get<bool>() ? "feasible" : "infeasible") << '\n';
            }
            std::cout << j.dump() << '\n';
            return 0;
        }
        if (*run) {
            auto s = load_scenario(scenario_path);
            if (seed) s.rng_seed = *seed;
            RunOptions opts;
            opts.keep_samples = dump_samples;
            const auto t = run_scenario(s, opts);
            write_trace_files(t, out_dir);
            if (!json_only) {
                std::cout << "scenario " << s.name << " (hash " << t.scenario_hash << ", seed "
                          << t.rng_seed << ")\n";
                if (t.controller.ran)
                    std::cout << "controller " << (t.controller.converged ? "LOCKED" : "did not converge")
                              << " after " << t.controller.cycles << " cycle(s)\n";
                print_reports(t.reports);
            }
            std::cout << reports_to_json(t.reports).dump() << '\n';
            return t.controller.ran && !t.controller.converged ? 1 : 0;
        }
        if (*tables) {
            std::optional<fs::path> dir;
            if (!scenario_dir.empty()) dir = scenario_dir;
            std::vector<TableName> names;
            if (table_name == "ALL")
                names = all_tables();
            else
                names.push_back(table_from_string(table_name));
            bool ok = true;
            auto arr = json::array();
            for (auto n : names) {
                const auto rep = reproduce_table(n, dir);
                ok = ok && rep.pass();
                if (!json_only) std::cout << rep.text() << '\n';
                arr.push_back(rep.json());
            }
            std::cout << (arr.size() == 1 ? arr[0] : arr).dump() << '\n';
            return ok ? 0 : 1;
        }
        if (*lat) {
            const auto e = shutter::estimate_latency(model);
            json j = {{"step1_ms", e.discovery_s * 1e3},
                      {"step2_ms", e.identification_s * 1e3},
                      {"total_ms", e.total_s * 1e3}};
            if (!json_only)
                std::cout << "step 1 " << e.discovery_s * 1e3 << " ms\nstep 2 " << e.identification_s * 1e3
                          << " ms\ntotal  " << e.total_s * 1e3 << " ms\n";
            std::cout << j.dump() << '\n';
            return 0;
        }
        if (*pps) {
            const auto n = shutter::packets_per_slot(symbol_rate, bits_per_symbol, slot_s, packet_bits);
            if (!json_only) std::cout << n << " packets per slot\n";
            std::cout << json{{"packets", n}}.dump() << '\n';
            return 0;
        }
        if (*rep) {
            const auto reports = replay_trace(fs::path(trace_path));
            if (!json_only) print_reports(reports);
            std::cout << reports_to_json(reports).dump() << '\n';
            return 0;
        }
        if (*scen) {
            for (const auto& name : bundled_scenario_names()) {
                if (!write_dir.empty()) {
                    fs::create_directories(write_dir);
                    std::ofstream out(fs::path(write_dir) / (name + ".json"));
                    out << to_json(bundled_scenario(name)).dump(2) << '\n';
                }
                std::cout << name << '\n';
            }
            return 0;
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
