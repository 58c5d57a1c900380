#include "vlcmux/tables.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>
#include <tuple>

#include "vlcmux/error.hpp"
#include "vlcmux/harness.hpp"
#include "vlcmux/metrics.hpp"
#include "vlcmux/optics.hpp"
#include "vlcmux/shutter.hpp"

namespace vlcmux {

namespace {

std::string fmt(double v, int precision = 4) {
    std::ostringstream os;
    os << std::setprecision(precision) << v;
    return os.str();
}

Scenario load(const std::string& name, const std::optional<std::filesystem::path>& dir) {
    if (dir) return load_scenario(*dir / (name + ".json"));
    return bundled_scenario(name);
}

const metrics::LinkReport& report_for(const TraceRecord& t, std::size_t emitter) {
    for (const auto& r : t.reports)
        if (r.emitter == static_cast<int>(emitter)) return r;
    throw Error(ErrorCode::ScenarioInvalid, "scenario produced no report for emitter " +
                                                std::to_string(emitter));
}

double desired_ber(const Scenario& s) {
    const auto t = run_scenario(s);
    return report_for(t, s.receiver.desired_emitter).ber;
}

TableReport geometry() {
    TableReport r;
    r.name = "GEOMETRY";
    optics::OpticalSetup setup;  // prototype bench defaults
    const double h_cm = optics::min_separation(setup) * 100.0;
    const double alpha = optics::min_angle_deg(setup);
    r.cells.push_back({"h [cm]", h_cm, "14.88", "+-0.005", std::abs(h_cm - 14.88) <= 0.005});
    r.cells.push_back({"alpha [deg]", alpha, "51.2", "+-0.1", std::abs(alpha - 51.2) <= 0.1});
    auto far = setup;
    far.emitter_distance_m = 10.0;
    const double h_far = optics::min_separation(far);
    r.cells.push_back({"h at 10 m [m]", h_far, "close to 10", "+-0.5", std::abs(h_far - 10.0) <= 0.5});
    auto wide = far;
    wide.pixel_pitch_m *= 2.0;
    r.notes.push_back("alpha rounds to " + fmt(optics::round_deg(alpha), 3) + " deg at one decimal");
    r.notes.push_back("doubling d at 10 m gives h = " + fmt(optics::min_separation(wide), 4) +
                      " m; h grows with d, so a 5 m figure is not reachable by enlarging d");
    return r;
}

TableReport latency() {
    TableReport r;
    r.name = "T5_LATENCY";
    const std::pair<std::size_t, double> rows[] = {{100, 219.6}, {1000, 1209.6}};
    for (const auto& [side, total_ms] : rows) {
        shutter::LatencyModel m;
        m.grid_pixels = side * side;
        m.n_transmitters = 100;
        m.packet_bits = 2096;
        m.bit_time_s = 1e-6;
        m.switching_time_s = 1e-6;
        const auto e = shutter::estimate_latency(m);
        const std::string grid = std::to_string(side) + "x" + std::to_string(side);
        const double step1 = e.discovery_s * 1e3, step2 = e.identification_s * 1e3,
                     total = e.total_s * 1e3;
        const double want1 = static_cast<double>(side * side) * 1e-3;
        constexpr double kExact = 1e-9;
        r.cells.push_back({grid + " step 1 [ms]", step1, fmt(want1, 6), "exact", std::abs(step1 - want1) <= kExact});
        r.cells.push_back({grid + " step 2 [ms]", step2, "209.6", "exact", std::abs(step2 - 209.6) <= kExact});
        r.cells.push_back({grid + " total [ms]", total, fmt(total_ms, 6), "exact", std::abs(total - total_ms) <= kExact});
    }
    return r;
}

TableReport packets() {
    TableReport r;
    r.name = "T3_PACKETS";
    const std::tuple<const char*, double, std::size_t> rows[] = {
        {"500 kHz", 500e3, 477}, {"1 MHz", 1e6, 954}, {"2 MHz", 2e6, 1908}};
    for (const auto& [label, rate, want] : rows) {
        const auto n = shutter::packets_per_slot(rate, 1.0, 2.0, 2096);
        r.cells.push_back({std::string(label) + " pkts in T_s", static_cast<double>(n),
                           std::to_string(want), "exact", n == want});
    }
    return r;
}

TableReport goodput() {
    TableReport r;
    r.name = "GOODPUT";
    const double g = metrics::goodput(0.015, 1.0 / 3.0, 2e6, 2.0);
    const double rel_exact = std::abs(g - 1.313e6) / 1.313e6;
    const double rounded_mbps = std::round(g / 1e5) / 10.0;
    r.cells.push_back({"goodput [bps]", g, "1.313e6", "+-1%", rel_exact <= 0.01});
    r.cells.push_back({"goodput [Mbps, 1 decimal]", rounded_mbps, "1.3", "equal at published precision",
                       std::abs(rounded_mbps - 1.3) < 1e-9});
    r.notes.push_back("deviation from 1.3e6 itself: " + fmt(100.0 * std::abs(g - 1.3e6) / 1.3e6, 3) + "%");
    return r;
}

TableReport table1(const std::optional<std::filesystem::path>& dir) {
    TableReport r;
    r.name = "T1_BER";
    for (int type = 1; type <= 4; ++type) {
        for (int c = 1; c <= 2; ++c) {
            const std::string name = "table1_type" + std::to_string(type) + "_case" + std::to_string(c);
            const double ber = desired_ber(load(name, dir));
            const bool high = c == 1 && (type == 2 || type == 4);
            TableCell cell;
            cell.label = "Type " + std::to_string(type) + " Case " + (c == 1 ? "I" : "II");
            cell.computed = ber;
            cell.reference = high ? "4.9e-1" : "1e-3";
            cell.check = high ? "[0.4, 0.6]" : "<= 1e-2";
            cell.pass = high ? (ber >= 0.4 && ber <= 0.6) : ber <= 1e-2;
            r.cells.push_back(cell);
        }
    }
    return r;
}

TableReport table2(const std::optional<std::filesystem::path>& dir) {
    TableReport r;
    r.name = "T2_BER";
    const std::pair<const char*, const char*> rates[] = {{"500k", "500 kHz"}, {"1m", "1 MHz"}, {"2m", "2 MHz"}};
    const char* refs[3][3] = {{"0.015", "0.039", "0.21"}, {"0.015", "0.035", "0.21"}, {"0.015", "0.030", "0.21"}};
    for (std::size_t i = 0; i < 3; ++i) {
        const auto [key, label] = rates[i];
        double ber[3];
        for (int c = 1; c <= 3; ++c)
            ber[c - 1] = desired_ber(load(std::string("table2_") + key + "_config" + std::to_string(c), dir));
        for (int c = 1; c <= 3; ++c)
            r.cells.push_back({std::string(label) + " Config." + std::to_string(c), ber[c - 1],
                               refs[i][c - 1], "reported", true});
        const double ratio = ber[0] > 0.0 ? ber[2] / ber[0] : std::numeric_limits<double>::infinity();
        r.cells.push_back({std::string(label) + " Config.3 / Config.1", ratio, ">= 10 (an order)",
                           ">= 5", ber[2] >= 5.0 * ber[0]});
    }
    return r;
}

TableReport table4(const std::optional<std::filesystem::path>& dir) {
    TableReport r;
    r.name = "T4_SNR";
    const double switching_ms[] = {100, 500, 1000, 1500, 2000};
    const char* refs[5][2] = {{"19.97", "-0.27"}, {"19.96", "0.48"}, {"19.86", "-0.47"},
                              {"20.02", "-0.60"}, {"19.99", "-1.18"}};
    std::vector<double> px[2];
    for (std::size_t i = 0; i < 5; ++i) {
        auto s = load("table4_snr", dir);
        s.protocol.switching_time_s = switching_ms[i] / 1e3;
        const auto t = run_scenario(s);
        std::vector<std::optional<double>> snr;
        for (const auto& e : t.events)
            if (!e.pixel_snr_db.empty()) {
                snr = e.pixel_snr_db;
                break;
            }
        if (snr.size() < 2 || !snr[0] || !snr[1])
            throw Error(ErrorCode::ScenarioInvalid, "table4_snr produced no Discovery scan");
        for (std::size_t p = 0; p < 2; ++p) {
            px[p].push_back(*snr[p]);
            r.cells.push_back({"pixel " + std::to_string(p + 1) + " @ " + fmt(switching_ms[i]) + " ms",
                               *snr[p], refs[i][p], "reported", true});
        }
    }
    for (std::size_t p = 0; p < 2; ++p) {
        const auto [lo, hi] = std::minmax_element(px[p].begin(), px[p].end());
        r.cells.push_back({"pixel " + std::to_string(p + 1) + " spread [dB]", *hi - *lo,
                           "consistent across switching times", "<= 0.5", *hi - *lo <= 0.5});
    }
    return r;
}

}  // namespace

std::string to_string(TableName t) {
    switch (t) {
        case TableName::Geometry: return "GEOMETRY";
        case TableName::T1Ber: return "T1_BER";
        case TableName::T2Ber: return "T2_BER";
        case TableName::T3Packets: return "T3_PACKETS";
        case TableName::T4Snr: return "T4_SNR";
        case TableName::T5Latency: return "T5_LATENCY";
        case TableName::Goodput: return "GOODPUT";
    }
    return "UNKNOWN";
}

std::vector<TableName> all_tables() {
    return {TableName::Geometry, TableName::T1Ber,     TableName::T2Ber, TableName::T3Packets,
            TableName::T4Snr,    TableName::T5Latency, TableName::Goodput};
}

TableName table_from_string(const std::string& s) {
    for (auto t : all_tables())
        if (to_string(t) == s) return t;
    throw Error(ErrorCode::ConfigInvalid, "unknown table '" + s + "'");
}

bool TableReport::pass() const {
    return std::all_of(cells.begin(), cells.end(), [](const TableCell& c) { return c.pass; });
}

std::string TableReport::text() const {
    std::size_t w = 8;
    for (const auto& c : cells) w = std::max(w, c.label.size());
    std::ostringstream os;
    os << name << '\n';
    os << std::left << std::setw(static_cast<int>(w) + 2) << "cell" << std::setw(14) << "computed"
       << std::setw(34) << "reference" << std::setw(30) << "check" << "result\n";
    for (const auto& c : cells) {
        os << std::left << std::setw(static_cast<int>(w) + 2) << c.label << std::setw(14)
           << fmt(c.computed, 6) << std::setw(34) << c.reference << std::setw(30) << c.check
           << (c.pass ? "PASS" : "FAIL") << '\n';
    }
    for (const auto& n : notes) os << "note: " << n << '\n';
    return os.str();
}

nlohmann::json TableReport::json() const {
    nlohmann::json j;
    j["table"] = name;
    j["pass"] = pass();
    auto arr = nlohmann::json::array();
    for (const auto& c : cells)
        arr.push_back({{"cell", c.label},
                       {"computed", c.computed},
                       {"reference", c.reference},
                       {"check", c.check},
                       {"pass", c.pass}});
    j["cells"] = arr;
    j["notes"] = notes;
    return j;
}

TableReport reproduce_table(TableName table, const std::optional<std::filesystem::path>& dir) {
    switch (table) {
        case TableName::Geometry: return geometry();
        case TableName::T1Ber: return table1(dir);
        case TableName::T2Ber: return table2(dir);
        case TableName::T3Packets: return packets();
        case TableName::T4Snr: return table4(dir);
        case TableName::T5Latency: return latency();
        case TableName::Goodput: return goodput();
    }
    throw Error(ErrorCode::ConfigInvalid, "unknown table");
}

}  // namespace vlcmux
