#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace vlcmux {

enum class TableName { Geometry, T1Ber, T2Ber, T3Packets, T4Snr, T5Latency, Goodput };

std::string to_string(TableName t);
TableName table_from_string(const std::string& s);
std::vector<TableName> all_tables();

struct TableCell {
    std::string label;
    double computed = 0.0;
    std::string reference;  // published value or regime being reproduced
    std::string check;      // tolerance or range applied
    bool pass = false;
};

struct TableReport {
    std::string name;
    std::vector<TableCell> cells;
    std::vector<std::string> notes;

    bool pass() const;
    std::string text() const;
    nlohmann::json json() const;
};

/// Recomputes one published table next to its reference values. Scenario
/// backed tables load `<scenario_dir>/<name>.json` when a directory is given
/// and use the built-in bundled scenarios otherwise.
TableReport reproduce_table(TableName table,
                            const std::optional<std::filesystem::path>& scenario_dir = {});

}  // namespace vlcmux
