#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

namespace keplerlab::cli {

using Json = nlohmann::ordered_json;

enum class Format { Csv, Json };

/// Empty cells (monostate) print as nothing in CSV and null in JSON.
using Cell = std::variant<std::monostate, double, std::int64_t, std::string>;

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
};

/// Round-trip decimal with 17 significant digits.
std::string format_number(double v);

void write_csv(const Table& table, std::ostream& out);
Json table_to_json(const Table& table, const Json& config);

/// A report is a flat JSON object; as CSV it is one header row and one data row.
void write_report(const Json& report, Format format, std::ostream& out);

/// Writes to `path` (or `out` when path is empty). For CSV files a metadata
/// sidecar `<path>.meta.json` carries the effective configuration.
void emit_table(const Table& table, const Json& config, Format format, const std::string& path, std::ostream& out);
void emit_report(const Json& report, Format format, const std::string& path, std::ostream& out);

}  // namespace keplerlab::cli
