#include "output.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <stdexcept>

#include "config_file.hpp"

namespace keplerlab::cli {

namespace {

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string quoted = "\"";
    for (char c : s) {
        if (c == '"') quoted += '"';
        quoted += c;
    }
    return quoted + "\"";
}

std::string cell_text(const Cell& c) {
    struct Visitor {
        std::string operator()(std::monostate) const { return {}; }
        std::string operator()(double v) const { return format_number(v); }
        std::string operator()(std::int64_t v) const { return std::to_string(v); }
        std::string operator()(const std::string& s) const { return csv_field(s); }
    };
    return std::visit(Visitor{}, c);
}

Json cell_json(const Cell& c) {
    struct Visitor {
        Json operator()(std::monostate) const { return nullptr; }
        Json operator()(double v) const { return std::isfinite(v) ? Json(v) : Json(nullptr); }
        Json operator()(std::int64_t v) const { return v; }
        Json operator()(const std::string& s) const { return s; }
    };
    return std::visit(Visitor{}, c);
}

std::string json_scalar_text(const Json& v) {
    if (v.is_null()) return {};
    if (v.is_number_float()) return format_number(v.get<double>());
    if (v.is_string()) return csv_field(v.get<std::string>());
    return csv_field(v.dump());
}

std::ofstream open_output(const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot write output file '" + path + "'");
    return f;
}

}  // namespace

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_csv(const Table& table, std::ostream& out) {
    for (std::size_t i = 0; i < table.columns.size(); ++i) {
        out << (i ? "," : "") << csv_field(table.columns[i]);
    }
    out << '\n';
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << cell_text(row[i]);
        out << '\n';
    }
}

Json table_to_json(const Table& table, const Json& config) {
    Json rows = Json::array();
    for (const auto& row : table.rows) {
        Json obj = Json::object();
        for (std::size_t i = 0; i < row.size(); ++i) obj[table.columns[i]] = cell_json(row[i]);
        rows.push_back(std::move(obj));
    }
    return Json{{"config", config}, {"rows", std::move(rows)}};
}

void write_report(const Json& report, Format format, std::ostream& out) {
    if (format == Format::Json) {
        out << report.dump(2) << '\n';
        return;
    }
    bool first = true;
    for (const auto& [key, value] : report.items()) {
        if (key == "config") continue;
        out << (first ? "" : ",") << csv_field(key);
        first = false;
    }
    out << '\n';
    first = true;
    for (const auto& [key, value] : report.items()) {
        if (key == "config") continue;
        out << (first ? "" : ",") << json_scalar_text(value);
        first = false;
    }
    out << '\n';
}

void emit_table(const Table& table, const Json& config, Format format, const std::string& path, std::ostream& out) {
    auto write = [&](std::ostream& os) {
        if (format == Format::Csv) {
            write_csv(table, os);
        } else {
            os << table_to_json(table, config).dump(2) << '\n';
        }
    };
    if (path.empty()) {
        write(out);
        return;
    }
    auto f = open_output(path);
    write(f);
    if (format == Format::Csv) {
        auto meta = open_output(path + ".meta.json");
        meta << Json{{"config", config}, {"columns", table.columns}}.dump(2) << '\n';
    }
}

void emit_report(const Json& report, Format format, const std::string& path, std::ostream& out) {
    if (path.empty()) {
        write_report(report, format, out);
        return;
    }
    auto f = open_output(path);
    write_report(report, format, f);
    if (format == Format::Csv) {
        auto meta = open_output(path + ".meta.json");
        meta << Json{{"config", report.value("config", Json::object())}}.dump(2) << '\n';
    }
}

}  // namespace keplerlab::cli
