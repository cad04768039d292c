#pragma once

#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include <json.hpp>

#include "qrcsl/errors.hpp"
#include "qrcsl/io/config.hpp"

// Result container and its two serializations.  JSON is the machine
// interface (the whole envelope, including a re-parseable config echo);
// CSV is the plot-ready interface (the table when a subcommand produced
// one, otherwise the flat record list).  Numbers in CSV carry 17
// significant digits so they round-trip to the same double.
//
// Wall time is measured by the driver and reported on stderr only; keeping
// it out of the serialized body is what makes re-runs byte-identical.

namespace qrcsl {

inline constexpr const char* artifact_version = "1.0.0";

struct ResultRecord {
    std::string name;
    double value = 0.0;
    std::string units;   // "1" for dimensionless, "bool" for 0/1 flags
    std::string method;  // closed_form, quadrature, series, monte_carlo, ...
    double band_lo = 0.0;  // tolerance or uncertainty band around the value
    double band_hi = 0.0;
    bool has_band = false;
    std::string note;
};

struct ResultTable {
    std::vector<std::string> columns;  // header cells, name[unit]
    std::vector<std::vector<double>> rows;

    bool empty() const { return rows.empty(); }
};

struct ResultEnvelope {
    std::string version = artifact_version;
    std::string subcommand;
    std::string config_echo;  // render_config of the resolved RunConfig
    std::uint64_t seed = default_seed;
    std::vector<ResultRecord> records;
    ResultTable table;
    double wall_time_s = 0.0;  // stderr only, never serialized
};

inline std::string to_json_text(const ResultEnvelope& env)
{
    nlohmann::ordered_json j;
    j["version"] = env.version;
    j["subcommand"] = env.subcommand;
    j["seed"] = env.seed;
    j["config"] = env.config_echo;
    auto recs = nlohmann::ordered_json::array();
    for (const auto& r : env.records) {
        nlohmann::ordered_json jr;
        jr["name"] = r.name;
        jr["value"] = r.value;
        jr["units"] = r.units;
        jr["method"] = r.method;
        if (r.has_band) jr["band"] = {r.band_lo, r.band_hi};
        if (!r.note.empty()) jr["note"] = r.note;
        recs.push_back(std::move(jr));
    }
    j["records"] = std::move(recs);
    if (!env.table.empty()) {
        j["table"]["columns"] = env.table.columns;
        j["table"]["rows"] = env.table.rows;
    }
    return j.dump(2) + "\n";
}

inline std::string to_csv_text(const ResultEnvelope& env)
{
    auto join = [](const std::vector<std::string>& cells) {
        std::string line;
        for (std::size_t i = 0; i < cells.size(); ++i) line += (i ? "," : "") + cells[i];
        return line + "\n";
    };
    std::string o;
    if (!env.table.empty()) {
        o += join(env.table.columns);
        for (const auto& row : env.table.rows) {
            std::vector<std::string> cells;
            cells.reserve(row.size());
            for (double v : row) cells.push_back(detail::fmt17(v));
            o += join(cells);
        }
        return o;
    }
    o += "name,value,units,method\n";
    for (const auto& r : env.records)
        o += join({r.name, detail::fmt17(r.value), r.units, r.method});
    return o;
}

enum class OutputFormat { json, csv };

inline std::string serialize(const ResultEnvelope& env, OutputFormat format)
{
    return format == OutputFormat::json ? to_json_text(env) : to_csv_text(env);
}

// Temp-file-and-rename so a failed run never leaves a truncated artifact.
inline void write_text_atomic(const std::string& path, const std::string& body)
{
    const std::string tmp = path + ".tmp";
    std::FILE* f = std::fopen(tmp.c_str(), "wb");
    if (!f) throw config_error("cannot open output file: " + tmp);
    const bool wrote = std::fwrite(body.data(), 1, body.size(), f) == body.size();
    const bool closed = std::fclose(f) == 0;
    if (!wrote || !closed) {
        std::remove(tmp.c_str());
        throw config_error("failed writing output file: " + path);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0) {
        std::remove(tmp.c_str());
        throw config_error("cannot move output into place: " + path);
    }
}

} // namespace qrcsl
