#include "dilatox/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "dilatox/error.hpp"

namespace dilatox::io {
namespace {

void dump(const Json& j, std::string& out, int depth, bool pretty) {
    const std::string pad = pretty ? std::string(static_cast<std::size_t>(2 * (depth + 1)), ' ') : "";
    const std::string close_pad = pretty ? std::string(static_cast<std::size_t>(2 * depth), ' ') : "";
    const char* open_obj = pretty ? "{\n" : "{";
    const char* open_arr = pretty ? "[\n" : "[";
    const char* sep = pretty ? ",\n" : ",";
    const char* nl = pretty ? "\n" : "";
    const char* colon = pretty ? ": " : ":";
    switch (j.type()) {
        case Json::value_t::object: {
            if (j.empty()) {
                out += "{}";
                return;
            }
            out += open_obj;
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) {
                if (!first) out += sep;
                first = false;
                out += pad + Json(it.key()).dump() + colon;
                dump(it.value(), out, depth + 1, pretty);
            }
            out += nl + close_pad + "}";
            return;
        }
        case Json::value_t::array: {
            if (j.empty()) {
                out += "[]";
                return;
            }
            out += open_arr;
            bool first = true;
            for (const auto& v : j) {
                if (!first) out += sep;
                first = false;
                out += pad;
                dump(v, out, depth + 1, pretty);
            }
            out += nl + close_pad + "]";
            return;
        }
        case Json::value_t::number_float: {
            const double v = j.get<double>();
            out += std::isfinite(v) ? format_double(v) : "null";
            return;
        }
        default:
            out += j.dump();
    }
}

}  // namespace

std::string format_double(double v) {
    if (v == 0.0) v = 0.0;
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string dump_json(const Json& j) {
    std::string out;
    dump(j, out, 0, true);
    out += "\n";
    return out;
}

std::string dump_json_compact(const Json& j) {
    std::string out;
    dump(j, out, 0, false);
    return out;
}

std::string render_csv(const CsvTable& table) {
    std::string out;
    for (const auto& c : table.comments) out += "# " + c + "\n";
    for (std::size_t i = 0; i < table.columns.size(); ++i) {
        if (i) out += ",";
        out += table.columns[i];
    }
    out += "\n";
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += ",";
            out += format_double(row[i]);
        }
        out += "\n";
    }
    return out;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw NumericalError("cannot open " + path.string() + " for writing");
    os.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!os) throw NumericalError("write failed for " + path.string());
}

std::vector<std::string> provenance_comments(const Json& resolved_config) {
    return {std::string("dilatox ") + DILATOX_VERSION, "config: " + dump_json_compact(resolved_config)};
}

}  // namespace dilatox::io
