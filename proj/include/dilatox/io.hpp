#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace dilatox::io {

using Json = nlohmann::ordered_json;

/// %.17g, with negative zero printed as 0.
std::string format_double(double v);

/// JSON text with two-space indentation, keys in insertion order and floats
/// as format_double. Non-finite floats become null.
std::string dump_json(const Json& j);
/// Same formatting on one line without spaces.
std::string dump_json_compact(const Json& j);

struct CsvTable {
    std::vector<std::string> comments;  ///< each written as "# " + line
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

std::string render_csv(const CsvTable& table);

/// Writes bytes exactly as given (binary mode, truncating).
void write_file(const std::filesystem::path& path, const std::string& content);

/// Comment lines naming the artifact version and the resolved config.
std::vector<std::string> provenance_comments(const Json& resolved_config);

}  // namespace dilatox::io
