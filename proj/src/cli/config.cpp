#include "cli/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <toml.hpp>

namespace dilatox::cli {
namespace {

std::string join(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
}

void toml_to_json(const toml::node& node, Json& out, const std::string& path,
                  std::map<std::string, int>& lines) {
    if (!path.empty()) lines[path] = static_cast<int>(node.source().begin.line);
    if (const auto* table = node.as_table()) {
        out = Json::object();
        for (auto&& [key, value] : *table) {
            const std::string k(key.str());
            toml_to_json(value, out[k], join(path, k), lines);
        }
    } else if (const auto* array = node.as_array()) {
        out = Json::array();
        std::size_t i = 0;
        for (auto&& value : *array) {
            Json element;
            toml_to_json(value, element, path + "[" + std::to_string(i++) + "]", lines);
            out.push_back(std::move(element));
        }
    } else if (node.is_integer()) {
        out = node.value<std::int64_t>().value();
    } else if (node.is_floating_point()) {
        out = node.value<double>().value();
    } else if (node.is_boolean()) {
        out = node.value<bool>().value();
    } else if (node.is_string()) {
        out = node.value<std::string>().value();
    } else {
        throw ConfigError(path + " (line " + std::to_string(node.source().begin.line) +
                          "): dates and times are not supported");
    }
}

const char* type_name(const Json& j) {
    switch (j.type()) {
        case Json::value_t::object: return "table";
        case Json::value_t::array: return "array";
        case Json::value_t::string: return "string";
        case Json::value_t::boolean: return "boolean";
        case Json::value_t::null: return "null";
        default: return "number";
    }
}

}  // namespace

std::shared_ptr<Document> load_document(const std::filesystem::path& path, bool json) {
    auto doc = std::make_shared<Document>();
    doc->origin = path;
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ConfigError("cannot read config file " + path.string());
    std::stringstream buffer;
    buffer << is.rdbuf();
    const std::string text = buffer.str();
    if (json) {
        try {
            doc->root = Json::parse(text);
        } catch (const Json::parse_error& e) {
            throw ConfigError(path.string() + ": invalid JSON: " + e.what());
        }
        if (!doc->root.is_object()) throw ConfigError(path.string() + ": top level must be an object");
        return doc;
    }
    try {
        const toml::table table = toml::parse(text, path.string());
        toml_to_json(table, doc->root, "", doc->lines);
    } catch (const toml::parse_error& e) {
        std::ostringstream msg;
        msg << path.string() << ":" << e.source().begin.line << ": invalid TOML: " << e.description();
        throw ConfigError(msg.str());
    }
    return doc;
}

Section::Section(std::shared_ptr<const Document> doc, const Json* node, std::string path,
                 std::shared_ptr<Json> resolved)
    : doc_(std::move(doc)), node_(node), path_(std::move(path)), resolved_(std::move(resolved)) {
    Json& here = (*resolved_)[pointer("")];
    if (!here.is_object()) here = Json::object();
}

Section root_section(std::shared_ptr<const Document> doc, std::shared_ptr<Json> resolved) {
    const Json* root = &doc->root;
    if (!resolved->is_object()) *resolved = Json::object();
    return Section(std::move(doc), root, "", std::move(resolved));
}

Json::json_pointer Section::pointer(const std::string& key) const {
    Json::json_pointer p;
    std::string part;
    std::stringstream ss(path_);
    while (!path_.empty() && std::getline(ss, part, '.')) p /= part;
    if (!key.empty()) p /= key;
    return p;
}

void Section::record(const std::string& key, const Json& value) const {
    (*resolved_)[pointer(key)] = value;
}

const Json* Section::find(const std::string& key) const {
    if (!node_->is_object()) return nullptr;
    const auto it = node_->find(key);
    return it == node_->end() ? nullptr : &*it;
}

bool Section::has(const std::string& key) const { return find(key) != nullptr; }

std::string Section::where(const std::string& key) const {
    const std::string full = join(path_, key);
    const auto it = doc_->lines.find(full);
    if (it == doc_->lines.end()) return full;
    return full + " (line " + std::to_string(it->second) + ")";
}

std::string Section::where_section() const {
    if (path_.empty()) return doc_->origin.filename().string();
    const auto it = doc_->lines.find(path_);
    if (it == doc_->lines.end()) return "[" + path_ + "]";
    return "[" + path_ + "] (line " + std::to_string(it->second) + ")";
}

void Section::fail(const std::string& key, const std::string& message) const {
    throw ConfigError(where(key) + ": " + message);
}

double Section::number(const std::string& key) const {
    const Json* v = find(key);
    if (!v) fail(key, "required number is missing");
    if (!v->is_number()) fail(key, std::string("expected a number, got ") + type_name(*v));
    const double x = v->get<double>();
    if (!std::isfinite(x)) fail(key, "must be finite");
    record(key, x);
    return x;
}

double Section::number(const std::string& key, double fallback) const {
    if (!has(key)) {
        record(key, fallback);
        return fallback;
    }
    return number(key);
}

std::optional<double> Section::optional_number(const std::string& key) const {
    if (!has(key)) return std::nullopt;
    return number(key);
}

std::size_t Section::count(const std::string& key) const {
    const Json* v = find(key);
    if (!v) fail(key, "required integer is missing");
    if (!v->is_number()) fail(key, std::string("expected a nonnegative integer, got ") + type_name(*v));
    const double x = v->get<double>();
    if (!(x >= 0.0) || std::floor(x) != x || x > 9.0e15) fail(key, "expected a nonnegative integer");
    const auto n = static_cast<std::size_t>(x);
    record(key, n);
    return n;
}

std::size_t Section::count(const std::string& key, std::size_t fallback) const {
    if (!has(key)) {
        record(key, fallback);
        return fallback;
    }
    return count(key);
}

std::optional<std::size_t> Section::optional_count(const std::string& key) const {
    if (!has(key)) return std::nullopt;
    return count(key);
}

std::uint64_t Section::u64(const std::string& key, std::uint64_t fallback) const {
    const Json* v = find(key);
    if (!v) {
        record(key, fallback);
        return fallback;
    }
    if (v->is_number_unsigned() || (v->is_number_integer() && v->get<std::int64_t>() >= 0)) {
        const auto n = v->get<std::uint64_t>();
        record(key, n);
        return n;
    }
    fail(key, "expected a nonnegative integer");
}

std::string Section::string(const std::string& key) const {
    const Json* v = find(key);
    if (!v) fail(key, "required string is missing");
    if (!v->is_string()) fail(key, std::string("expected a string, got ") + type_name(*v));
    const auto s = v->get<std::string>();
    record(key, s);
    return s;
}

std::string Section::string(const std::string& key, const std::string& fallback) const {
    if (!has(key)) {
        record(key, fallback);
        return fallback;
    }
    return string(key);
}

bool Section::boolean(const std::string& key, bool fallback) const {
    const Json* v = find(key);
    if (!v) {
        record(key, fallback);
        return fallback;
    }
    if (!v->is_boolean()) fail(key, std::string("expected a boolean, got ") + type_name(*v));
    const bool b = v->get<bool>();
    record(key, b);
    return b;
}

std::vector<double> Section::numbers(const std::string& key) const {
    const Json* v = find(key);
    if (!v) fail(key, "required array of numbers is missing");
    std::vector<double> out;
    if (v->is_number()) {
        out.push_back(v->get<double>());
    } else if (v->is_array()) {
        for (const auto& e : *v) {
            if (!e.is_number()) fail(key, "expected an array of numbers");
            out.push_back(e.get<double>());
        }
    } else {
        fail(key, std::string("expected an array of numbers, got ") + type_name(*v));
    }
    for (double x : out) {
        if (!std::isfinite(x)) fail(key, "values must be finite");
    }
    record(key, out);
    return out;
}

std::vector<double> Section::numbers(const std::string& key, const std::vector<double>& fallback) const {
    if (!has(key)) {
        record(key, fallback);
        return fallback;
    }
    return numbers(key);
}

std::vector<std::vector<double>> Section::rows(const std::string& key) const {
    const Json* v = find(key);
    if (!v) fail(key, "required array is missing");
    if (!v->is_array()) fail(key, std::string("expected an array, got ") + type_name(*v));
    std::vector<std::vector<double>> out;
    for (const auto& e : *v) {
        std::vector<double> row;
        if (e.is_number()) {
            row.push_back(e.get<double>());
        } else if (e.is_array()) {
            for (const auto& x : e) {
                if (!x.is_number()) fail(key, "expected numbers inside each row");
                row.push_back(x.get<double>());
            }
        } else {
            fail(key, "expected an array of numbers or of number arrays");
        }
        for (double x : row) {
            if (!std::isfinite(x)) fail(key, "values must be finite");
        }
        out.push_back(std::move(row));
    }
    record(key, out);
    return out;
}

Section Section::sub(const std::string& key) const {
    const Json* v = find(key);
    if (!v) throw ConfigError("missing table [" + join(path_, key) + "]");
    if (!v->is_object()) fail(key, std::string("expected a table, got ") + type_name(*v));
    return Section(doc_, v, join(path_, key), resolved_);
}

std::optional<Section> Section::optional_sub(const std::string& key) const {
    if (!has(key)) return std::nullopt;
    return sub(key);
}

numkit::Axis Section::axis(const std::string& prefix, double lo, double hi, std::size_t count) const {
    const double a = number(prefix + "_min", lo);
    const double b = number(prefix + "_max", hi);
    const std::size_t n = this->count(prefix + "_count", count);
    if (!(a < b)) fail(prefix + "_max", "must exceed " + prefix + "_min");
    if (n < 2) fail(prefix + "_count", "must be at least 2");
    return numkit::Axis(a, b, n);
}

}  // namespace dilatox::cli
