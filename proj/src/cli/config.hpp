#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "dilatox/cli.hpp"
#include "dilatox/io.hpp"
#include "dilatox/numkit/grid.hpp"

namespace dilatox::cli {

using io::Json;

/// A parsed config document with the source line of every field.
struct Document {
    Json root;
    std::map<std::string, int> lines;  ///< dotted field path -> 1-based line (TOML only)
    std::filesystem::path origin;
};

/// TOML by default, JSON when `json` is set. Parse errors become ConfigError.
std::shared_ptr<Document> load_document(const std::filesystem::path& path, bool json);

/// Typed view of one table. Every value read (defaults included) is copied
/// into the resolved config at the same path.
class Section {
public:
    Section(std::shared_ptr<const Document> doc, const Json* node, std::string path,
            std::shared_ptr<Json> resolved);

    const std::string& path() const noexcept { return path_; }
    bool has(const std::string& key) const;

    double number(const std::string& key) const;
    double number(const std::string& key, double fallback) const;
    std::optional<double> optional_number(const std::string& key) const;
    std::size_t count(const std::string& key) const;
    std::size_t count(const std::string& key, std::size_t fallback) const;
    std::optional<std::size_t> optional_count(const std::string& key) const;
    std::uint64_t u64(const std::string& key, std::uint64_t fallback) const;
    std::string string(const std::string& key) const;
    std::string string(const std::string& key, const std::string& fallback) const;
    bool boolean(const std::string& key, bool fallback) const;
    std::vector<double> numbers(const std::string& key) const;
    std::vector<double> numbers(const std::string& key, const std::vector<double>& fallback) const;
    /// Array of arrays of numbers; bare numbers count as one-element rows.
    std::vector<std::vector<double>> rows(const std::string& key) const;

    Section sub(const std::string& key) const;
    std::optional<Section> optional_sub(const std::string& key) const;

    /// Uniform axis from `<prefix>_min`, `<prefix>_max`, `<prefix>_count`.
    numkit::Axis axis(const std::string& prefix, double lo, double hi, std::size_t count) const;

    /// Writes a value into the resolved config (used for overrides).
    void record(const std::string& key, const Json& value) const;

    [[noreturn]] void fail(const std::string& key, const std::string& message) const;
    /// "path.key (line N)" or "path.key".
    std::string where(const std::string& key) const;
    /// Re-throws module DomainErrors as ConfigError prefixed with this section.
    template <class Fn>
    auto checked(Fn&& fn) const -> decltype(fn()) {
        try {
            return fn();
        } catch (const ConfigError&) {
            throw;
        } catch (const DomainError& e) {
            throw ConfigError(where_section() + ": " + e.what());
        }
    }

    const std::filesystem::path& origin() const { return doc_->origin; }

private:
    const Json* find(const std::string& key) const;
    std::string where_section() const;
    Json::json_pointer pointer(const std::string& key) const;

    std::shared_ptr<const Document> doc_;
    const Json* node_;
    std::string path_;
    std::shared_ptr<Json> resolved_;
};

/// Root section of a document with a fresh resolved config.
Section root_section(std::shared_ptr<const Document> doc, std::shared_ptr<Json> resolved);

}  // namespace dilatox::cli
