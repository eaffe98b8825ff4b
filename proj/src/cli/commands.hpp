#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <ostream>
#include <string>

#include "cli/config.hpp"

namespace dilatox::cli {

struct Context {
    std::filesystem::path out_dir;
    std::optional<std::uint64_t> seed;
    bool unchecked = false;
    std::ostream& log;
    std::shared_ptr<Json> resolved;
};

/// Runs one subcommand against the root section of its config; returns the exit code.
int dispatch(const std::string& command, const Section& root, const Context& ctx);

}  // namespace dilatox::cli
