#include <cstdlib>
#include <exception>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cli/commands.hpp"
#include "dilatox/cli.hpp"
#include "dilatox/numkit/parallel.hpp"

namespace dilatox::cli {
namespace {

struct Flags {
    std::string config;
    std::string out = ".";
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> threads;
    bool unchecked = false;
    bool json = false;
};

void add_flags(CLI::App& sub, Flags& flags) {
    sub.add_option("--config", flags.config, "Config file (TOML, or JSON with --json)")->required();
    sub.add_option("--out", flags.out, "Output directory");
    sub.add_option("--seed", flags.seed, "Master seed, overriding the config");
    sub.add_option("--threads", flags.threads, "Worker thread cap")->check(CLI::PositiveNumber);
    sub.add_flag("--unchecked", flags.unchecked, "Accept weights violating sum psi = L");
    sub.add_flag("--json", flags.json, "Read the config as JSON");
}

unsigned threads_from_env() {
    const char* env = std::getenv("DILATOX_THREADS");
    if (env == nullptr || *env == '\0') return 0;
    char* end = nullptr;
    const unsigned long v = std::strtoul(env, &end, 10);
    if (*end != '\0' || v == 0 || v > 4096) {
        throw ConfigError(std::string("DILATOX_THREADS must be a positive integer, got '") + env + "'");
    }
    return static_cast<unsigned>(v);
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"dilatox: stationary laws of dissipative stochastic maps and multifractal integrals"};
    app.set_version_flag("--version", std::string("dilatox ") + DILATOX_VERSION);
    app.require_subcommand(1, 1);
    Flags flags;
    const std::vector<std::pair<const char*, const char*>> commands = {
        {"stationary", "Characteristic function and density of a solved linear model"},
        {"mfi", "Multifractal integral over a weighted Cantor-type measure"},
        {"ikeda", "Random-phase density of the Ikeda map"},
        {"simulate", "Monte Carlo ensemble of a stochastic map"},
        {"compare", "Metrics between an analytic config and a simulation config"},
    };
    for (const auto& [name, help] : commands) add_flags(*app.add_subcommand(name, help), flags);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForVersion&) {
        out << app.version() << "\n";
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kConfigError;
    }
    const std::string command = app.get_subcommands().front()->get_name();

    try {
        const unsigned threads = flags.threads ? *flags.threads : threads_from_env();
        if (threads > 0) numkit::set_thread_cap(threads);
        auto resolved = std::make_shared<Json>(Json::object());
        const auto doc = load_document(flags.config, flags.json);
        const Section root = root_section(doc, resolved);
        const Context ctx{flags.out, flags.seed, flags.unchecked, out, resolved};
        return dispatch(command, root, ctx);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return kConfigError;
    } catch (const PolicyError& e) {
        err << "refused: " << e.what() << "\n";
        return kPolicyRefusal;
    } catch (const DomainError& e) {
        err << "config error: " << e.what() << "\n";
        return kConfigError;
    } catch (const NumericalError& e) {
        err << "numerical failure: " << e.what() << "\n";
        return kNumericalFailure;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << "\n";
        return kInternal;
    }
}

}  // namespace dilatox::cli
