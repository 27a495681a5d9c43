// Command-line front end: gpwave <mode> --config <path> [--set section.key=value ...]
//                                [--workers N]
//
// Exit codes: 0 success, 2 configuration error, 3 numerical failure.

#include <cstdlib>
#include <cstring>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "gpwave/gpwave.hpp"

namespace {

int usage(std::ostream& os) {
    os << "usage: gpwave <mode> --config <path> [--set section.key=value ...]"
          " [--workers N]\n"
          "\n"
          "modes:\n"
          "  variational  integrate the reduced packet ODEs; write q/p/sigma series\n"
          "               and pathline trajectories\n"
          "  spectral     evolve the full field with the split-step propagator;\n"
          "               write observables and boundary snapshots\n"
          "  compare      run both solvers and tabulate center/width errors\n"
          "  residuals    evaluate hydrodynamic residuals along a field evolution\n"
          "  converge     run the dt/dx self-convergence ladders\n"
          "  sweep        repeat a mode across values of one config key\n"
          "\n"
          "The GPWAVE_OUT environment variable overrides [run].out_dir; --set\n"
          "overrides beat both. Exit codes: 0 ok, 2 config error, 3 numerical\n"
          "failure (diagnostics in <out_dir>/failure.txt).\n";
    return 2;
}

}  // namespace

int main(int argc, char** argv) {
    using namespace gpwave::harness;

    std::vector<std::string> args(argv + 1, argv + argc);
    if (args.empty()) return usage(std::cerr);
    if (args[0] == "--help" || args[0] == "-h") {
        usage(std::cout);
        return 0;
    }

    const std::string mode_name = args[0];
    if (!parse_mode(mode_name)) {
        std::cerr << "gpwave: unknown mode '" << mode_name << "'\n";
        return usage(std::cerr);
    }

    std::string config_path;
    std::vector<std::string> overrides;
    int workers = int(std::max(1u, std::thread::hardware_concurrency()));
    for (std::size_t i = 1; i < args.size(); ++i) {
        const std::string& a = args[i];
        auto next_value = [&](const char* flag) -> const std::string& {
            if (i + 1 >= args.size()) {
                std::cerr << "gpwave: " << flag << " needs a value\n";
                std::exit(2);
            }
            return args[++i];
        };
        if (a == "--config") {
            config_path = next_value("--config");
        } else if (a == "--set") {
            overrides.push_back(next_value("--set"));
        } else if (a == "--workers") {
            const std::string& v = next_value("--workers");
            char* end = nullptr;
            const long w = std::strtol(v.c_str(), &end, 10);
            if (end == v.c_str() || *end != '\0' || w < 1) {
                std::cerr << "gpwave: --workers needs a positive integer\n";
                return 2;
            }
            workers = int(w);
        } else if (a == "--help" || a == "-h") {
            usage(std::cout);
            return 0;
        } else {
            std::cerr << "gpwave: unknown argument '" << a << "'\n";
            return usage(std::cerr);
        }
    }
    if (config_path.empty()) {
        std::cerr << "gpwave: --config is required\n";
        return usage(std::cerr);
    }

    // the positional mode is authoritative, so it lands after user overrides
    overrides.push_back("run.mode=" + mode_name);

    std::optional<std::string> env_out;
    if (const char* env = std::getenv("GPWAVE_OUT"); env && *env) env_out = env;

    try {
        RunConfig cfg = load_config(config_path, overrides, env_out);
        cfg.workers = workers;
        return gpwave::harness::run(cfg);
    } catch (const ConfigError& e) {
        std::cerr << "gpwave: " << e.what() << '\n';
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "gpwave: " << e.what() << '\n';
        return 2;
    } catch (const gpwave::NumericalFailure& e) {
        std::cerr << "gpwave: numerical failure at t = " << e.t << ": " << e.what()
                  << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "gpwave: " << e.what() << '\n';
        return 1;
    }
}
