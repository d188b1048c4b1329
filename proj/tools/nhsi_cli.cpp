#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "nhsi/runner.hpp"

#ifndef NHSI_PRESET_DIR
#define NHSI_PRESET_DIR "presets"
#endif

namespace {

std::filesystem::path preset_path(const std::string& name) {
    const char* env = std::getenv("NHSI_PRESET_DIR");
    std::filesystem::path dir = env && *env ? env : NHSI_PRESET_DIR;
    return dir / (name + ".json");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spectra, GBZ and self-intersection analysis of non-Hermitian chains"};
    app.set_version_flag("--version", NHSI_VERSION);

    std::string config, preset, out, task;
    unsigned threads = 0;
    std::vector<std::string> overrides;

    auto* cfg_opt = app.add_option("--config", config, "Run configuration JSON file")->check(CLI::ExistingFile);
    app.add_option("--preset", preset, "Named preset from the preset directory")->excludes(cfg_opt);
    app.add_option("--out", out, "Output prefix, or a directory when it ends with '/' (default: config output, else nhsi)");
    app.add_option("--threads", threads, "Worker threads (0 = hardware concurrency)");
    app.add_option("--tol-override", overrides, "Tolerance override KEY=VALUE (repeatable)");
    app.add_option("--task", task, "Replace the task named in the configuration");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : nhsi::kExitInvalid;
    }

    try {
        if (config.empty() == preset.empty()) throw nhsi::Error(nhsi::ErrorKind::ConfigInvalid, "give exactly one of --config or --preset");
        auto path = config.empty() ? preset_path(preset) : std::filesystem::path(config);
        if (!std::filesystem::exists(path))
            throw nhsi::Error(nhsi::ErrorKind::ConfigInvalid, "no configuration at '" + path.string() + "'");
        auto doc = nhsi::read_json_file(path.string());
        if (!task.empty()) doc["task"] = task;
        auto cfg = nhsi::parse_config(doc, overrides);
        nhsi::set_max_threads(threads);
        if (out.empty()) out = cfg.output.empty() ? "nhsi" : cfg.output;
        auto outcome = nhsi::run(cfg, out);
        if (outcome.exit_code != nhsi::kExitOk) {
            const auto& err = outcome.manifest["error"];
            std::cerr << "nhsi: " << err["kind"].get<std::string>() << ": " << err["detail"].get<std::string>() << '\n';
        }
        return outcome.exit_code;
    } catch (const nhsi::Error& e) {
        std::cerr << "nhsi: " << e.what() << '\n';
        return nhsi::is_validation_error(e.kind()) ? nhsi::kExitInvalid : nhsi::kExitNumerical;
    }
}
