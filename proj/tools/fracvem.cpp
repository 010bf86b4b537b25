#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "fracvem/errors.hpp"
#include "fracvem/pipeline.hpp"

#ifndef FRACVEM_PRESET_DIR
#define FRACVEM_PRESET_DIR "presets"
#endif

namespace {

int run(const std::string &config, fracvem::Stage stage, const std::string &out, int threads, bool strict,
        bool echo) {
    std::vector<std::string> warnings;
    const fracvem::RunConfig cfg = fracvem::parse_config(config, strict, &warnings);
    for (const auto &w : warnings) std::cerr << "warning: " << w << '\n';
    if (echo) std::cerr << fracvem::echo_config(cfg) << '\n';
    fracvem::PipelineOptions opts;
    opts.stage = stage;
    opts.output_dir = out;
    opts.threads = threads;
    const fracvem::Report r = fracvem::run_pipeline(cfg, opts);
    std::cout << r.str();
    return 0;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"Mixed virtual element Darcy solver for fractured porous media"};
    app.require_subcommand(1);

    std::string config;
    std::string out = ".";
    int threads = 0;
    bool strict = false;
    bool echo = false;
    std::string preset_dir = FRACVEM_PRESET_DIR;

    auto common = [&](CLI::App *sub, bool needs_config) {
        if (needs_config) sub->add_option("--config", config, "run configuration (JSON)")->required()->check(CLI::ExistingFile);
        sub->add_option("--output-dir", out, "directory for reports and exports");
        sub->add_option("--threads", threads, "OpenMP threads (0: runtime default)")->check(CLI::NonNegativeNumber);
        sub->add_flag("--strict", strict, "reject unknown configuration keys");
        sub->add_flag("--echo", echo, "print the configuration with defaults to stderr");
    };
    CLI::App *mesh = app.add_subcommand("mesh", "generate the grid and report its quality");
    CLI::App *coarsen = app.add_subcommand("coarsen", "generate and agglomerate the grid");
    CLI::App *solve = app.add_subcommand("solve", "solve and report errors");
    CLI::App *report = app.add_subcommand("report", "solve and add matrix statistics and timings");
    CLI::App *preset = app.add_subcommand("preset", "run a bundled experiment (report stage)");
    for (CLI::App *s : {mesh, coarsen, solve, report}) common(s, true);
    common(preset, false);
    std::string preset_name;
    preset->add_option("name", preset_name, "preset name, e.g. benchmark3_cut")->required();
    preset->add_option("--preset-dir", preset_dir, "directory holding the preset files");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*mesh) return run(config, fracvem::Stage::mesh, out, threads, strict, echo);
        if (*coarsen) return run(config, fracvem::Stage::coarsen, out, threads, strict, echo);
        if (*solve) return run(config, fracvem::Stage::solve, out, threads, strict, echo);
        if (*report) return run(config, fracvem::Stage::report, out, threads, strict, echo);
        const std::string path = (std::filesystem::path(preset_dir) / (preset_name + ".json")).string();
        if (!std::filesystem::exists(path)) throw fracvem::ConfigError("unknown preset " + preset_name + " (" + path + ")");
        return run(path, fracvem::Stage::report, out, threads, strict, echo);
    } catch (const fracvem::ConfigError &e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const fracvem::ParseError &e) {
        std::cerr << "input error: " << e.what() << '\n';
        return 2;
    } catch (const fracvem::NumericError &e) {
        std::cerr << "numeric failure: " << e.what() << '\n';
        return 3;
    } catch (const fracvem::MeshError &e) {
        std::cerr << "mesh error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
