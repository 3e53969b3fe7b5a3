// Command-line front end; talks to the toolkit only through the C interface.
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <string>

#include "CLI11.hpp"
#include "subdiff/subdiff.h"

namespace {

constexpr int exit_pass = 0;
constexpr int exit_claim_failure = 1;
constexpr int exit_usage = 2;

#ifndef SUBDIFF_PRESET_DIR
#define SUBDIFF_PRESET_DIR "presets"
#endif

std::string preset_dir(const std::string& option) {
    if (!option.empty()) return option;
    if (const char* env = std::getenv("SUBDIFF_PRESETS")) return env;
    return SUBDIFF_PRESET_DIR;
}

// Configuration and I/O problems are usage errors; anything a module raises
// while running means the claims could not be established.
int report_error(subdiff_status status) {
    std::fprintf(stderr, "error (%s): %s\n", subdiff_status_name(status), subdiff_last_error());
    return status == SUBDIFF_E_CONFIG || status == SUBDIFF_E_IO || status == SUBDIFF_E_NULL_ARGUMENT
               ? exit_usage
               : exit_claim_failure;
}

struct Handle {
    subdiff_experiment* ptr = nullptr;
    Handle() = default;
    Handle(const Handle&) = delete;
    Handle& operator=(const Handle&) = delete;
    ~Handle() { subdiff_experiment_free(ptr); }
};

struct Text {
    subdiff_text* ptr = nullptr;
    Text() = default;
    Text(const Text&) = delete;
    Text& operator=(const Text&) = delete;
    ~Text() { subdiff_text_free(ptr); }
};

int run_command(std::string config, const std::string& out, int threads, double tol_scale, const std::string& presets) {
    // A bare preset name resolves to presets/<name>.json.
    if (!std::filesystem::exists(config)) {
        const std::filesystem::path candidate = std::filesystem::path(preset_dir(presets)) / (config + ".json");
        if (std::filesystem::exists(candidate)) config = candidate.string();
    }
    Handle e;
    if (subdiff_status s = subdiff_experiment_load(config.c_str(), &e.ptr); s != SUBDIFF_OK) return report_error(s);
    if (subdiff_status s = subdiff_experiment_set_threads(e.ptr, threads); s != SUBDIFF_OK) return report_error(s);
    if (subdiff_status s = subdiff_experiment_set_tolerance_scale(e.ptr, tol_scale); s != SUBDIFF_OK) {
        return report_error(s);
    }
    std::string dir = out;
    if (dir.empty()) dir = subdiff_experiment_output(e.ptr);
    if (dir.empty()) dir = (std::filesystem::path("out") / subdiff_experiment_name(e.ptr)).string();

    size_t failed = 0;
    if (subdiff_status s = subdiff_experiment_run(e.ptr, dir.c_str(), &failed); s != SUBDIFF_OK) return report_error(s);

    const size_t count = subdiff_experiment_claim_count(e.ptr);
    for (size_t i = 0; i < count; ++i) {
        subdiff_claim c{};
        subdiff_experiment_claim(e.ptr, i, &c);
        const char* verdict = !c.gating ? "INFO" : c.passed ? "PASS" : "FAIL";
        std::printf("%s  %s: measured %.17g, target %.17g, tolerance %.17g\n", verdict, c.name, c.measured, c.target,
                    c.tolerance);
    }
    std::printf("%s: %zu of %zu claims failed; artifacts in %s\n", subdiff_experiment_name(e.ptr), failed, count,
                dir.c_str());
    return failed == 0 ? exit_pass : exit_claim_failure;
}

int report_command(const std::string& dir) {
    Text text;
    int passed = 0;
    if (subdiff_status s = subdiff_report(dir.c_str(), &text.ptr, &passed); s != SUBDIFF_OK) return report_error(s);
    std::fputs(subdiff_text_data(text.ptr), stdout);
    return passed ? exit_pass : exit_claim_failure;
}

int presets_command(const std::string& dir) {
    Text text;
    if (subdiff_status s = subdiff_presets_list(preset_dir(dir).c_str(), &text.ptr); s != SUBDIFF_OK) {
        return report_error(s);
    }
    std::fputs(subdiff_text_data(text.ptr), stdout);
    return exit_pass;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Decay experiments for non-local-in-time subdiffusion"};
    app.require_subcommand(1);

    std::string config, out, report_dir, presets;
    int threads = 0;
    double tol_scale = 1.0;

    CLI::App* run = app.add_subcommand("run", "Run an experiment config (or a preset by name)");
    run->add_option("config", config, "Path to a JSON config, or a preset name")->required();
    run->add_option("--out", out, "Output directory for series.csv, fit.json and report.json");
    run->add_option("--threads", threads, "Worker threads (0: library default)")->check(CLI::NonNegativeNumber);
    run->add_option("--tol-scale", tol_scale, "Multiply every configured tolerance by this factor")
        ->check(CLI::PositiveNumber);
    run->add_option("--presets", presets, "Preset directory used to resolve bare names");

    CLI::App* report = app.add_subcommand("report", "Summarize the artifacts of a finished run");
    report->add_option("dir", report_dir, "Artifact directory")->required();

    CLI::App* preset_cmd = app.add_subcommand("presets", "Preset configurations");
    CLI::App* list = preset_cmd->add_subcommand("list", "List the shipped presets");
    list->add_option("--dir", presets, "Preset directory");
    preset_cmd->require_subcommand(1);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_pass : exit_usage;
    }

    if (*run) return run_command(config, out, threads, tol_scale, presets);
    if (*report) return report_command(report_dir);
    return presets_command(presets);
}
