#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "subdiff/decay.hpp"

namespace subdiff {

// One verdict of an experiment.  `comparison` says how measured is judged:
//   within:   |measured - target| <= tolerance
//   at-most:  measured <= target + tolerance
//   at-least: measured >= target - tolerance
// Measured values that are not reproducible (wall-clock time) are stored as
// NaN here and written to timing.json instead.
struct Claim {
    std::string name;
    double target = 0.0;
    double measured = 0.0;
    double tolerance = 0.0;
    std::string comparison = "within";
    bool passed = false;
    bool gating = true;  // non-gating claims are diagnostics
    std::string detail;
};

struct Series {
    std::string name;
    std::vector<double> t;
    std::vector<double> values;
};

struct FitRecord {
    std::string series;
    DecayFit fit;
    DecayFit tail_fit;  // last decade of the window; points == 0 when too short
    double target = 0.0;
    double tolerance = 0.0;
    bool power_law = true;
    bool passed = false;
};

struct Timing {
    std::string what;
    double seconds = 0.0;
};

struct ExperimentResult {
    std::string name;
    std::string kind;
    std::vector<Claim> claims;
    std::vector<Series> series;
    std::vector<FitRecord> fits;
    std::vector<Timing> timings;

    [[nodiscard]] bool passed() const;
    [[nodiscard]] std::size_t failed_claims() const;
};

struct RunOptions {
    int threads = 0;               // 0: keep the library default
    double tolerance_scale = 1.0;  // multiplies every configured "tolerance"
};

// A validated experiment configuration.  Parsing is strict: unknown fields,
// missing required fields and out-of-range values are config errors that
// name the offending field (or line and column for malformed JSON).
class Experiment {
public:
    static Experiment load(const std::filesystem::path& path);
    static Experiment parse(const std::string& text, const std::string& source = "<config>");

    Experiment(Experiment&&) noexcept;
    Experiment& operator=(Experiment&&) noexcept;
    ~Experiment();

    [[nodiscard]] const std::string& name() const;
    [[nodiscard]] const std::string& kind() const;
    [[nodiscard]] const std::string& description() const;
    // Output directory named in the config, or empty.
    [[nodiscard]] const std::string& output() const;

    [[nodiscard]] ExperimentResult run(const RunOptions& options = {}) const;

    struct Plan;

private:
    explicit Experiment(std::unique_ptr<Plan> plan);
    std::unique_ptr<Plan> plan_;
};

// series.csv ("series,t,norm"), fit.json, report.json and timing.json.  All
// numbers carry 17 significant digits; everything except timing.json is a
// deterministic function of the configuration.
void write_artifacts(const ExperimentResult& result, const std::filesystem::path& dir);

// Summary table of a finished run plus gnuplot-ready two-column files
// (plot/<series>.dat).  Missing artifacts are an io error naming them.
struct RenderedReport {
    std::string text;
    bool passed = false;
    std::vector<std::filesystem::path> plot_files;
};
RenderedReport emit_report(const std::filesystem::path& dir);

struct PresetInfo {
    std::string name;
    std::string kind;
    std::string description;
    std::filesystem::path path;
};
// Every *.json in `dir`, sorted by file name; each one is validated.
std::vector<PresetInfo> list_presets(const std::filesystem::path& dir);

}  // namespace subdiff
