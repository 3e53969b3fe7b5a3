// Runs the preset behind each acceptance criterion and prints one verdict
// line per criterion.  Exit status 0 only when every criterion passes.
#include <array>
#include <chrono>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <string>
#include <string_view>

#include "CLI11.hpp"
#include "subdiff/experiment.hpp"

namespace {

struct Criterion {
    int number;
    std::string_view preset;
    std::string_view summary;
};

constexpr std::array<Criterion, 16> kCriteria{{
    {1, "ml-envelope", "Mittag-Leffler envelope, zero violations, under 1 s"},
    {2, "volterra-ml-oracle", "Volterra solver vs E_a(-mu t^a): error <= 1e-4, ratio >= 1.8"},
    {3, "smu-bounds", "relaxation sandwich for the four built-in pairs"},
    {4, "frac-l2-decay", "L2 slopes -0.125, -0.25, -0.375, -0.5 for d = 1, 2, 3, 5"},
    {5, "critical-dimension-weak-l2", "weak L2 slope -0.5 at d = 4"},
    {6, "z-lp-norms", "|Z|_1.2 slope in d = 3; |Z|_2 divergent in d = 4"},
    {7, "z-weak-lp", "|Z|_{3,inf} slope -alpha for alpha = 0.3, 0.7"},
    {8, "gradient-l2-decay", "gradient L2 slopes -0.375 (d = 1), -0.5 (d = 3)"},
    {9, "mass-and-msd", "unit mass of Z and MSD 2d(1*l)(t)"},
    {10, "lower-bound", "stable positive infimum of |u|_2 / k^min(1,d/4)"},
    {11, "ultraslow-log-band", "|u|_2 (log t)^min(1,d/4) in a band of ratio <= 4"},
    {12, "switched-pair-upgrade", "switched pair slopes -0.5 (d = 2), -1 (d = 5)"},
    {13, "fractional-sum-decay", "two-term pair follows the lower order, d = 2"},
    {14, "energy-ode-decay", "nonlinear relaxation ODE rates and stable sandwich constants"},
    {15, "property-suites", "identity, L2 inequality, monotonicity and multiplier suites"},
    {16, "large-time-profile", "t^(...)|u - M Z|_p decreasing with slope <= -alpha/2 + 0.07"},
}};

}  // namespace

int main(int argc, char** argv) {
    namespace fs = std::filesystem;
    CLI::App app{"Acceptance criteria"};
    std::string presets = SUBDIFF_PRESET_DIR;
    std::string out = "acceptance-artifacts";
    int only = 0;
    app.add_option("--presets", presets, "Preset directory");
    app.add_option("--out", out, "Artifact directory (one subdirectory per preset)");
    app.add_option("--criterion", only, "Run a single criterion by number")->check(CLI::Range(1, 16));
    CLI11_PARSE(app, argc, argv);

    int failures = 0;
    std::size_t ran = 0;
    for (const Criterion& c : kCriteria) {
        if (only != 0 && c.number != only) continue;
        ++ran;
        const std::string name(c.preset);
        const auto start = std::chrono::steady_clock::now();
        std::string verdict = "FAIL";
        std::string detail;
        try {
            const subdiff::Experiment e = subdiff::Experiment::load(fs::path(presets) / (name + ".json"));
            const subdiff::ExperimentResult result = e.run();
            subdiff::write_artifacts(result, fs::path(out) / name);
            std::size_t gating = 0;
            for (const subdiff::Claim& claim : result.claims) gating += claim.gating ? 1 : 0;
            if (result.passed()) verdict = "PASS";
            detail = std::to_string(gating - result.failed_claims()) + "/" + std::to_string(gating) + " claims";
            for (const subdiff::Claim& claim : result.claims) {
                if (claim.gating && !claim.passed) detail += "; failed " + claim.name + " (" + claim.detail + ")";
            }
        } catch (const std::exception& ex) {
            detail = std::string("error: ") + ex.what();
        }
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (verdict != "PASS") ++failures;
        std::printf("%s  criterion %2d  %-27s %s [%s, %.1f s]\n", verdict.c_str(), c.number, name.c_str(),
                    std::string(c.summary).c_str(), detail.c_str(), seconds);
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria failed\n", failures, ran);
    return failures == 0 ? 0 : 1;
}
