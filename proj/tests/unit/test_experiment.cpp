#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "subdiff/errors.hpp"
#include "subdiff/experiment.hpp"

using namespace subdiff;
namespace fs = std::filesystem;

namespace {

const char* kSmall = R"({
  "name": "small",
  "kind": "decay-sweep",
  "pair": {"type": "fractional", "alpha": 0.5},
  "datum": {"type": "gaussian", "sigma": 1.0},
  "times": {"lo": 1.0, "hi": 10000.0, "count": 9},
  "checks": [
    {"check": "lower-bound", "name": "lower-d2", "dimension": 2},
    {"check": "slope", "name": "slope-d5", "dimension": 5, "path": "radial", "tolerance": 0.05}
  ]
})";

// Config error message for `text`, or "" when it parses.
std::string config_error(const std::string& text) {
    try {
        (void)Experiment::parse(text, "cfg");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::config);
        return e.what();
    }
    return "";
}

std::string with(const std::string& from, const std::string& to) {
    std::string s = kSmall;
    const auto at = s.find(from);
    REQUIRE(at != std::string::npos);
    return s.replace(at, from.size(), to);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch(const std::string& leaf) {
    const fs::path dir = fs::temp_directory_path() / ("subdiff-unit-" + leaf);
    fs::remove_all(dir);
    return dir;
}

}  // namespace

TEST_CASE("a valid config parses") {
    const Experiment e = Experiment::parse(kSmall);
    CHECK(e.name() == "small");
    CHECK(e.kind() == "decay-sweep");
    CHECK(e.output().empty());
}

TEST_CASE("strict configs name the offending field") {
    CHECK(config_error(with(R"("name": "small",)", R"("name": "small", "colour": 1,)")).find("colour") !=
          std::string::npos);
    CHECK(config_error(with(R"("alpha": 0.5)", R"("alpha": 0.5, "beta": 1)")).find("pair.beta") != std::string::npos);
    CHECK(config_error(with(R"("dimension": 2})", R"("dimension": 2, "dimesion": 3})")).find("checks[0].dimesion") !=
          std::string::npos);
    CHECK(config_error(with(R"("kind": "decay-sweep",)", "")).find("kind") != std::string::npos);
    CHECK(config_error(with(R"("alpha": 0.5)", R"("alpha": "half")")).find("alpha") != std::string::npos);
    CHECK(config_error(with(R"("alpha": 0.5)", R"("alpha": 1.5)")).find("alpha") != std::string::npos);
    CHECK(config_error(with(R"("check": "lower-bound")", R"("check": "ode-decay")")).find("ode-decay") !=
          std::string::npos);
    CHECK(config_error(with(R"("name": "slope-d5")", R"("name": "lower-d2")")).find("lower-d2") != std::string::npos);
    CHECK(config_error(with(R"("checks":)", R"("chekcs":)")).find("found \"chekcs\"") != std::string::npos);
    CHECK_FALSE(config_error("{}").empty());
    CHECK_FALSE(config_error("").empty());
}

TEST_CASE("malformed JSON reports line and column") {
    const std::string msg = config_error("{\n  \"name\": \"x\",\n  \"kind\": }");
    CHECK(msg.find("cfg:3:") != std::string::npos);
}

TEST_CASE("runs are deterministic and reports read them back") {
    const Experiment e = Experiment::parse(kSmall);
    const ExperimentResult a = e.run();
    const ExperimentResult b = e.run({.threads = 1});
    CHECK(a.passed());
    const fs::path da = scratch("a"), db = scratch("b");
    write_artifacts(a, da);
    write_artifacts(b, db);
    for (const char* f : {"series.csv", "fit.json", "report.json"}) {
        CHECK(fs::exists(da / f));
        CHECK(slurp(da / f) == slurp(db / f));
    }
    CHECK(slurp(da / "series.csv").rfind("series,t,norm\n", 0) == 0);

    const RenderedReport r = emit_report(da);
    CHECK(r.passed);
    CHECK(r.text.find("lower-d2") != std::string::npos);
    CHECK_FALSE(r.plot_files.empty());
    fs::remove_all(da);
    fs::remove_all(db);
}

TEST_CASE("tolerance scale multiplies configured tolerances") {
    const Experiment e = Experiment::parse(kSmall);
    const auto tolerance_of = [](const ExperimentResult& r, const std::string& name) {
        for (const Claim& c : r.claims) {
            if (c.name.find(name) != std::string::npos && c.tolerance > 0.0) return c.tolerance;
        }
        return -1.0;
    };
    const double base = tolerance_of(e.run(), "slope-d5");
    REQUIRE(base > 0.0);
    CHECK(tolerance_of(e.run({.threads = 0, .tolerance_scale = 2.0}), "slope-d5") == doctest::Approx(2.0 * base));
}

TEST_CASE("reports require the artifacts") {
    try {
        (void)emit_report(scratch("missing"));
        FAIL("expected an io error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::io);
        CHECK(std::string(e.what()).find("report.json") != std::string::npos);
    }
}

TEST_CASE("shipped presets all validate") {
    const auto presets = list_presets(SUBDIFF_PRESET_DIR);
    CHECK(presets.size() >= 16);
    for (const PresetInfo& p : presets) {
        CHECK(p.path.stem().string() == p.name);
        CHECK_FALSE(p.description.empty());
    }
}
