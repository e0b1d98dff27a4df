#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "app.hpp"
#include "demos.hpp"
#include "doctest.h"
#include "json.hpp"
#include "margin/error.hpp"

namespace fs = std::filesystem;
using namespace margin::cli;

namespace {

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

Outcome run(std::vector<std::string> args) {
    args.insert(args.begin(), "margin");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& tag) {
    static std::atomic<int> counter{0};
    const auto p = fs::temp_directory_path() /
                   ("margin_cli_test_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::remove_all(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

nlohmann::json manifest(const fs::path& dir) { return nlohmann::json::parse(slurp(dir / "manifest.json")); }

fs::path write_file(const std::string& tag, const std::string& content) {
    const auto dir = scratch(tag);
    fs::create_directories(dir);
    const auto p = dir / "counts.csv";
    std::ofstream(p) << content;
    return p;
}

}  // namespace

TEST_CASE("list prints every demo") {
    const auto r = run({"list"});
    CHECK(r.code == kExitOk);
    for (const auto& n : demo_names()) CHECK(r.out.find(n + "\n") != std::string::npos);
    CHECK(demo_names().size() == 14);
}

TEST_CASE("help exits cleanly") {
    CHECK(run({"--help"}).code == kExitOk);
    CHECK(run({"demo", "--help"}).code == kExitOk);
}

TEST_CASE("usage errors exit with 2") {
    const auto dir = scratch("usage");

    const auto unknown = run({"demo", "nope", "--out", dir.string()});
    CHECK(unknown.code == kExitUsage);
    CHECK(unknown.err.find("typical-set") != std::string::npos);
    CHECK_FALSE(fs::exists(dir));

    const auto key = run({"demo", "binomial", "--set", "bogus=1", "--out", dir.string()});
    CHECK(key.code == kExitUsage);
    CHECK(key.err.find("bogus") != std::string::npos);
    CHECK_FALSE(fs::exists(dir));

    CHECK(run({"demo", "binomial", "--format", "xml", "--out", dir.string()}).code == kExitUsage);
    CHECK(run({"demo", "binomial", "--set", "trials", "--out", dir.string()}).code == kExitUsage);
    CHECK(run({"demo", "binomial", "--set", "trials=abc", "--out", dir.string()}).code == kExitUsage);
    CHECK(run({}).code == kExitUsage);
    CHECK(run({"frobnicate"}).code == kExitUsage);
    CHECK_FALSE(fs::exists(dir));
}

TEST_CASE("domain errors exit with 2") {
    const auto dir = scratch("domain");
    const auto r = run({"demo", "flare", "--set", "gamma=-1", "--out", dir.string()});
    CHECK(r.code == kExitUsage);
    CHECK_FALSE(r.err.empty());
}

TEST_CASE("numeric failures exit with 3") {
    const auto dir = scratch("numeric");
    const auto r = run({"demo", "on-off", "--set", "sigma_on=1e-200", "--set", "sigma_off=1e-200", "--out", dir.string()});
    CHECK(r.code == kExitNumeric);
    CHECK(r.err.find("numeric error") != std::string::npos);
}

TEST_CASE("count files are validated") {
    const auto out = scratch("fit_out");
    const auto empty = write_file("empty", "");
    CHECK(run({"fit", "counts", empty.string(), "--out", out.string()}).code == kExitUsage);

    const auto bad = write_file("bad", "t,count\n0.5,3\n1.5,abc\n");
    const auto r = run({"fit", "counts", bad.string(), "--out", out.string()});
    CHECK(r.code == kExitUsage);
    CHECK(r.err.find("line 3") != std::string::npos);

    CHECK(run({"fit", "counts", (out / "missing.csv").string(), "--out", out.string()}).code == kExitUsage);
    CHECK(run({"fit", "counts", bad.string(), "--model", "spline", "--out", out.string()}).code == kExitUsage);
    CHECK_FALSE(fs::exists(out));
}

TEST_CASE("constant-rate fit writes a manifest") {
    std::string csv = "t,count\n";
    const long long counts[] = {4, 7, 5, 3, 6, 5, 8, 4, 5, 6, 2, 5};
    for (int i = 0; i < 12; ++i) csv += std::to_string(i + 0.5) + "," + std::to_string(counts[i]) + "\n";
    const auto file = write_file("good", csv);
    const auto out = scratch("fit_good");
    const auto r = run({"fit", "counts", file.string(), "--out", out.string(), "--grid-2d", "101",
                        "--set", "beta_nodes=41"});
    REQUIRE(r.code == kExitOk);
    const auto m = manifest(out);
    CHECK(m["demo"] == "fit-counts");
    const double mean = m["statistics"]["posterior_mean"]["lambda"].get<double>();
    CHECK(std::fabs(mean - 5.0) < 1.0);
}

TEST_CASE("binomial demo through the command line") {
    const auto dir = scratch("binomial");
    const auto r = run({"demo", "binomial", "--trials", "20", "--observed", "13", "--out", dir.string()});
    REQUIRE(r.code == kExitOk);
    const auto m = manifest(dir);
    CHECK(m["demo"] == "binomial");
    CHECK(m["version"] == "1.0.0");
    CHECK(std::fabs(m["statistics"]["peak_theta"].get<double>() - 0.65) < 1e-9);
    CHECK(std::fabs(m["statistics"]["predictive_success_probability"].get<double>() - 14.0 / 22.0) < 1e-6);
    CHECK(m["parameters"]["trials"] == 20);
}

TEST_CASE("typical-set ratio through the command line") {
    const auto dir = scratch("typical");
    REQUIRE(run({"demo", "typical-set", "--format", "json", "--out", dir.string()}).code == kExitOk);
    const auto m = manifest(dir);
    CHECK(std::fabs(m["statistics"]["log10_ratio"].get<double>() - 120.41199826559248) < 1e-9);
}

TEST_CASE("manifest lists exactly the files written") {
    for (const std::string format : {"csv", "json", "both"}) {
        const auto dir = scratch("files_" + format);
        REQUIRE(run({"demo", "common-mean", "--format", format, "--svg", "--grid-1d", "201", "--out", dir.string()})
                    .code == kExitOk);
        const auto m = manifest(dir);
        std::set<std::string> listed;
        for (const auto& o : m["outputs"]) {
            listed.insert(o["file"].get<std::string>());
            CHECK_FALSE(o["role"].get<std::string>().empty());
        }
        std::set<std::string> present;
        for (const auto& e : fs::directory_iterator(dir)) {
            const auto name = e.path().filename().string();
            if (name != "manifest.json") present.insert(name);
        }
        CHECK(listed == present);
        const bool any_csv = std::any_of(present.begin(), present.end(),
                                         [](const std::string& f) { return f.ends_with(".csv"); });
        CHECK(any_csv == (format != "json"));
        const bool any_svg = std::any_of(present.begin(), present.end(),
                                         [](const std::string& f) { return f.ends_with(".svg"); });
        CHECK(any_svg);
    }
}

TEST_CASE("same seed gives identical bytes, a new seed does not") {
    RunConfig cfg;
    cfg.command = "demo";
    cfg.name = "neyman-scott";
    cfg.format = OutputFormat::both;
    cfg.grid_1d = 201;
    cfg.grid_2d = 51;
    cfg.out_dir = scratch("det_a");
    run_demo(cfg);
    const auto first = cfg.out_dir;
    cfg.out_dir = scratch("det_b");
    run_demo(cfg);
    for (const auto& e : fs::directory_iterator(first)) {
        CHECK(slurp(e.path()) == slurp(cfg.out_dir / e.path().filename()));
    }
    cfg.seed += 1;
    cfg.out_dir = scratch("det_c");
    run_demo(cfg);
    CHECK(slurp(first / "manifest.json") != slurp(cfg.out_dir / "manifest.json"));
}

TEST_CASE("run_demo reports unknown names as usage errors") {
    RunConfig cfg;
    cfg.command = "demo";
    cfg.name = "nope";
    cfg.out_dir = scratch("unknown");
    CHECK_THROWS_AS(run_demo(cfg), margin::UsageError);
}
