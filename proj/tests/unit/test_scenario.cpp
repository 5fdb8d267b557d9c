#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <sstream>
#include <string>

#include "core/config.hpp"
#include "core/errors.hpp"
#include "core/scenario.hpp"
#include "core/textio.hpp"

namespace sc = sqz::scenario;
namespace io = sqz::io;
namespace fs = std::filesystem;

namespace {

std::string temp_dir(const char *name) {
    const auto p = fs::temp_directory_path() / name;
    fs::remove_all(p);
    return p.string();
}

double report_value(const std::string &dir, const std::string &key) {
    const auto text = io::read_text_file(dir + "/report.txt");
    const auto pos = text.find(key + " = ");
    REQUIRE(pos != std::string::npos);
    return std::stod(text.substr(pos + key.size() + 3));
}

// Small but complete yeast run for determinism / worker-independence tests.
const char *kMiniYeast = R"(scenario = yeast
run.replicates = 3
run.record_seconds = 0.02
yeast.track_seconds = 0.12
yeast.segment_seconds = 0.06
estimation.lag_max_s = 2e-3
estimation.window_s = 0.02
estimation.hop_s = 0.01
)";

} // namespace

TEST_CASE("budget scenario reproduces the headline numbers") {
    const auto r = sqz::config::parse_file(std::string(SQZ_PRESET_DIR) +
                                           "/budget.cfg");
    REQUIRE(r.ok());
    const auto dir = temp_dir("sqz_budget_run");
    const auto man = sc::run_scenario(r.config, dir, 1, -1, /*check=*/true);
    CHECK(man.scenario == "budget");
    CHECK(report_value(dir, "detected_variance") ==
          doctest::Approx(0.525).epsilon(2e-3));
    CHECK(report_value(dir, "power_reduction") ==
          doctest::Approx(0.425).epsilon(2e-3));
    CHECK(report_value(dir, "stringent_margin_db") ==
          doctest::Approx(1.69).epsilon(5e-3));
    CHECK(report_value(dir, "rate_gain") ==
          doctest::Approx(0.643).epsilon(2e-3));
    // the leak-degraded measured floor lands on the tracking margin
    CHECK(report_value(dir, "effective_squeezing_from_measured_db") ==
          doctest::Approx(2.40).epsilon(2e-3));
    fs::remove_all(dir);
}

TEST_CASE("identical runs produce bit-identical manifests") {
    const auto r = sqz::config::parse(kMiniYeast);
    REQUIRE(r.ok());
    const auto dir1 = temp_dir("sqz_det_run1");
    const auto dir2 = temp_dir("sqz_det_run2");
    (void)sc::run_scenario(r.config, dir1, 2, -1, false);
    (void)sc::run_scenario(r.config, dir2, 2, -1, false);
    CHECK(io::read_text_file(dir1 + "/manifest.txt") ==
          io::read_text_file(dir2 + "/manifest.txt"));
    fs::remove_all(dir1);
    fs::remove_all(dir2);
}

TEST_CASE("worker count does not change the outputs") {
    const auto r = sqz::config::parse(kMiniYeast);
    REQUIRE(r.ok());
    const auto dir1 = temp_dir("sqz_w1");
    const auto dir2 = temp_dir("sqz_w2");
    (void)sc::run_scenario(r.config, dir1, 1, -1, false);
    (void)sc::run_scenario(r.config, dir2, 2, -1, false);
    CHECK(io::read_text_file(dir1 + "/manifest.txt") ==
          io::read_text_file(dir2 + "/manifest.txt"));
    fs::remove_all(dir1);
    fs::remove_all(dir2);
}

TEST_CASE("seed override changes data, keeps structure") {
    const auto r = sqz::config::parse(kMiniYeast);
    REQUIRE(r.ok());
    const auto dir1 = temp_dir("sqz_seed1");
    const auto dir2 = temp_dir("sqz_seed2");
    (void)sc::run_scenario(r.config, dir1, 2, 1111, false);
    (void)sc::run_scenario(r.config, dir2, 2, 2222, false);
    const auto m1 = io::read_text_file(dir1 + "/manifest.txt");
    const auto m2 = io::read_text_file(dir2 + "/manifest.txt");
    CHECK(m1 != m2);
    fs::remove_all(dir1);
    fs::remove_all(dir2);
}

TEST_CASE("manifest report verifies checksums and flags tampering") {
    const auto r = sqz::config::parse("scenario = budget\n");
    REQUIRE(r.ok());
    const auto dir = temp_dir("sqz_report_run");
    const auto man = sc::run_scenario(r.config, dir, 1, -1, false);
    const auto rep = sc::report_manifest(man.path);
    CHECK(rep.find("report.txt") != std::string::npos);
    CHECK(rep.find("verified_files") != std::string::npos);
    // tamper with a listed file
    io::write_text_file(dir + "/report.txt", "tampered\n");
    CHECK_THROWS_AS((void)sc::report_manifest(man.path), sqz::io_error);
    fs::remove_all(dir);
}

TEST_CASE("beads scenario: fitted alpha consistent with 1") {
    const auto r = sqz::config::parse("scenario = beads\n"
                                      "run.replicates = 4\n"
                                      "run.record_seconds = 0.03\n"
                                      "estimation.lag_max_s = 1e-3\n");
    REQUIRE(r.ok());
    const auto dir = temp_dir("sqz_beads_run");
    (void)sc::run_scenario(r.config, dir, 2, -1, /*check=*/true);
    const double alpha = report_value(dir, "alpha_mean_classical");
    const double sd = report_value(dir, "alpha_sd_classical");
    CHECK(std::fabs(alpha - 1.0) < std::max(3.0 * sd, 0.03));
    fs::remove_all(dir);
}

TEST_CASE("beads scenario with a noiseless chain recovers alpha = 1") {
    const auto r = sqz::config::parse("scenario = beads\n"
                                      "run.replicates = 4\n"
                                      "run.record_seconds = 0.03\n"
                                      "estimation.lag_max_s = 1e-3\n"
                                      "chain.gain_units_per_m = 1e8\n"
                                      "chain.noise_equiv_disp_m = 0\n"
                                      "noise.variance_floor_classical = 1e-12\n"
                                      "noise.variance_floor_squeezed = 1e-12\n");
    REQUIRE(r.ok());
    const auto dir = temp_dir("sqz_beads_clean");
    (void)sc::run_scenario(r.config, dir, 2, -1, false);
    const double alpha = report_value(dir, "alpha_mean_classical");
    const double sd = report_value(dir, "alpha_sd_classical");
    CHECK(std::fabs(alpha - 1.0) < std::max(3.0 * (sd / 2.0 + 1e-3), 0.02));
    fs::remove_all(dir);
}

TEST_CASE("spectra scenario emits floors, mechanics and the power sweep") {
    auto r = sqz::config::parse_file(std::string(SQZ_PRESET_DIR) +
                                     "/spectra.cfg");
    REQUIRE(r.ok());
    r.config.run.record_seconds = 0.03;
    const auto dir = temp_dir("sqz_spectra_run");
    const auto man = sc::run_scenario(r.config, dir, 2, -1, /*check=*/true);
    bool have_sweep = false, have_mech = false, have_raw = false;
    for (const auto &[name, sum] : man.files) {
        have_sweep |= name == "trap_power_sweep.txt";
        have_mech |= name == "spectrum_mechanical.txt";
        have_raw |= name == "spectrum_raw_squeezed.txt";
    }
    CHECK(have_sweep);
    CHECK(have_mech);
    CHECK(have_raw);
    // sweep is monotone in trap power
    const auto sweep = io::read_text_file(dir + "/trap_power_sweep.txt");
    double prev = 0.0;
    bool first = true, monotone = true;
    std::stringstream ss(sweep);
    std::string line;
    while (std::getline(ss, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::stringstream ls(line);
        double p, v;
        ls >> p >> v;
        if (!first && v < prev - 1e-15) monotone = false;
        prev = v;
        first = false;
    }
    CHECK(monotone);
    fs::remove_all(dir);
}

TEST_CASE("every emitted file is listed in the manifest") {
    const auto r = sqz::config::parse(kMiniYeast);
    REQUIRE(r.ok());
    const auto dir = temp_dir("sqz_listing");
    const auto man = sc::run_scenario(r.config, dir, 2, -1, false);
    size_t disk_files = 0;
    for (const auto &entry : fs::directory_iterator(dir)) {
        const auto name = entry.path().filename().string();
        if (name == "manifest.txt") continue;
        ++disk_files;
        bool listed = false;
        for (const auto &[fname, sum] : man.files) listed |= fname == name;
        INFO("file ", name);
        CHECK(listed);
    }
    CHECK(disk_files == man.files.size());
    fs::remove_all(dir);
}
