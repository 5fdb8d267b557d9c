#include <doctest.h>

#include <string>

#include "core/config.hpp"

namespace cfg = sqz::config;

namespace {
bool has_error_mentioning(const cfg::ParseResult &r, const std::string &what) {
    for (const auto &e : r.errors)
        if (e.find(what) != std::string::npos) return true;
    return false;
}
} // namespace

TEST_CASE("empty config names the required field") {
    const auto r = cfg::parse("");
    CHECK(!r.ok());
    CHECK(has_error_mentioning(r, "scenario"));
}

TEST_CASE("out-of-range efficiency is reported by field name") {
    const auto r = cfg::parse("scenario = budget\ndetection.efficiency = 1.2\n");
    CHECK(!r.ok());
    CHECK(has_error_mentioning(r, "detection.efficiency"));
}

TEST_CASE("all violations are listed, not just the first") {
    const auto r = cfg::parse("scenario = beads\n"
                              "detection.efficiency = -3\n"
                              "trap.stiffness_n_per_m = 0\n"
                              "diffusion.alpha = 2.5\n");
    CHECK(r.errors.size() >= 3);
    CHECK(has_error_mentioning(r, "detection.efficiency"));
    CHECK(has_error_mentioning(r, "trap.stiffness_n_per_m"));
    CHECK(has_error_mentioning(r, "diffusion.alpha"));
}

TEST_CASE("parse errors carry line numbers") {
    const auto r = cfg::parse("scenario = beads\n"
                              "nonsense line\n"
                              "unknown.key = 3\n"
                              "run.replicates = soon\n"
                              "run.replicates = 4\n"
                              "run.replicates = 5\n");
    CHECK(has_error_mentioning(r, "line 2"));
    CHECK(has_error_mentioning(r, "line 3"));
    CHECK(has_error_mentioning(r, "line 4"));
    CHECK(has_error_mentioning(r, "duplicate"));
}

TEST_CASE("defaults are filled and recorded") {
    const auto r = cfg::parse("scenario = yeast\nrun.replicates = 7\n");
    REQUIRE(r.ok());
    CHECK(r.config.run.replicates == 7);
    CHECK(r.config.chain.carrier_hz == doctest::Approx(3.522e6));
    const auto &d = r.config.defaulted_keys;
    CHECK(std::find(d.begin(), d.end(), "chain.carrier_hz") != d.end());
    CHECK(std::find(d.begin(), d.end(), "run.replicates") == d.end());
    const auto dump = r.config.dump(true);
    CHECK(dump.find("chain.carrier_hz = 3522000  # default") !=
          std::string::npos);
}

TEST_CASE("hash is stable and value-sensitive") {
    const auto a = cfg::parse("scenario = yeast\n");
    const auto b = cfg::parse("scenario = yeast\n");
    const auto c = cfg::parse("scenario = yeast\nrun.replicates = 3\n");
    REQUIRE(a.ok());
    CHECK(a.config.hash() == b.config.hash());
    CHECK(a.config.hash() != c.config.hash());
    // explicit value equal to the default hashes identically
    const auto d = cfg::parse("scenario = yeast\nrun.replicates = 20\n");
    CHECK(a.config.hash() == d.config.hash());
}

TEST_CASE("shipped presets validate with zero errors") {
    for (const char *name :
         {"budget.cfg", "beads.cfg", "yeast.cfg", "spectra.cfg"}) {
        const auto r =
            cfg::parse_file(std::string(SQZ_PRESET_DIR) + "/" + name);
        INFO("preset ", name);
        CHECK(r.ok());
        for (const auto &e : r.errors) { INFO(e); CHECK(false); }
    }
}

TEST_CASE("negative values for unsigned keys are rejected, not wrapped") {
    const auto r = cfg::parse("scenario = beads\nrun.replicates = -1\n");
    CHECK(!r.ok());
    CHECK(has_error_mentioning(r, "run.replicates"));
    const auto s = cfg::parse("scenario = beads\nrun.trajectory_seed = -7\n");
    CHECK(!s.ok());
}

TEST_CASE("gain and noise-equivalent displacement are mutually exclusive") {
    const auto both = cfg::parse("scenario = yeast\n"
                                 "chain.gain_units_per_m = 1e8\n"
                                 "chain.noise_equiv_disp_m = 1e-9\n");
    CHECK(!both.ok());
    const auto neither = cfg::parse("scenario = yeast\n"
                                    "chain.gain_units_per_m = 0\n"
                                    "chain.noise_equiv_disp_m = 0\n");
    CHECK(!neither.ok());
    const auto gain_only = cfg::parse("scenario = yeast\n"
                                      "chain.gain_units_per_m = 1e8\n"
                                      "chain.noise_equiv_disp_m = 0\n");
    CHECK(gain_only.ok());
}
