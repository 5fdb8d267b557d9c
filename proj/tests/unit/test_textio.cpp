#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "core/dynamics.hpp"
#include "core/errors.hpp"
#include "core/rng.hpp"
#include "core/textio.hpp"

namespace io = sqz::io;

namespace {

std::string temp_path(const char *name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

} // namespace

TEST_CASE("fnv1a64 known vectors") {
    CHECK(io::fnv1a64(std::string("")) == 0xcbf29ce484222325ull);
    CHECK(io::fnv1a64(std::string("a")) == 0xaf63dc4c8601ec8cull);
    CHECK(io::fnv1a64(std::string("foobar")) == 0x85944171f73967e8ull);
    CHECK(io::hex64(0xcbf29ce484222325ull) == "cbf29ce484222325");
}

TEST_CASE("format_double round trips") {
    sqz::PhiloxRng rng(3, 0);
    for (int i = 0; i < 1000; ++i) {
        const double x =
            (rng.next_uniform() - 0.5) * std::pow(10.0, 30.0 * (rng.next_uniform() - 0.5));
        const std::string s = io::format_double(x);
        CHECK(std::stod(s) == x);
    }
}

TEST_CASE("trajectory binary round trip is bit exact") {
    const auto t = sqz::dynamics::simulate_fbm({5e-15, 0.815}, 1e-5, 777, 42);
    const auto path = temp_path("sqz_test_traj.bin");
    io::save_trajectory_binary(t, path);
    const auto back = io::load_trajectory_binary(path);
    CHECK(back.dt == t.dt);
    CHECK(back.seed == t.seed);
    CHECK(back.positions == t.positions);
    std::remove(path.c_str());
}

TEST_CASE("trajectory text export carries units and metadata") {
    const auto t = sqz::dynamics::simulate_fbm({5e-15, 0.8}, 1e-5, 16, 3);
    const auto path = temp_path("sqz_test_traj.txt");
    io::save_trajectory_text(t, path, "deadbeef");
    const auto text = io::read_text_file(path);
    CHECK(text.find("# config_hash = deadbeef") != std::string::npos);
    CHECK(text.find("# columns: time_s position_m") != std::string::npos);
    CHECK(text.find("philox4x32-10") != std::string::npos);
    CHECK(text.find("inverse-cdf-as241") != std::string::npos);
    std::remove(path.c_str());
}

TEST_CASE("raw record binary round trip") {
    sqz::lockin::RawRecord r;
    r.sample_rate = 14.088e6;
    r.carrier_freq = 3.522e6;
    r.seed = 99;
    sqz::PhiloxRng rng(5, 0);
    r.samples.resize(1000);
    for (auto &s : r.samples) s = rng.next_normal();
    const auto path = temp_path("sqz_test_raw.bin");
    io::save_raw_record_binary(r, path);
    const auto back = io::load_raw_record_binary(path);
    CHECK(back.sample_rate == r.sample_rate);
    CHECK(back.carrier_freq == r.carrier_freq);
    CHECK(back.seed == r.seed);
    CHECK(back.samples == r.samples);
    std::remove(path.c_str());
}

TEST_CASE("binary loader rejects foreign files") {
    const auto path = temp_path("sqz_test_junk.bin");
    io::write_text_file(path, "not a trajectory");
    CHECK_THROWS_AS((void)io::load_trajectory_binary(path), sqz::io_error);
    std::remove(path.c_str());
}
