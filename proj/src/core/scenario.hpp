#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "core/config.hpp"
#include "core/dynamics.hpp"
#include "core/lockin.hpp"
#include "core/microrheology.hpp"

namespace sqz::scenario {

// Self-check failure (run_scenario with check = true). The CLI maps this to
// its own exit code, distinct from runtime errors.
class check_error : public std::runtime_error {
public:
    explicit check_error(const std::string &what) : std::runtime_error(what) {}
};

struct RunManifest {
    std::string config_hash;
    std::string code_version;
    std::string scenario;
    double achieved_output_rate = 0.0;
    double requested_output_rate = 0.0;
    std::vector<std::pair<std::string, uint64_t>> files; // name -> fnv1a64
    std::vector<uint64_t> file_sizes;
    double wall_clock_s = 0.0; // reported on stdout, never serialized
    std::string path;          // where the manifest was written
};

// Deterministic seed derivation: role-domain plus index through one Philox
// block, so every replicate/arm/segment draws from an independent stream of
// the two root seeds.
enum class SeedDomain : uint64_t {
    kTrajectory = 1,
    kNoiseClassical = 2,
    kNoiseSqueezed = 3,
    kCalibClassical = 4,
    kCalibSqueezed = 5,
    kAlphaDraw = 6,
};
uint64_t derive_seed(uint64_t root, SeedDomain domain, uint64_t index);

// Chain geometry shared by the record-producing scenarios.
struct ChainSetup {
    lockin::DemodConfig demod;
    double raw_rate = 0.0;
    size_t decimation = 0;
    double dt_out = 0.0;
    double achieved_rate = 0.0;
    double sigma_d = 0.0; // demod noise sd per sample at V_eff = 1
    double gain = 0.0;    // detector units per meter
    size_t halo_blocks = 0;

    // Trajectory samples needed to yield n_out demodulated samples.
    size_t trajectory_length(size_t n_out) const {
        return n_out + 2 * halo_blocks;
    }
};
ChainSetup make_chain(const config::ScenarioConfig &cfg);

// One detection arm run end to end: synthesize, demodulate, convert to
// displacement units, plus a matched noise-only calibration record.
struct ArmResult {
    std::vector<double> displacement; // meters, at dt_out
    double dt = 0.0;
    double floor_variance = 0.0;  // calibration variance, m^2
    double noise_offset = 0.0;    // 2 * floor_variance
};
ArmResult run_arm(const dynamics::Trajectory &traj, double variance_floor,
                  const lockin::NoiseConfig &noise_template,
                  const ChainSetup &chain, uint64_t noise_seed,
                  uint64_t calib_seed);

// Runs the configured scenario, emits data files plus manifest.txt into
// out_dir (created if needed). workers <= 0 picks hardware concurrency;
// seed_override >= 0 replaces both root seeds. check = true runs the
// scenario self-checks and throws check_error on failure.
RunManifest run_scenario(const config::ScenarioConfig &cfg,
                         const std::string &out_dir, int workers = 0,
                         int64_t seed_override = -1, bool check = false);

// Reads a manifest, re-checksums the listed files, renders a report.
// Throws io_error if a file is missing or its checksum differs.
std::string report_manifest(const std::string &manifest_path);

} // namespace sqz::scenario
