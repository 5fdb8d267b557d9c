#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "core/dynamics.hpp"
#include "core/lockin.hpp"
#include "core/microrheology.hpp"
#include "core/spectrum.hpp"

namespace sqz::io {

// FNV-1a 64-bit; used for config hashes and manifest file checksums.
uint64_t fnv1a64(const void *data, size_t n);
uint64_t fnv1a64(const std::string &s);
uint64_t fnv1a64_file(const std::string &path);
std::string hex64(uint64_t v);

// Round-trip float formatting (%.17g).
std::string format_double(double v);

// Common self-describing header: tool version, config hash, free-form
// key/value lines, then the column names.
struct FileHeader {
    std::string config_hash;                       // empty = omit
    std::vector<std::pair<std::string, std::string>> meta;
    std::string columns;                           // e.g. "time_s position_m"
    std::string render() const;
};

void write_text_file(const std::string &path, const std::string &content);
std::string read_text_file(const std::string &path);

// Trajectory: columnar text (time_s, position_m) and compact binary
// (magic "SQZTRAJ1", version u32, dt f64, n u64, seed u64, f64 payload,
// all little-endian).
void save_trajectory_text(const dynamics::Trajectory &t,
                          const std::string &path,
                          const std::string &config_hash = "");
void save_trajectory_binary(const dynamics::Trajectory &t,
                            const std::string &path);
dynamics::Trajectory load_trajectory_binary(const std::string &path);

// RawRecord: the trajectory binary layout with the carrier added
// (magic "SQZRAW01", version u32, sample_rate f64, n u64, seed u64,
// carrier f64, f64 payload).
void save_raw_record_binary(const lockin::RawRecord &r,
                            const std::string &path);
lockin::RawRecord load_raw_record_binary(const std::string &path);

void save_spectrum_text(const spectrum::Spectrum &s, const std::string &path,
                        const std::string &config_hash = "");
void save_msd_text(const microrheology::MsdCurve &c, const std::string &path,
                   const std::string &config_hash = "");
void save_alpha_track_text(const microrheology::AlphaTrack &t,
                           const std::string &path,
                           const std::string &config_hash = "");

} // namespace sqz::io
