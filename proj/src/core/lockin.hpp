#pragma once

#include <cstdint>
#include <vector>

#include "core/dynamics.hpp"

namespace sqz::lockin {

// Detector samples in shot-noise units: unit-variance white noise is the
// shot-noise level of a coherent (V = 1) field.
struct RawRecord {
    std::vector<double> samples;
    double sample_rate = 0.0;  // Hz; must exceed 2x carrier
    double carrier_freq = 0.0; // Hz
    uint64_t seed = 0;

    void validate() const;
};

struct NoiseConfig {
    double variance_floor = 1.0;      // V_eff near the carrier (1 = shot noise)
    double technical_corner = 0.0;    // Hz; 1/f technical noise below this
    double technical_amplitude = 0.0; // sqrt(PSD) at 1 Hz, shot-noise units
    double lock_tone_freq = 0.0;      // Hz; <= 0 disables
    double lock_tone_amplitude = 0.0;

    void validate() const;
};

struct DemodConfig {
    double carrier_freq = 3.522e6;
    double output_rate = 1.0e5;      // requested; achieved rate is recorded
    double lowpass_cutoff = 5.0e5;   // prefilter cutoff, Hz
    int filter_taps = 255;           // prefilter length, odd

    void validate(double sample_rate) const;
};

// Demodulated displacement-domain record at the decimated rate.
struct TimeSeries {
    std::vector<double> values;
    double dt = 0.0;       // s, = decimation/sample_rate exactly
    double t0 = 0.0;       // s, timestamp of values[0] on the raw clock
    double achieved_rate = 0.0;
    double requested_rate = 0.0;

    size_t size() const { return values.size(); }
};

// Amplitude-modulate the trajectory onto the carrier and add the noise
// model: white Gaussian floor of variance variance_floor, FFT-shaped 1/f
// technical noise below the corner, optional lock tone. The trajectory
// timestep must be an integer multiple of 1/raw_rate (zero-order hold).
// Deterministic given seed (noise streams 0 = floor, 1 = technical).
RawRecord synthesize_record(const dynamics::Trajectory &traj, double gain,
                            const NoiseConfig &noise, double raw_rate,
                            double carrier_freq, uint64_t seed);

// In-phase demodulation (ideal phase lock): multiply by 2 cos, apply the
// linear-phase prefilter convolved with an integrate-and-dump boxcar over
// one output period, sample at block centers with the group delay removed.
// The record is processed in one pass with the full kernel in scope, so the
// output is independent of any caller-side chunking of the raw stream.
TimeSeries demodulate(const RawRecord &rec, const DemodConfig &cfg);

// Blackman windowed-sinc low-pass, unit DC gain, odd tap count.
std::vector<double> design_lowpass(int taps, double cutoff, double sample_rate);

// Combined demodulation kernel (prefilter (*) boxcar) for a given config,
// plus the per-sample noise standard deviation it produces at V_eff = 1.
std::vector<double> demod_kernel(const DemodConfig &cfg, double sample_rate);
double demod_noise_sigma(const DemodConfig &cfg, double sample_rate);

} // namespace sqz::lockin
