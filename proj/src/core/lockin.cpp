#include "core/lockin.hpp"

#include <cmath>
#include <complex>

#include "core/errors.hpp"
#include "core/fft.hpp"
#include "core/rng.hpp"

namespace sqz::lockin {

namespace {

constexpr double kPi = 3.14159265358979323846;

void require(bool ok, const char *msg) {
    if (!ok) throw domain_error(msg);
}

// cos(2 pi f k / fs) with the phase reduced before the cosine so the
// carrier stays exact over long records (and bit-exact on coherent grids
// such as fs = 4 f).
inline double carrier_cos(double f_over_fs, uint64_t k) {
    const double cycles = std::fmod(f_over_fs * static_cast<double>(k), 1.0);
    return std::cos(2.0 * kPi * cycles);
}

double sinc(double x) {
    if (x == 0.0) return 1.0;
    const double px = kPi * x;
    return std::sin(px) / px;
}

// One-sided technical-noise PSD target: amp^2 * (1 Hz / f) up to the corner,
// zero above. Synthesized by spectral shaping of a white Gaussian spectrum.
std::vector<double> technical_noise(size_t n, double fs, double amp,
                                    double corner, PhiloxRng &rng) {
    std::vector<std::complex<double>> spec(n / 2 + 1,
                                           std::complex<double>(0.0, 0.0));
    const double df = fs / static_cast<double>(n);
    const auto k_max = static_cast<size_t>(corner / df);
    const double scale_base = static_cast<double>(n) * fs / 2.0;
    for (size_t k = 1; k <= k_max && k < n / 2; ++k) {
        const double f = df * static_cast<double>(k);
        const double target_psd = amp * amp / f;
        const double scale = std::sqrt(scale_base * target_psd / 2.0);
        const double u = rng.next_normal();
        const double v = rng.next_normal();
        spec[k] = std::complex<double>(scale * u, scale * v);
    }
    auto x = fft::c2r(spec, n);
    const double inv_n = 1.0 / static_cast<double>(n);
    for (auto &v : x) v *= inv_n;
    return x;
}

} // namespace

void RawRecord::validate() const {
    require(sample_rate > 0.0 && carrier_freq > 0.0,
            "RawRecord: rates must be positive");
    require(sample_rate > 2.0 * carrier_freq,
            "RawRecord: sample_rate must exceed twice the carrier");
    require(samples.size() >= 2, "RawRecord: need at least 2 samples");
}

void NoiseConfig::validate() const {
    require(variance_floor > 0.0, "NoiseConfig: variance_floor must be > 0");
    require(technical_corner >= 0.0 && technical_amplitude >= 0.0,
            "NoiseConfig: technical terms must be >= 0");
    require(lock_tone_amplitude >= 0.0,
            "NoiseConfig: lock_tone_amplitude must be >= 0");
}

void DemodConfig::validate(double sample_rate) const {
    require(carrier_freq > 0.0 && output_rate > 0.0,
            "DemodConfig: frequencies must be positive");
    require(filter_taps >= 3, "DemodConfig: need at least 3 taps");
    require(filter_taps % 2 == 1,
            "DemodConfig: linear-phase prefilter needs an odd tap count");
    // Passband must cover the output band; the filter must fit the raw rate.
    require(output_rate <= 2.0 * lowpass_cutoff,
            "DemodConfig: lowpass_cutoff below half the output rate");
    require(2.0 * lowpass_cutoff <= sample_rate,
            "DemodConfig: lowpass_cutoff above the raw Nyquist");
    require(output_rate <= sample_rate,
            "DemodConfig: output rate above the raw rate");
}

std::vector<double> design_lowpass(int taps, double cutoff,
                                   double sample_rate) {
    require(taps >= 3 && taps % 2 == 1, "design_lowpass: taps must be odd >= 3");
    require(cutoff > 0.0 && 2.0 * cutoff <= sample_rate,
            "design_lowpass: cutoff must be in (0, fs/2]");
    const int m = taps - 1;
    const double fc = cutoff / sample_rate;
    std::vector<double> h(taps);
    double sum = 0.0;
    for (int n = 0; n < taps; ++n) {
        const double x = n - m / 2.0;
        const double w = 0.42 - 0.5 * std::cos(2.0 * kPi * n / m) +
                         0.08 * std::cos(4.0 * kPi * n / m);
        h[n] = 2.0 * fc * sinc(2.0 * fc * x) * w;
        sum += h[n];
    }
    for (auto &v : h) v /= sum;
    return h;
}

std::vector<double> demod_kernel(const DemodConfig &cfg, double sample_rate) {
    cfg.validate(sample_rate);
    const auto decim = static_cast<size_t>(
        std::llround(sample_rate / cfg.output_rate));
    require(decim >= 1, "demod_kernel: decimation must be >= 1");
    const auto pre = design_lowpass(cfg.filter_taps, cfg.lowpass_cutoff,
                                    sample_rate);
    std::vector<double> h(pre.size() + decim - 1, 0.0);
    const double inv = 1.0 / static_cast<double>(decim);
    for (size_t i = 0; i < pre.size(); ++i)
        for (size_t j = 0; j < decim; ++j) h[i + j] += pre[i] * inv;
    return h;
}

double demod_noise_sigma(const DemodConfig &cfg, double sample_rate) {
    // Output variance of unit white noise through the mixer and kernel:
    // sum over taps of h^2 * (2 cos)^2 evaluated on the carrier grid. The
    // sub-permille dependence on the absolute mixer phase is ignored;
    // pipelines that need the exact floor measure it from a calibration
    // record anyway.
    const auto h = demod_kernel(cfg, sample_rate);
    const double f_over_fs = cfg.carrier_freq / sample_rate;
    double s = 0.0;
    for (size_t i = 0; i < h.size(); ++i) {
        const double c = carrier_cos(f_over_fs, i);
        s += h[i] * h[i] * 4.0 * c * c;
    }
    return std::sqrt(s);
}

RawRecord synthesize_record(const dynamics::Trajectory &traj, double gain,
                            const NoiseConfig &noise, double raw_rate,
                            double carrier_freq, uint64_t seed) {
    traj.validate();
    noise.validate();
    require(raw_rate > 2.0 * carrier_freq,
            "synthesize_record: raw_rate must exceed twice the carrier");
    require(carrier_freq > 0.0, "synthesize_record: carrier must be positive");

    // Zero-order hold: each trajectory sample spans an integer number of
    // raw samples.
    const double ratio = traj.dt * raw_rate;
    const auto hold = static_cast<uint64_t>(std::llround(ratio));
    require(hold >= 1 && std::fabs(ratio - static_cast<double>(hold)) <=
                             1e-9 * std::max(1.0, ratio),
            "synthesize_record: trajectory dt is not an integer multiple of "
            "the raw sample period");

    const size_t n_raw = traj.size() * hold;
    RawRecord rec;
    rec.sample_rate = raw_rate;
    rec.carrier_freq = carrier_freq;
    rec.seed = seed;
    rec.samples.resize(n_raw);

    const double f_over_fs = carrier_freq / raw_rate;
    const double sigma = std::sqrt(noise.variance_floor);
    PhiloxRng floor_rng(seed, /*stream=*/0);
    for (size_t k = 0; k < n_raw; ++k) {
        const double x = traj.positions[k / hold];
        rec.samples[k] = gain * x * carrier_cos(f_over_fs, k) +
                         sigma * floor_rng.next_normal();
    }
    if (noise.technical_amplitude > 0.0 && noise.technical_corner > 0.0) {
        PhiloxRng tech_rng(seed, /*stream=*/1);
        const auto tech =
            technical_noise(n_raw, raw_rate, noise.technical_amplitude,
                            noise.technical_corner, tech_rng);
        for (size_t k = 0; k < n_raw; ++k) rec.samples[k] += tech[k];
    }
    if (noise.lock_tone_freq > 0.0 && noise.lock_tone_amplitude > 0.0) {
        const double ratio_tone = noise.lock_tone_freq / raw_rate;
        for (size_t k = 0; k < n_raw; ++k)
            rec.samples[k] +=
                noise.lock_tone_amplitude * carrier_cos(ratio_tone, k);
    }
    return rec;
}

TimeSeries demodulate(const RawRecord &rec, const DemodConfig &cfg) {
    rec.validate();
    cfg.validate(rec.sample_rate);
    require(std::fabs(cfg.carrier_freq - rec.carrier_freq) <=
                1e-9 * rec.carrier_freq,
            "demodulate: config carrier does not match the record");

    const double fs = rec.sample_rate;
    const auto decim =
        static_cast<size_t>(std::llround(fs / cfg.output_rate));
    const auto h = demod_kernel(cfg, fs);
    const size_t len = h.size();
    const size_t halo_left = (len - 1) / 2;
    const size_t halo_right = len - 1 - halo_left;
    const size_t n_raw = rec.samples.size();
    require(n_raw > len + decim, "demodulate: record shorter than the filter");

    // Mixed-domain record, 2 cos(2 pi f t) * samples.
    const double f_over_fs = cfg.carrier_freq / fs;
    std::vector<double> mixed(n_raw);
    for (size_t k = 0; k < n_raw; ++k)
        mixed[k] = 2.0 * carrier_cos(f_over_fs, k) * rec.samples[k];

    // Outputs at hold-block centers: raw index phase + j*decim, keeping the
    // full kernel inside the record.
    const size_t phase = decim / 2;
    size_t r_min = phase;
    while (r_min < halo_right) r_min += decim;
    const size_t r_max_limit = n_raw - 1 - halo_left;

    TimeSeries out;
    out.dt = static_cast<double>(decim) / fs;
    out.t0 = static_cast<double>(r_min) / fs;
    out.achieved_rate = fs / static_cast<double>(decim);
    out.requested_rate = cfg.output_rate;
    for (size_t r = r_min; r <= r_max_limit; r += decim) {
        double acc = 0.0;
        const size_t base = r + halo_left;
        for (size_t i = 0; i < len; ++i) acc += h[i] * mixed[base - i];
        out.values.push_back(acc);
    }
    require(out.values.size() >= 2, "demodulate: record too short");
    return out;
}

} // namespace sqz::lockin
