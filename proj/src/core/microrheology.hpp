#pragma once

#include <cstdint>
#include <vector>

namespace sqz::microrheology {

// Deterministic pairwise reduction; used for every mean/variance here so
// results do not depend on work scheduling.
double pairwise_sum(const double *data, size_t n);
double pairwise_sum(const std::vector<double> &data);

// Time-averaged mean squared displacement.
struct MsdCurve {
    std::vector<double> lags;      // s, strictly ascending
    std::vector<double> msd;       // m^2
    std::vector<double> stderr_m2; // per-lag standard error
    std::vector<uint64_t> n_pairs; // overlapping pairs per lag

    size_t size() const { return lags.size(); }
    void validate() const;
};

struct AlphaFit {
    double alpha = 0.0;
    double alpha_stderr = 0.0;
    double log_2d = 0.0;   // natural log of 2D
    double d_stderr = 0.0; // standard error of log_2d
    double lag_min = 0.0;  // fitted range actually used, s
    double lag_max = 0.0;
    double residual_rms = 0.0; // rms log-domain residual
    size_t points_used = 0;
};

struct AlphaTrack {
    std::vector<double> window_centers; // s
    std::vector<double> alphas;         // NaN marks a gap (failed fit)
    std::vector<double> stderrs;
    double window_length = 0.0; // s
    double hop = 0.0;           // s
};

struct PrecisionReport {
    double precision_gain = 0.0; // 1 - mean(se_sq)/mean(se_cl)
    double rate_gain = 0.0;      // (1-g)^-2 - 1
    double db_equivalent = 0.0;  // -10 log10(floor_sq / floor_cl); NaN if unknown
};

// MSD over the given lags (each must sit on the sample grid within 1e-9
// relative). stderr uses the conservative effective count n_pairs/lag_index
// to account for pair overlap.
MsdCurve msd(const std::vector<double> &series, double dt,
             const std::vector<double> &lags);

// Log-spaced lags snapped to the sample grid, deduplicated.
std::vector<double> log_lag_grid(double dt, double lag_min, double lag_max,
                                 int per_decade = 10);

// Weighted least squares of log(msd - noise_offset) on log(lag) over
// [lag_min, lag_max]. Weights (msd/stderr)^2 when stderrs are available,
// unweighted otherwise. With a nonzero offset, lags whose subtracted value
// is nonpositive are dropped (gaps); at least 3 must survive.
AlphaFit fit_alpha(const MsdCurve &curve, double lag_min, double lag_max,
                   double noise_offset = 0.0);

// G''/G' = tan(pi alpha / 2); alpha = 1 returns +infinity (purely viscous).
double loss_storage_ratio(double alpha);

// Sliding-window alpha(t). Windows with failed fits carry NaN (gaps, never
// interpolated). window_length must be at least 10x lag_max.
AlphaTrack windowed_alpha(const std::vector<double> &series, double dt,
                          double window_length, double hop, double lag_min,
                          double lag_max, double noise_offset = 0.0,
                          int lags_per_decade = 10);

// Matched-scenario comparison of fit uncertainties. Floors are demodulated
// noise variances (pass NaN if unknown; db_equivalent is then NaN).
PrecisionReport precision_comparison(const std::vector<AlphaFit> &classical,
                                     const std::vector<AlphaFit> &squeezed,
                                     double floor_classical,
                                     double floor_squeezed);

} // namespace sqz::microrheology
