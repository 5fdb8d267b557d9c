/* sqztrack — quantum-noise-limited particle tracking simulator.
 *
 * C API for the shared library. All functions return sqz_status; outputs go
 * through pointer arguments. Objects are opaque handles created and destroyed
 * here. On any failing call, sqz_last_error() returns a thread-local
 * human-readable message describing the failure.
 */
#ifndef SQZTRACK_H
#define SQZTRACK_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define SQZ_API __declspec(dllexport)
#else
#define SQZ_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum sqz_status {
    SQZ_OK = 0,
    SQZ_ERR_DOMAIN = 1,   /* unphysical or out-of-range argument */
    SQZ_ERR_CONFIG = 2,   /* config parse/validation failure */
    SQZ_ERR_RUNTIME = 3,  /* I/O or internal failure */
    SQZ_ERR_CHECK = 4,    /* scenario self-check failed (run with check) */
    SQZ_ERR_NULL = 5      /* required pointer argument was NULL */
} sqz_status;

SQZ_API const char *sqz_version(void);
SQZ_API const char *sqz_last_error(void);
SQZ_API void sqz_string_free(char *s);

/* ---- quantum-limited sensitivity algebra (pure scalar ops) ---- */

SQZ_API sqz_status sqz_scattered_flux(double cross_section_m2,
                                      double incident_flux_per_s,
                                      double beam_width_m, double *out);
SQZ_API sqz_status sqz_qnl(double efficiency, double scattered_flux_per_s,
                           double mode_overlap_per_m, double *out);
SQZ_API sqz_status sqz_measured_sensitivity(double efficiency,
                                            double scattered_flux_per_s,
                                            double mode_overlap_per_m,
                                            double squeezed_variance,
                                            double *out);
SQZ_API sqz_status sqz_stringent_qnl(double efficiency,
                                     double scattered_flux_per_s,
                                     double mode_overlap_per_m, double *out);
SQZ_API sqz_status sqz_detected_variance(double efficiency, double variance,
                                         double *out);
SQZ_API sqz_status sqz_trap_leak_variance(double source_squeezing_db,
                                          double efficiency,
                                          double lo_power_w,
                                          double trap_leak_power_w,
                                          double *out);
SQZ_API sqz_status sqz_variance_to_db(double variance, double *out);
SQZ_API sqz_status sqz_db_to_variance(double db, double *out);
SQZ_API sqz_status sqz_measurement_rate_gain(double precision_gain,
                                             double *out);

/* ---- trajectories ---- */

typedef struct sqz_trajectory sqz_trajectory;

SQZ_API sqz_status sqz_simulate_ou(double stiffness_n_per_m,
                                   double drag_kg_per_s, double temperature_k,
                                   double dt_s, size_t n, uint64_t seed,
                                   sqz_trajectory **out);
SQZ_API sqz_status sqz_simulate_fbm(double diffusion_constant, double alpha,
                                    double dt_s, size_t n, uint64_t seed,
                                    sqz_trajectory **out);
/* segments: arrays of length n_segments (diffusion constant, alpha,
 * duration in seconds per segment) */
SQZ_API sqz_status sqz_simulate_piecewise(const double *diffusion,
                                          const double *alpha,
                                          const double *duration_s,
                                          size_t n_segments, double dt_s,
                                          uint64_t seed, sqz_trajectory **out);
SQZ_API void sqz_trajectory_free(sqz_trajectory *t);
SQZ_API sqz_status sqz_trajectory_view(const sqz_trajectory *t,
                                       const double **positions, size_t *n);
SQZ_API sqz_status sqz_trajectory_dt(const sqz_trajectory *t, double *dt_s);
SQZ_API sqz_status sqz_trajectory_save_binary(const sqz_trajectory *t,
                                              const char *path);
SQZ_API sqz_status sqz_trajectory_save_text(const sqz_trajectory *t,
                                            const char *path);
SQZ_API sqz_status sqz_trajectory_load_binary(const char *path,
                                              sqz_trajectory **out);

SQZ_API sqz_status sqz_ou_msd_theory(double stiffness_n_per_m,
                                     double drag_kg_per_s,
                                     double temperature_k, double tau_s,
                                     double *out_m2);
SQZ_API sqz_status sqz_ou_psd_theory(double stiffness_n_per_m,
                                     double drag_kg_per_s,
                                     double temperature_k, double freq_hz,
                                     double *out_m2_per_hz);

/* ---- detection chain ---- */

typedef struct sqz_raw_record sqz_raw_record;
typedef struct sqz_timeseries sqz_timeseries;
typedef struct sqz_spectrum sqz_spectrum;

/* lock_tone_hz <= 0 disables the spur. */
SQZ_API sqz_status sqz_synthesize_record(const sqz_trajectory *traj,
                                         double gain_units_per_m,
                                         double variance_floor,
                                         double technical_corner_hz,
                                         double technical_amplitude,
                                         double lock_tone_hz,
                                         double lock_tone_amplitude,
                                         double raw_rate_hz,
                                         double carrier_hz, uint64_t seed,
                                         sqz_raw_record **out);
SQZ_API void sqz_raw_record_free(sqz_raw_record *r);
SQZ_API sqz_status sqz_raw_record_view(const sqz_raw_record *r,
                                       const double **samples, size_t *n);
SQZ_API sqz_status sqz_raw_record_save_binary(const sqz_raw_record *r,
                                              const char *path);
SQZ_API sqz_status sqz_raw_record_load_binary(const char *path,
                                              sqz_raw_record **out);

SQZ_API sqz_status sqz_demodulate(const sqz_raw_record *rec,
                                  double carrier_hz, double output_rate_hz,
                                  double lowpass_cutoff_hz, int filter_taps,
                                  sqz_timeseries **out);
SQZ_API void sqz_timeseries_free(sqz_timeseries *ts);
SQZ_API sqz_status sqz_timeseries_view(const sqz_timeseries *ts,
                                       const double **values, size_t *n);
SQZ_API sqz_status sqz_timeseries_dt(const sqz_timeseries *ts, double *dt_s);
SQZ_API sqz_status sqz_timeseries_start(const sqz_timeseries *ts,
                                        double *t0_s);

/* window: 0 = hann, 1 = hamming, 2 = blackman, 3 = rectangular */
SQZ_API sqz_status sqz_welch_psd(const double *data, size_t n,
                                 double sample_rate_hz, size_t segment_length,
                                 double overlap_fraction, int window,
                                 sqz_spectrum **out);
SQZ_API void sqz_spectrum_free(sqz_spectrum *s);
SQZ_API sqz_status sqz_spectrum_view(const sqz_spectrum *s,
                                     const double **freq_hz,
                                     const double **psd, size_t *n);
SQZ_API sqz_status sqz_spectrum_rbw(const sqz_spectrum *s, double *rbw_hz);
SQZ_API sqz_status sqz_spectrum_save_text(const sqz_spectrum *s,
                                          const char *path);

/* ---- microrheology estimators ---- */

typedef struct sqz_msd_curve sqz_msd_curve;

typedef struct sqz_alpha_fit {
    double alpha;
    double alpha_stderr;
    double log_2d;      /* natural log of 2D */
    double d_stderr;    /* standard error of log_2d */
    double lag_min_s;
    double lag_max_s;
    double residual_rms;
} sqz_alpha_fit;

/* lags_s must be integer multiples of the series timestep */
SQZ_API sqz_status sqz_msd(const double *data, size_t n, double dt_s,
                           const double *lags_s, size_t n_lags,
                           sqz_msd_curve **out);
SQZ_API void sqz_msd_curve_free(sqz_msd_curve *c);
SQZ_API sqz_status sqz_msd_curve_view(const sqz_msd_curve *c,
                                      const double **lags_s,
                                      const double **msd_m2,
                                      const double **stderr_m2,
                                      const uint64_t **n_pairs, size_t *n);
SQZ_API sqz_status sqz_msd_curve_save_text(const sqz_msd_curve *c,
                                           const char *path);

SQZ_API sqz_status sqz_fit_alpha(const sqz_msd_curve *c, double lag_min_s,
                                 double lag_max_s, double noise_offset_m2,
                                 sqz_alpha_fit *out);
SQZ_API sqz_status sqz_loss_storage_ratio(double alpha, double *out);

/* Per-window alpha track. Outputs are parallel arrays of length *n_windows;
 * windows whose fit failed carry NaN alpha/stderr (gaps). Arrays are
 * allocated by the library; free with sqz_buffer_free. */
SQZ_API sqz_status sqz_windowed_alpha(const double *data, size_t n,
                                      double dt_s, double window_s,
                                      double hop_s, double lag_min_s,
                                      double lag_max_s,
                                      double noise_offset_m2,
                                      double **window_centers_s,
                                      double **alphas, double **stderrs,
                                      size_t *n_windows);
SQZ_API void sqz_buffer_free(double *p);

SQZ_API sqz_status sqz_precision_comparison(const sqz_alpha_fit *classical,
                                            size_t n_classical,
                                            const sqz_alpha_fit *squeezed,
                                            size_t n_squeezed,
                                            double floor_classical,
                                            double floor_squeezed,
                                            double *precision_gain,
                                            double *rate_gain,
                                            double *db_equivalent);

/* ---- scenario harness ---- */

typedef struct sqz_config sqz_config;

SQZ_API sqz_status sqz_config_parse_file(const char *path, sqz_config **out);
SQZ_API sqz_status sqz_config_parse_text(const char *text, sqz_config **out);
SQZ_API void sqz_config_free(sqz_config *c);
/* Resolved config (defaults filled, provenance-marked), as text. */
SQZ_API sqz_status sqz_config_dump(const sqz_config *c, char **text);

/* workers <= 0 selects hardware concurrency; seed_override < 0 keeps the
 * config seeds; check != 0 runs scenario self-checks after the run and
 * fails with SQZ_ERR_CHECK if they do not pass. manifest_path and
 * wall_clock_s are optional outputs (wall clock is never written into the
 * manifest file, which stays bit-deterministic). */
SQZ_API sqz_status sqz_run_scenario(const sqz_config *c, const char *out_dir,
                                    int workers, int64_t seed_override,
                                    int check, char **manifest_path,
                                    double *wall_clock_s);

/* Render a manifest file as a report, verifying file checksums. */
SQZ_API sqz_status sqz_report_manifest(const char *manifest_path,
                                       char **text);

#ifdef __cplusplus
}
#endif

#endif /* SQZTRACK_H */
