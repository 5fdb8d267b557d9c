#include "sqztrack.h"

#include <cstdlib>
#include <cstring>
#include <string>

#include "core/config.hpp"
#include "core/dynamics.hpp"
#include "core/errors.hpp"
#include "core/lockin.hpp"
#include "core/microrheology.hpp"
#include "core/quantum.hpp"
#include "core/scenario.hpp"
#include "core/spectrum.hpp"
#include "core/textio.hpp"
#include "core/version.hpp"

namespace {

thread_local std::string g_last_error;

void set_error(const std::string &msg) { g_last_error = msg; }

char *dup_string(const std::string &s) {
    char *out = static_cast<char *>(std::malloc(s.size() + 1));
    if (out) std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

// Runs fn, translating C++ errors into status codes + the thread-local
// message. SQZ_ERR_RUNTIME covers I/O and unexpected failures.
template <typename Fn> sqz_status guarded(Fn &&fn) {
    try {
        fn();
        return SQZ_OK;
    } catch (const sqz::domain_error &e) {
        set_error(e.what());
        return SQZ_ERR_DOMAIN;
    } catch (const sqz::config_error &e) {
        set_error(e.what());
        return SQZ_ERR_CONFIG;
    } catch (const sqz::scenario::check_error &e) {
        set_error(e.what());
        return SQZ_ERR_CHECK;
    } catch (const std::exception &e) {
        set_error(e.what());
        return SQZ_ERR_RUNTIME;
    } catch (...) {
        set_error("unknown error");
        return SQZ_ERR_RUNTIME;
    }
}

sqz_status require_ptr(const void *p) {
    if (p) return SQZ_OK;
    set_error("null pointer argument");
    return SQZ_ERR_NULL;
}

} // namespace

struct sqz_trajectory {
    sqz::dynamics::Trajectory t;
};
struct sqz_raw_record {
    sqz::lockin::RawRecord r;
};
struct sqz_timeseries {
    sqz::lockin::TimeSeries ts;
};
struct sqz_spectrum {
    sqz::spectrum::Spectrum s;
};
struct sqz_msd_curve {
    sqz::microrheology::MsdCurve c;
};
struct sqz_config {
    sqz::config::ScenarioConfig c;
};

extern "C" {

const char *sqz_version(void) { return sqz::kVersion; }

const char *sqz_last_error(void) { return g_last_error.c_str(); }

void sqz_string_free(char *s) { std::free(s); }

void sqz_buffer_free(double *p) { std::free(p); }

/* ---- quantum noise ---- */

sqz_status sqz_scattered_flux(double cross_section_m2,
                              double incident_flux_per_s, double beam_width_m,
                              double *out) {
    if (auto st = require_ptr(out)) return st;
    return guarded([&] {
        *out = sqz::quantum::scattered_flux(
            {cross_section_m2, incident_flux_per_s, beam_width_m});
    });
}

sqz_status sqz_qnl(double efficiency, double scattered_flux_per_s,
                   double mode_overlap_per_m, double *out) {
    if (auto st = require_ptr(out)) return st;
    return guarded([&] {
        *out = sqz::quantum::qnl(
            {efficiency, mode_overlap_per_m, scattered_flux_per_s, 1.0});
    });
}

sqz_status sqz_measured_sensitivity(double efficiency,
                                    double scattered_flux_per_s,
                                    double mode_overlap_per_m,
                                    double squeezed_variance, double *out) {
    if (auto st = require_ptr(out)) return st;
    return guarded([&] {
        *out = sqz::quantum::measured_sensitivity(
            {efficiency, mode_overlap_per_m, scattered_flux_per_s,
             squeezed_variance});
    });
}

sqz_status sqz_stringent_qnl(double efficiency, double scattered_flux_per_s,
                             double mode_overlap_per_m, double *out) {
    if (auto st = require_ptr(out)) return st;
    return guarded([&] {
        *out = sqz::quantum::stringent_qnl(
            {efficiency, mode_overlap_per_m, scattered_flux_per_s, 1.0});
    });
}

sqz_status sqz_detected_variance(double efficiency, double variance,
                                 double *out) {
    if (auto st = require_ptr(out)) return st;
    return guarded(
        [&] { *out = sqz::quantum::detected_variance(efficiency, variance); });
}

sqz_status sqz_trap_leak_variance(double source_squeezing_db,
                                  double efficiency, double lo_power_w,
                                  double trap_leak_power_w, double *out) {
    if (auto st = require_ptr(out)) return st;
    return guarded([&] {
        *out = sqz::quantum::trap_leak_variance(
            {source_squeezing_db, 0.0, lo_power_w, trap_leak_power_w},
            efficiency);
    });
}

sqz_status sqz_variance_to_db(double variance, double *out) {
    if (auto st = require_ptr(out)) return st;
    return guarded([&] { *out = sqz::quantum::variance_to_db(variance); });
}

sqz_status sqz_db_to_variance(double db, double *out) {
    if (auto st = require_ptr(out)) return st;
    return guarded([&] { *out = sqz::quantum::db_to_variance(db); });
}

sqz_status sqz_measurement_rate_gain(double precision_gain, double *out) {
    if (auto st = require_ptr(out)) return st;
    return guarded(
        [&] { *out = sqz::quantum::measurement_rate_gain(precision_gain); });
}

/* ---- trajectories ---- */

sqz_status sqz_simulate_ou(double stiffness_n_per_m, double drag_kg_per_s,
                           double temperature_k, double dt_s, size_t n,
                           uint64_t seed, sqz_trajectory **out) {
    if (auto st = require_ptr(out)) return st;
    return guarded([&] {
        *out = new sqz_trajectory{sqz::dynamics::simulate_ou(
            {stiffness_n_per_m, drag_kg_per_s, temperature_k}, dt_s, n, seed)};
    });
}

sqz_status sqz_simulate_fbm(double diffusion_constant, double alpha,
                            double dt_s, size_t n, uint64_t seed,
                            sqz_trajectory **out) {
    if (auto st = require_ptr(out)) return st;
    return guarded([&] {
        *out = new sqz_trajectory{sqz::dynamics::simulate_fbm(
            {diffusion_constant, alpha}, dt_s, n, seed)};
    });
}

sqz_status sqz_simulate_piecewise(const double *diffusion, const double *alpha,
                                  const double *duration_s, size_t n_segments,
                                  double dt_s, uint64_t seed,
                                  sqz_trajectory **out) {
    if (auto st = require_ptr(out)) return st;
    if (auto st = require_ptr(diffusion)) return st;
    if (auto st = require_ptr(alpha)) return st;
    if (auto st = require_ptr(duration_s)) return st;
    return guarded([&] {
        std::vector<sqz::dynamics::Segment> segs;
        segs.reserve(n_segments);
        for (size_t i = 0; i < n_segments; ++i)
            segs.push_back({{diffusion[i], alpha[i]}, duration_s[i]});
        *out = new sqz_trajectory{
            sqz::dynamics::simulate_piecewise_alpha(segs, dt_s, seed)};
    });
}

void sqz_trajectory_free(sqz_trajectory *t) { delete t; }

sqz_status sqz_trajectory_view(const sqz_trajectory *t,
                               const double **positions, size_t *n) {
    if (auto st = require_ptr(t)) return st;
    if (auto st = require_ptr(positions)) return st;
    if (auto st = require_ptr(n)) return st;
    *positions = t->t.positions.data();
    *n = t->t.positions.size();
    return SQZ_OK;
}

sqz_status sqz_trajectory_dt(const sqz_trajectory *t, double *dt_s) {
    if (auto st = require_ptr(t)) return st;
    if (auto st = require_ptr(dt_s)) return st;
    *dt_s = t->t.dt;
    return SQZ_OK;
}

sqz_status sqz_trajectory_save_binary(const sqz_trajectory *t,
                                      const char *path) {
    if (auto st = require_ptr(t)) return st;
    if (auto st = require_ptr(path)) return st;
    return guarded([&] { sqz::io::save_trajectory_binary(t->t, path); });
}

sqz_status sqz_trajectory_save_text(const sqz_trajectory *t,
                                    const char *path) {
    if (auto st = require_ptr(t)) return st;
    if (auto st = require_ptr(path)) return st;
    return guarded([&] { sqz::io::save_trajectory_text(t->t, path); });
}

sqz_status sqz_trajectory_load_binary(const char *path, sqz_trajectory **out) {
    if (auto st = require_ptr(path)) return st;
    if (auto st = require_ptr(out)) return st;
    return guarded(
        [&] { *out = new sqz_trajectory{sqz::io::load_trajectory_binary(path)}; });
}

sqz_status sqz_ou_msd_theory(double stiffness_n_per_m, double drag_kg_per_s,
                             double temperature_k, double tau_s,
                             double *out_m2) {
    if (auto st = require_ptr(out_m2)) return st;
    return guarded([&] {
        *out_m2 = sqz::dynamics::ou_msd_theory(
            {stiffness_n_per_m, drag_kg_per_s, temperature_k}, tau_s);
    });
}

sqz_status sqz_ou_psd_theory(double stiffness_n_per_m, double drag_kg_per_s,
                             double temperature_k, double freq_hz,
                             double *out_m2_per_hz) {
    if (auto st = require_ptr(out_m2_per_hz)) return st;
    return guarded([&] {
        *out_m2_per_hz = sqz::dynamics::ou_psd_theory(
            {stiffness_n_per_m, drag_kg_per_s, temperature_k}, freq_hz);
    });
}

/* ---- detection chain ---- */

sqz_status sqz_synthesize_record(const sqz_trajectory *traj,
                                 double gain_units_per_m,
                                 double variance_floor,
                                 double technical_corner_hz,
                                 double technical_amplitude,
                                 double lock_tone_hz,
                                 double lock_tone_amplitude,
                                 double raw_rate_hz, double carrier_hz,
                                 uint64_t seed, sqz_raw_record **out) {
    if (auto st = require_ptr(traj)) return st;
    if (auto st = require_ptr(out)) return st;
    return guarded([&] {
        sqz::lockin::NoiseConfig noise;
        noise.variance_floor = variance_floor;
        noise.technical_corner = technical_corner_hz;
        noise.technical_amplitude = technical_amplitude;
        noise.lock_tone_freq = lock_tone_hz;
        noise.lock_tone_amplitude = lock_tone_amplitude;
        *out = new sqz_raw_record{sqz::lockin::synthesize_record(
            traj->t, gain_units_per_m, noise, raw_rate_hz, carrier_hz, seed)};
    });
}

void sqz_raw_record_free(sqz_raw_record *r) { delete r; }

sqz_status sqz_raw_record_view(const sqz_raw_record *r, const double **samples,
                               size_t *n) {
    if (auto st = require_ptr(r)) return st;
    if (auto st = require_ptr(samples)) return st;
    if (auto st = require_ptr(n)) return st;
    *samples = r->r.samples.data();
    *n = r->r.samples.size();
    return SQZ_OK;
}

sqz_status sqz_raw_record_save_binary(const sqz_raw_record *r,
                                      const char *path) {
    if (auto st = require_ptr(r)) return st;
    if (auto st = require_ptr(path)) return st;
    return guarded([&] { sqz::io::save_raw_record_binary(r->r, path); });
}

sqz_status sqz_raw_record_load_binary(const char *path, sqz_raw_record **out) {
    if (auto st = require_ptr(path)) return st;
    if (auto st = require_ptr(out)) return st;
    return guarded(
        [&] { *out = new sqz_raw_record{sqz::io::load_raw_record_binary(path)}; });
}

sqz_status sqz_demodulate(const sqz_raw_record *rec, double carrier_hz,
                          double output_rate_hz, double lowpass_cutoff_hz,
                          int filter_taps, sqz_timeseries **out) {
    if (auto st = require_ptr(rec)) return st;
    if (auto st = require_ptr(out)) return st;
    return guarded([&] {
        sqz::lockin::DemodConfig cfg;
        cfg.carrier_freq = carrier_hz;
        cfg.output_rate = output_rate_hz;
        cfg.lowpass_cutoff = lowpass_cutoff_hz;
        cfg.filter_taps = filter_taps;
        *out = new sqz_timeseries{sqz::lockin::demodulate(rec->r, cfg)};
    });
}

void sqz_timeseries_free(sqz_timeseries *ts) { delete ts; }

sqz_status sqz_timeseries_view(const sqz_timeseries *ts, const double **values,
                               size_t *n) {
    if (auto st = require_ptr(ts)) return st;
    if (auto st = require_ptr(values)) return st;
    if (auto st = require_ptr(n)) return st;
    *values = ts->ts.values.data();
    *n = ts->ts.values.size();
    return SQZ_OK;
}

sqz_status sqz_timeseries_dt(const sqz_timeseries *ts, double *dt_s) {
    if (auto st = require_ptr(ts)) return st;
    if (auto st = require_ptr(dt_s)) return st;
    *dt_s = ts->ts.dt;
    return SQZ_OK;
}

sqz_status sqz_timeseries_start(const sqz_timeseries *ts, double *t0_s) {
    if (auto st = require_ptr(ts)) return st;
    if (auto st = require_ptr(t0_s)) return st;
    *t0_s = ts->ts.t0;
    return SQZ_OK;
}

sqz_status sqz_welch_psd(const double *data, size_t n, double sample_rate_hz,
                         size_t segment_length, double overlap_fraction,
                         int window, sqz_spectrum **out) {
    if (auto st = require_ptr(data)) return st;
    if (auto st = require_ptr(out)) return st;
    return guarded([&] {
        if (window < 0 || window > 3)
            throw sqz::domain_error("welch: window must be 0..3");
        std::vector<double> series(data, data + n);
        *out = new sqz_spectrum{sqz::spectrum::welch_psd(
            series, sample_rate_hz, segment_length, overlap_fraction,
            static_cast<sqz::spectrum::Window>(window))};
    });
}

void sqz_spectrum_free(sqz_spectrum *s) { delete s; }

sqz_status sqz_spectrum_view(const sqz_spectrum *s, const double **freq_hz,
                             const double **psd, size_t *n) {
    if (auto st = require_ptr(s)) return st;
    if (auto st = require_ptr(freq_hz)) return st;
    if (auto st = require_ptr(psd)) return st;
    if (auto st = require_ptr(n)) return st;
    *freq_hz = s->s.frequencies.data();
    *psd = s->s.psd.data();
    *n = s->s.frequencies.size();
    return SQZ_OK;
}

sqz_status sqz_spectrum_rbw(const sqz_spectrum *s, double *rbw_hz) {
    if (auto st = require_ptr(s)) return st;
    if (auto st = require_ptr(rbw_hz)) return st;
    *rbw_hz = s->s.resolution_bandwidth;
    return SQZ_OK;
}

sqz_status sqz_spectrum_save_text(const sqz_spectrum *s, const char *path) {
    if (auto st = require_ptr(s)) return st;
    if (auto st = require_ptr(path)) return st;
    return guarded([&] { sqz::io::save_spectrum_text(s->s, path); });
}

/* ---- estimators ---- */

sqz_status sqz_msd(const double *data, size_t n, double dt_s,
                   const double *lags_s, size_t n_lags, sqz_msd_curve **out) {
    if (auto st = require_ptr(data)) return st;
    if (auto st = require_ptr(lags_s)) return st;
    if (auto st = require_ptr(out)) return st;
    return guarded([&] {
        std::vector<double> series(data, data + n);
        std::vector<double> lags(lags_s, lags_s + n_lags);
        *out = new sqz_msd_curve{sqz::microrheology::msd(series, dt_s, lags)};
    });
}

void sqz_msd_curve_free(sqz_msd_curve *c) { delete c; }

sqz_status sqz_msd_curve_view(const sqz_msd_curve *c, const double **lags_s,
                              const double **msd_m2, const double **stderr_m2,
                              const uint64_t **n_pairs, size_t *n) {
    if (auto st = require_ptr(c)) return st;
    if (auto st = require_ptr(lags_s)) return st;
    if (auto st = require_ptr(msd_m2)) return st;
    if (auto st = require_ptr(stderr_m2)) return st;
    if (auto st = require_ptr(n_pairs)) return st;
    if (auto st = require_ptr(n)) return st;
    *lags_s = c->c.lags.data();
    *msd_m2 = c->c.msd.data();
    *stderr_m2 = c->c.stderr_m2.data();
    *n_pairs = c->c.n_pairs.data();
    *n = c->c.lags.size();
    return SQZ_OK;
}

sqz_status sqz_msd_curve_save_text(const sqz_msd_curve *c, const char *path) {
    if (auto st = require_ptr(c)) return st;
    if (auto st = require_ptr(path)) return st;
    return guarded([&] { sqz::io::save_msd_text(c->c, path); });
}

sqz_status sqz_fit_alpha(const sqz_msd_curve *c, double lag_min_s,
                         double lag_max_s, double noise_offset_m2,
                         sqz_alpha_fit *out) {
    if (auto st = require_ptr(c)) return st;
    if (auto st = require_ptr(out)) return st;
    return guarded([&] {
        const auto fit = sqz::microrheology::fit_alpha(c->c, lag_min_s,
                                                       lag_max_s,
                                                       noise_offset_m2);
        out->alpha = fit.alpha;
        out->alpha_stderr = fit.alpha_stderr;
        out->log_2d = fit.log_2d;
        out->d_stderr = fit.d_stderr;
        out->lag_min_s = fit.lag_min;
        out->lag_max_s = fit.lag_max;
        out->residual_rms = fit.residual_rms;
    });
}

sqz_status sqz_loss_storage_ratio(double alpha, double *out) {
    if (auto st = require_ptr(out)) return st;
    return guarded(
        [&] { *out = sqz::microrheology::loss_storage_ratio(alpha); });
}

sqz_status sqz_windowed_alpha(const double *data, size_t n, double dt_s,
                              double window_s, double hop_s, double lag_min_s,
                              double lag_max_s, double noise_offset_m2,
                              double **window_centers_s, double **alphas,
                              double **stderrs, size_t *n_windows) {
    if (auto st = require_ptr(data)) return st;
    if (auto st = require_ptr(window_centers_s)) return st;
    if (auto st = require_ptr(alphas)) return st;
    if (auto st = require_ptr(stderrs)) return st;
    if (auto st = require_ptr(n_windows)) return st;
    return guarded([&] {
        std::vector<double> series(data, data + n);
        const auto track = sqz::microrheology::windowed_alpha(
            series, dt_s, window_s, hop_s, lag_min_s, lag_max_s,
            noise_offset_m2);
        const size_t m = track.window_centers.size();
        auto alloc = [](size_t count) {
            return static_cast<double *>(std::malloc(count * sizeof(double)));
        };
        *window_centers_s = alloc(m);
        *alphas = alloc(m);
        *stderrs = alloc(m);
        if (!*window_centers_s || !*alphas || !*stderrs)
            throw std::bad_alloc();
        std::memcpy(*window_centers_s, track.window_centers.data(),
                    m * sizeof(double));
        std::memcpy(*alphas, track.alphas.data(), m * sizeof(double));
        std::memcpy(*stderrs, track.stderrs.data(), m * sizeof(double));
        *n_windows = m;
    });
}

sqz_status sqz_precision_comparison(const sqz_alpha_fit *classical,
                                    size_t n_classical,
                                    const sqz_alpha_fit *squeezed,
                                    size_t n_squeezed, double floor_classical,
                                    double floor_squeezed,
                                    double *precision_gain, double *rate_gain,
                                    double *db_equivalent) {
    if (auto st = require_ptr(classical)) return st;
    if (auto st = require_ptr(squeezed)) return st;
    if (auto st = require_ptr(precision_gain)) return st;
    if (auto st = require_ptr(rate_gain)) return st;
    if (auto st = require_ptr(db_equivalent)) return st;
    return guarded([&] {
        auto to_fits = [](const sqz_alpha_fit *f, size_t n) {
            std::vector<sqz::microrheology::AlphaFit> out(n);
            for (size_t i = 0; i < n; ++i) {
                out[i].alpha = f[i].alpha;
                out[i].alpha_stderr = f[i].alpha_stderr;
                out[i].log_2d = f[i].log_2d;
                out[i].d_stderr = f[i].d_stderr;
            }
            return out;
        };
        const auto rep = sqz::microrheology::precision_comparison(
            to_fits(classical, n_classical), to_fits(squeezed, n_squeezed),
            floor_classical, floor_squeezed);
        *precision_gain = rep.precision_gain;
        *rate_gain = rep.rate_gain;
        *db_equivalent = rep.db_equivalent;
    });
}

/* ---- harness ---- */

sqz_status sqz_config_parse_file(const char *path, sqz_config **out) {
    if (auto st = require_ptr(path)) return st;
    if (auto st = require_ptr(out)) return st;
    return guarded([&] {
        auto result = sqz::config::parse_file(path);
        if (!result.ok()) {
            std::string msg;
            for (const auto &e : result.errors) {
                if (!msg.empty()) msg += "\n";
                msg += e;
            }
            throw sqz::config_error(msg);
        }
        *out = new sqz_config{std::move(result.config)};
    });
}

sqz_status sqz_config_parse_text(const char *text, sqz_config **out) {
    if (auto st = require_ptr(text)) return st;
    if (auto st = require_ptr(out)) return st;
    return guarded([&] {
        auto result = sqz::config::parse(text);
        if (!result.ok()) {
            std::string msg;
            for (const auto &e : result.errors) {
                if (!msg.empty()) msg += "\n";
                msg += e;
            }
            throw sqz::config_error(msg);
        }
        *out = new sqz_config{std::move(result.config)};
    });
}

void sqz_config_free(sqz_config *c) { delete c; }

sqz_status sqz_config_dump(const sqz_config *c, char **text) {
    if (auto st = require_ptr(c)) return st;
    if (auto st = require_ptr(text)) return st;
    return guarded([&] {
        *text = dup_string(c->c.dump(true));
        if (!*text) throw std::bad_alloc();
    });
}

sqz_status sqz_run_scenario(const sqz_config *c, const char *out_dir,
                            int workers, int64_t seed_override, int check,
                            char **manifest_path, double *wall_clock_s) {
    if (auto st = require_ptr(c)) return st;
    if (auto st = require_ptr(out_dir)) return st;
    return guarded([&] {
        const auto man = sqz::scenario::run_scenario(c->c, out_dir, workers,
                                                     seed_override, check != 0);
        if (manifest_path) {
            *manifest_path = dup_string(man.path);
            if (!*manifest_path) throw std::bad_alloc();
        }
        if (wall_clock_s) *wall_clock_s = man.wall_clock_s;
    });
}

sqz_status sqz_report_manifest(const char *manifest_path, char **text) {
    if (auto st = require_ptr(manifest_path)) return st;
    if (auto st = require_ptr(text)) return st;
    return guarded([&] {
        *text = dup_string(sqz::scenario::report_manifest(manifest_path));
        if (!*text) throw std::bad_alloc();
    });
}

} /* extern "C" */
