#include "core/scenario.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <mutex>
#include <sstream>
#include <thread>

#include "core/errors.hpp"
#include "core/quantum.hpp"
#include "core/rng.hpp"
#include "core/spectrum.hpp"
#include "core/textio.hpp"
#include "core/version.hpp"

namespace sqz::scenario {

namespace fs = std::filesystem;
using config::ScenarioConfig;
using microrheology::AlphaFit;
using microrheology::MsdCurve;

namespace {

void parallel_for(size_t n, int workers, const std::function<void(size_t)> &fn) {
    size_t nthreads = workers > 0 ? static_cast<size_t>(workers)
                                  : std::thread::hardware_concurrency();
    if (nthreads < 1) nthreads = 1;
    nthreads = std::min(nthreads, n);
    if (nthreads <= 1) {
        for (size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(nthreads);
    for (size_t t = 0; t < nthreads; ++t) {
        pool.emplace_back([&] {
            for (;;) {
                const size_t i = next.fetch_add(1);
                if (i >= n) return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!first_error) first_error = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto &th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

std::string join_path(const std::string &dir, const std::string &name) {
    return (fs::path(dir) / name).string();
}

struct Emitter {
    std::string dir;
    std::string config_hash;
    std::vector<std::pair<std::string, uint64_t>> files;
    std::vector<uint64_t> sizes;

    void add(const std::string &name) {
        const auto path = join_path(dir, name);
        files.emplace_back(name, io::fnv1a64_file(path));
        sizes.push_back(static_cast<uint64_t>(fs::file_size(path)));
    }
    void text(const std::string &name, const std::string &content) {
        io::write_text_file(join_path(dir, name), content);
        add(name);
    }
};

std::string kv(const std::string &key, double value) {
    return key + " = " + io::format_double(value) + "\n";
}

// Truncated normal by rejection; the acceptance window [0.6, 1] around
// mean 0.81 keeps the acceptance rate high.
double truncated_normal(PhiloxRng &rng, double mean, double sigma, double lo,
                        double hi) {
    for (int i = 0; i < 10000; ++i) {
        const double x = mean + sigma * rng.next_normal();
        if (x >= lo && x <= hi) return x;
    }
    throw domain_error("truncated_normal: acceptance region too small");
}

lockin::NoiseConfig noise_template(const ScenarioConfig &cfg) {
    lockin::NoiseConfig n;
    n.technical_corner = cfg.noise.technical_corner_hz;
    n.technical_amplitude = cfg.noise.technical_amplitude;
    n.lock_tone_freq = cfg.noise.lock_tone_hz;
    n.lock_tone_amplitude = cfg.noise.lock_tone_amplitude;
    return n;
}

struct EnsembleOutput {
    std::vector<AlphaFit> fits_cl, fits_sq;
    std::vector<double> floors_cl, floors_sq;
    std::vector<double> alphas_true;
    MsdCurve curve_cl0, curve_sq0; // replicate 0 curves for emission
};

std::string fits_table(const std::vector<AlphaFit> &fits,
                       const std::vector<double> &alphas_true,
                       const std::string &config_hash) {
    io::FileHeader hdr;
    hdr.config_hash = config_hash;
    hdr.columns =
        "replicate alpha_true alpha alpha_stderr log_2d d_stderr residual_rms";
    std::string out = hdr.render();
    for (size_t i = 0; i < fits.size(); ++i) {
        out += std::to_string(i) + " ";
        out += io::format_double(alphas_true.empty() ? std::nan("")
                                                     : alphas_true[i]);
        out += " " + io::format_double(fits[i].alpha);
        out += " " + io::format_double(fits[i].alpha_stderr);
        out += " " + io::format_double(fits[i].log_2d);
        out += " " + io::format_double(fits[i].d_stderr);
        out += " " + io::format_double(fits[i].residual_rms);
        out += "\n";
    }
    return out;
}

} // namespace

uint64_t derive_seed(uint64_t root, SeedDomain domain, uint64_t index) {
    const auto b =
        PhiloxRng::block(root, static_cast<uint64_t>(domain), index);
    return static_cast<uint64_t>(b[0]) | (static_cast<uint64_t>(b[1]) << 32);
}

ChainSetup make_chain(const ScenarioConfig &cfg) {
    ChainSetup c;
    c.raw_rate = cfg.chain.raw_rate_hz;
    c.demod.carrier_freq = cfg.chain.carrier_hz;
    c.demod.output_rate = cfg.chain.output_rate_hz;
    c.demod.lowpass_cutoff = cfg.chain.lowpass_cutoff_hz;
    c.demod.filter_taps = static_cast<int>(cfg.chain.filter_taps);
    c.demod.validate(c.raw_rate);
    c.decimation = static_cast<size_t>(
        std::llround(c.raw_rate / cfg.chain.output_rate_hz));
    c.dt_out = static_cast<double>(c.decimation) / c.raw_rate;
    c.achieved_rate = c.raw_rate / static_cast<double>(c.decimation);
    c.sigma_d = lockin::demod_noise_sigma(c.demod, c.raw_rate);
    c.gain = cfg.chain.gain_units_per_m > 0.0
                 ? cfg.chain.gain_units_per_m
                 : c.sigma_d / cfg.chain.noise_equiv_disp_m;
    const size_t kernel_len =
        static_cast<size_t>(cfg.chain.filter_taps) + c.decimation - 1;
    c.halo_blocks = (kernel_len - 1) / 2 / c.decimation + 2;
    return c;
}

ArmResult run_arm(const dynamics::Trajectory &traj, double variance_floor,
                  const lockin::NoiseConfig &noise_template,
                  const ChainSetup &chain, uint64_t noise_seed,
                  uint64_t calib_seed) {
    lockin::NoiseConfig noise = noise_template;
    noise.variance_floor = variance_floor;

    const auto rec = lockin::synthesize_record(
        traj, chain.gain, noise, chain.raw_rate, chain.demod.carrier_freq,
        noise_seed);
    const auto demod = lockin::demodulate(rec, chain.demod);

    dynamics::Trajectory zero;
    zero.dt = traj.dt;
    zero.seed = calib_seed;
    zero.generator = "zero";
    zero.positions.assign(traj.positions.size(), 0.0);
    const auto rec_cal = lockin::synthesize_record(
        zero, chain.gain, noise, chain.raw_rate, chain.demod.carrier_freq,
        calib_seed);
    const auto demod_cal = lockin::demodulate(rec_cal, chain.demod);

    ArmResult out;
    out.dt = demod.dt;
    out.displacement.resize(demod.values.size());
    const double inv_gain = 1.0 / chain.gain;
    for (size_t i = 0; i < demod.values.size(); ++i)
        out.displacement[i] = demod.values[i] * inv_gain;

    std::vector<double> cal(demod_cal.values.size());
    for (size_t i = 0; i < cal.size(); ++i)
        cal[i] = demod_cal.values[i] * inv_gain;
    const double mean =
        microrheology::pairwise_sum(cal) / static_cast<double>(cal.size());
    std::vector<double> sq(cal.size());
    for (size_t i = 0; i < cal.size(); ++i)
        sq[i] = (cal[i] - mean) * (cal[i] - mean);
    out.floor_variance =
        microrheology::pairwise_sum(sq) / static_cast<double>(sq.size() - 1);
    out.noise_offset = 2.0 * out.floor_variance;
    return out;
}

namespace {

// Shared by the beads and yeast scenarios: replicate ensemble with matched
// trajectory seeds and classical/squeezed noise arms.
EnsembleOutput run_ensemble(const ScenarioConfig &cfg, const ChainSetup &chain,
                            int workers, bool fbm_dynamics) {
    const size_t reps = cfg.run.replicates;
    const auto n_out = static_cast<size_t>(
        std::llround(cfg.run.record_seconds * chain.achieved_rate));
    const size_t n_traj = chain.trajectory_length(n_out);
    const double lag_min = cfg.estimation.lag_min_s > 0.0
                               ? cfg.estimation.lag_min_s
                               : 2.0 * chain.dt_out;
    const auto lags = microrheology::log_lag_grid(
        chain.dt_out, lag_min, cfg.estimation.lag_max_s,
        static_cast<int>(cfg.estimation.lags_per_decade));
    const auto tmpl = noise_template(cfg);

    EnsembleOutput out;
    out.fits_cl.resize(reps);
    out.fits_sq.resize(reps);
    out.floors_cl.resize(reps);
    out.floors_sq.resize(reps);
    out.alphas_true.resize(reps);

    parallel_for(reps, workers, [&](size_t r) {
        const uint64_t tseed =
            derive_seed(cfg.run.trajectory_seed, SeedDomain::kTrajectory, r);
        dynamics::Trajectory traj;
        double alpha_true;
        if (fbm_dynamics) {
            PhiloxRng arng(
                derive_seed(cfg.run.trajectory_seed, SeedDomain::kAlphaDraw, r),
                0);
            alpha_true = truncated_normal(arng, cfg.yeast.alpha_mean,
                                          cfg.yeast.alpha_sigma,
                                          cfg.yeast.alpha_min,
                                          cfg.yeast.alpha_max);
            traj = dynamics::simulate_fbm(
                {cfg.diffusion.constant, alpha_true}, chain.dt_out, n_traj,
                tseed);
        } else {
            alpha_true = 1.0;
            traj = dynamics::simulate_ou({cfg.trap.stiffness_n_per_m,
                                          cfg.trap.drag_kg_per_s,
                                          cfg.trap.temperature_k},
                                         chain.dt_out, n_traj, tseed);
        }
        out.alphas_true[r] = alpha_true;

        const auto arm_cl = run_arm(
            traj, cfg.noise.variance_floor_classical, tmpl, chain,
            derive_seed(cfg.run.noise_seed, SeedDomain::kNoiseClassical, r),
            derive_seed(cfg.run.noise_seed, SeedDomain::kCalibClassical, r));
        const auto arm_sq = run_arm(
            traj, cfg.noise.variance_floor_squeezed, tmpl, chain,
            derive_seed(cfg.run.noise_seed, SeedDomain::kNoiseSqueezed, r),
            derive_seed(cfg.run.noise_seed, SeedDomain::kCalibSqueezed, r));

        const auto curve_cl = microrheology::msd(arm_cl.displacement,
                                                 arm_cl.dt, lags);
        const auto curve_sq = microrheology::msd(arm_sq.displacement,
                                                 arm_sq.dt, lags);
        const double off_cl =
            cfg.estimation.subtract_noise ? arm_cl.noise_offset : 0.0;
        const double off_sq =
            cfg.estimation.subtract_noise ? arm_sq.noise_offset : 0.0;
        out.fits_cl[r] = microrheology::fit_alpha(curve_cl, lag_min,
                                                  cfg.estimation.lag_max_s,
                                                  off_cl);
        out.fits_sq[r] = microrheology::fit_alpha(curve_sq, lag_min,
                                                  cfg.estimation.lag_max_s,
                                                  off_sq);
        out.floors_cl[r] = arm_cl.floor_variance;
        out.floors_sq[r] = arm_sq.floor_variance;
        if (r == 0) {
            out.curve_cl0 = curve_cl;
            out.curve_sq0 = curve_sq;
        }
    });
    return out;
}

double vec_mean(const std::vector<double> &v) {
    return microrheology::pairwise_sum(v) / static_cast<double>(v.size());
}

double vec_sd(const std::vector<double> &v) {
    const double m = vec_mean(v);
    std::vector<double> sq(v.size());
    for (size_t i = 0; i < v.size(); ++i) sq[i] = (v[i] - m) * (v[i] - m);
    if (v.size() < 2) return 0.0;
    return std::sqrt(microrheology::pairwise_sum(sq) /
                     static_cast<double>(v.size() - 1));
}

void run_budget(const ScenarioConfig &cfg, Emitter &em, bool check) {
    namespace qn = quantum;
    const qn::ScatteringGeometry geom{cfg.geometry.cross_section_m2,
                                      cfg.geometry.incident_flux_per_s,
                                      cfg.geometry.beam_width_m};
    const double n_scat = qn::scattered_flux(geom);
    const double eta = cfg.detection.efficiency;
    const qn::DetectionModel model{eta, cfg.detection.mode_overlap_per_m,
                                   cfg.detection.scattered_flux_per_s, 1.0};

    // Headline numbers derived from the measured squeezing margins.
    const double v_det = qn::db_to_variance(cfg.noise.measured_db_spectra);
    const double v_track = qn::db_to_variance(cfg.noise.measured_db_tracking);
    const double power_reduction = 1.0 - v_track;
    const double stringent_margin =
        cfg.noise.measured_db_tracking - 10.0 * std::log10(1.0 / eta);
    const double rate_gain =
        qn::measurement_rate_gain(cfg.noise.quoted_precision_gain);

    // Formula chain from the source squeezing and efficiency/loss.
    const double v_source = qn::db_to_variance(cfg.noise.source_squeezing_db);
    const double v_det_formula = qn::detected_variance(eta, v_source);
    const double v_det_loss =
        qn::detected_variance(1.0 - cfg.noise.loss, v_source);
    const double p_leak =
        cfg.noise.trap_power_w * cfg.noise.trap_leak_fraction;
    const qn::SqueezingBudget budget{cfg.noise.source_squeezing_db,
                                     cfg.noise.loss, cfg.noise.lo_power_w,
                                     p_leak};
    const double v_leak_formula = qn::trap_leak_variance(budget, eta);
    // Same mixture applied to the measured detected variance.
    const double v_leak_measured =
        (v_det * cfg.noise.lo_power_w + p_leak) /
        (cfg.noise.lo_power_w + p_leak);

    std::ostringstream rep;
    io::FileHeader hdr;
    hdr.config_hash = em.config_hash;
    hdr.columns = "key = value";
    rep << hdr.render();
    rep << kv("scattered_flux_per_s", n_scat);
    rep << kv("qnl_m_per_sqrt_hz", qn::qnl(model));
    rep << kv("stringent_qnl_m_per_sqrt_hz", qn::stringent_qnl(model));
    rep << kv("detected_variance", v_det);
    rep << kv("detected_variance_pct", 100.0 * v_det);
    rep << kv("tracking_variance", v_track);
    rep << kv("power_reduction", power_reduction);
    rep << kv("stringent_margin_db", stringent_margin);
    rep << kv("precision_gain", cfg.noise.quoted_precision_gain);
    rep << kv("rate_gain", rate_gain);
    rep << kv("source_variance", v_source);
    rep << kv("detected_variance_formula_eta", v_det_formula);
    rep << kv("detected_variance_formula_db",
              qn::variance_to_db(v_det_formula));
    rep << kv("detected_variance_formula_loss", v_det_loss);
    rep << kv("trap_leak_power_w", p_leak);
    rep << kv("effective_variance_formula", v_leak_formula);
    rep << kv("effective_variance_from_measured", v_leak_measured);
    rep << kv("effective_squeezing_from_measured_db",
              qn::variance_to_db(v_leak_measured));
    em.text("report.txt", rep.str());

    if (check) {
        auto near = [](double a, double b, double tol) {
            return std::fabs(a - b) <= tol;
        };
        if (!near(v_det, 0.525, 1e-3))
            throw check_error("budget: detected variance not 0.525");
        if (!near(power_reduction, 0.425, 1e-3))
            throw check_error("budget: power reduction not 0.425");
        if (!near(stringent_margin, 1.694, 1e-2))
            throw check_error("budget: stringent margin not 1.69 dB");
        if (!near(rate_gain, 0.643, 1e-3))
            throw check_error("budget: rate gain not 0.643");
    }
}

void run_beads(const ScenarioConfig &cfg, const ChainSetup &chain, Emitter &em,
               int workers, bool check) {
    const auto ens = run_ensemble(cfg, chain, workers, /*fbm=*/false);

    io::save_msd_text(ens.curve_cl0, join_path(em.dir, "msd_classical.txt"),
                      em.config_hash);
    em.add("msd_classical.txt");
    io::save_msd_text(ens.curve_sq0, join_path(em.dir, "msd_squeezed.txt"),
                      em.config_hash);
    em.add("msd_squeezed.txt");
    em.text("fits_classical.txt",
            fits_table(ens.fits_cl, ens.alphas_true, em.config_hash));
    em.text("fits_squeezed.txt",
            fits_table(ens.fits_sq, ens.alphas_true, em.config_hash));

    std::vector<double> a_cl, a_sq, se_cl, se_sq;
    for (const auto &f : ens.fits_cl) {
        a_cl.push_back(f.alpha);
        se_cl.push_back(f.alpha_stderr);
    }
    for (const auto &f : ens.fits_sq) {
        a_sq.push_back(f.alpha);
        se_sq.push_back(f.alpha_stderr);
    }
    const auto prec = microrheology::precision_comparison(
        ens.fits_cl, ens.fits_sq, vec_mean(ens.floors_cl),
        vec_mean(ens.floors_sq));

    std::ostringstream rep;
    io::FileHeader hdr;
    hdr.config_hash = em.config_hash;
    hdr.columns = "key = value";
    rep << hdr.render();
    rep << kv("replicates", static_cast<double>(cfg.run.replicates));
    // Both uncertainty flavors: ensemble spread and mean per-fit stderr.
    rep << kv("alpha_mean_classical", vec_mean(a_cl));
    rep << kv("alpha_sd_classical", vec_sd(a_cl));
    rep << kv("alpha_stderr_mean_classical", vec_mean(se_cl));
    rep << kv("alpha_mean_squeezed", vec_mean(a_sq));
    rep << kv("alpha_sd_squeezed", vec_sd(a_sq));
    rep << kv("alpha_stderr_mean_squeezed", vec_mean(se_sq));
    rep << kv("precision_gain", prec.precision_gain);
    rep << kv("rate_gain", prec.rate_gain);
    rep << kv("floor_ratio_db", prec.db_equivalent);
    em.text("report.txt", rep.str());

    if (check) {
        const double mean = vec_mean(a_cl);
        const double se =
            vec_sd(a_cl) / std::sqrt(static_cast<double>(a_cl.size()));
        if (std::fabs(mean - 1.0) > std::max(3.0 * se, 0.02))
            throw check_error("beads: fitted alpha not consistent with 1");
    }
}

void run_yeast(const ScenarioConfig &cfg, const ChainSetup &chain, Emitter &em,
               int workers, bool check) {
    const auto ens = run_ensemble(cfg, chain, workers, /*fbm=*/true);

    io::save_msd_text(ens.curve_cl0, join_path(em.dir, "msd_classical.txt"),
                      em.config_hash);
    em.add("msd_classical.txt");
    io::save_msd_text(ens.curve_sq0, join_path(em.dir, "msd_squeezed.txt"),
                      em.config_hash);
    em.add("msd_squeezed.txt");
    em.text("fits_classical.txt",
            fits_table(ens.fits_cl, ens.alphas_true, em.config_hash));
    em.text("fits_squeezed.txt",
            fits_table(ens.fits_sq, ens.alphas_true, em.config_hash));

    const auto prec = microrheology::precision_comparison(
        ens.fits_cl, ens.fits_sq, vec_mean(ens.floors_cl),
        vec_mean(ens.floors_sq));

    // Piecewise-alpha track record: one long record per arm.
    const auto n_seg = static_cast<size_t>(std::llround(
        cfg.yeast.track_seconds / cfg.yeast.segment_seconds));
    std::vector<dynamics::Segment> segments;
    PhiloxRng arng(derive_seed(cfg.run.trajectory_seed, SeedDomain::kAlphaDraw,
                               1000000),
                   0);
    for (size_t i = 0; i < n_seg; ++i) {
        const double a =
            truncated_normal(arng, cfg.yeast.alpha_mean, cfg.yeast.alpha_sigma,
                             cfg.yeast.alpha_min, cfg.yeast.alpha_max);
        segments.push_back({{cfg.diffusion.constant, a},
                            cfg.yeast.segment_seconds});
    }
    const auto track_traj = dynamics::simulate_piecewise_alpha(
        segments, chain.dt_out,
        derive_seed(cfg.run.trajectory_seed, SeedDomain::kTrajectory,
                    1000000));
    const auto tmpl = noise_template(cfg);
    const double lag_min = cfg.estimation.lag_min_s > 0.0
                               ? cfg.estimation.lag_min_s
                               : 2.0 * chain.dt_out;
    // Window lags stay well below the window length.
    const double track_lag_max =
        std::min(cfg.estimation.lag_max_s, cfg.estimation.window_s / 10.0);
    for (const char *arm_name : {"classical", "squeezed"}) {
        const bool sq = std::string(arm_name) == "squeezed";
        const auto arm = run_arm(
            track_traj,
            sq ? cfg.noise.variance_floor_squeezed
               : cfg.noise.variance_floor_classical,
            tmpl, chain,
            derive_seed(cfg.run.noise_seed,
                        sq ? SeedDomain::kNoiseSqueezed
                           : SeedDomain::kNoiseClassical,
                        1000000),
            derive_seed(cfg.run.noise_seed,
                        sq ? SeedDomain::kCalibSqueezed
                           : SeedDomain::kCalibClassical,
                        1000000));
        const auto track = microrheology::windowed_alpha(
            arm.displacement, arm.dt, cfg.estimation.window_s,
            cfg.estimation.hop_s, lag_min, track_lag_max,
            cfg.estimation.subtract_noise ? arm.noise_offset : 0.0,
            static_cast<int>(cfg.estimation.lags_per_decade));
        const std::string fname =
            std::string("alpha_track_") + arm_name + ".txt";
        io::save_alpha_track_text(track, join_path(em.dir, fname),
                                  em.config_hash);
        em.add(fname);
    }

    std::vector<double> a_cl, a_sq, se_cl, se_sq;
    for (const auto &f : ens.fits_cl) {
        a_cl.push_back(f.alpha);
        se_cl.push_back(f.alpha_stderr);
    }
    for (const auto &f : ens.fits_sq) {
        a_sq.push_back(f.alpha);
        se_sq.push_back(f.alpha_stderr);
    }

    std::ostringstream rep;
    io::FileHeader hdr;
    hdr.config_hash = em.config_hash;
    hdr.columns = "key = value";
    rep << hdr.render();
    rep << kv("replicates", static_cast<double>(cfg.run.replicates));
    rep << kv("alpha_true_mean", vec_mean(ens.alphas_true));
    rep << kv("alpha_mean_classical", vec_mean(a_cl));
    rep << kv("alpha_mean_squeezed", vec_mean(a_sq));
    rep << kv("alpha_sd_squeezed", vec_sd(a_sq));
    rep << kv("alpha_stderr_mean_classical", vec_mean(se_cl));
    rep << kv("alpha_stderr_mean_squeezed", vec_mean(se_sq));
    rep << kv("precision_gain", prec.precision_gain);
    rep << kv("rate_gain", prec.rate_gain);
    rep << kv("floor_ratio_db", prec.db_equivalent);
    rep << kv("floor_classical_m2", vec_mean(ens.floors_cl));
    rep << kv("floor_squeezed_m2", vec_mean(ens.floors_sq));
    em.text("report.txt", rep.str());

    if (check) {
        const double target_db =
            quantum::variance_to_db(cfg.noise.variance_floor_squeezed /
                                    cfg.noise.variance_floor_classical);
        if (std::fabs(prec.db_equivalent - target_db) > 0.3)
            throw check_error("yeast: floor ratio off the configured gap");
        if (prec.precision_gain < 0.05 || prec.precision_gain > 0.45)
            throw check_error("yeast: precision gain outside sanity window");
        for (double a : ens.alphas_true)
            if (a < cfg.yeast.alpha_min || a > cfg.yeast.alpha_max)
                throw check_error("yeast: drawn alpha escaped its bounds");
        const double amean = vec_mean(ens.alphas_true);
        const double tol =
            4.0 * cfg.yeast.alpha_sigma /
            std::sqrt(static_cast<double>(ens.alphas_true.size()));
        if (std::fabs(amean - cfg.yeast.alpha_mean) > tol)
            throw check_error("yeast: drawn alpha ensemble off its mean");
    }
}

void run_spectra(const ScenarioConfig &cfg, const ChainSetup &chain,
                 Emitter &em, int workers, bool check) {
    (void)workers;
    const auto n_out = static_cast<size_t>(
        std::llround(cfg.run.record_seconds * chain.achieved_rate));
    const size_t n_traj = chain.trajectory_length(n_out);
    const auto tmpl = noise_template(cfg);

    // Raw noise spectra around the carrier, classical vs squeezed,
    // with technical noise and the lock tone in place.
    dynamics::Trajectory zero;
    zero.dt = chain.dt_out;
    zero.generator = "zero";
    zero.positions.assign(n_traj, 0.0);
    const size_t n_raw_est = n_traj * chain.decimation;
    const size_t seg = std::min<size_t>(65536, std::max<size_t>(1024, n_raw_est / 8));
    double carrier_band_floor[2] = {0.0, 0.0};
    for (const char *arm : {"classical", "squeezed"}) {
        const bool sq = std::string(arm) == "squeezed";
        lockin::NoiseConfig noise = tmpl;
        noise.variance_floor = sq ? cfg.noise.variance_floor_squeezed
                                  : cfg.noise.variance_floor_classical;
        const auto rec = lockin::synthesize_record(
            zero, chain.gain, noise, chain.raw_rate, chain.demod.carrier_freq,
            derive_seed(cfg.run.noise_seed,
                        sq ? SeedDomain::kNoiseSqueezed
                           : SeedDomain::kNoiseClassical,
                        0));
        const auto psd = spectrum::welch_psd(rec.samples, chain.raw_rate, seg,
                                             0.5, spectrum::Window::kHann);
        carrier_band_floor[sq ? 1 : 0] =
            spectrum::band_mean(psd, chain.demod.carrier_freq - 5e4,
                                chain.demod.carrier_freq + 5e4);
        const std::string fname =
            std::string("spectrum_raw_") + arm + ".txt";
        io::save_spectrum_text(psd, join_path(em.dir, fname), em.config_hash);
        em.add(fname);
    }

    // Demodulated mechanical spectrum of a trapped bead against the
    // Lorentzian prediction.
    const auto traj = dynamics::simulate_ou(
        {cfg.trap.stiffness_n_per_m, cfg.trap.drag_kg_per_s,
         cfg.trap.temperature_k},
        chain.dt_out, n_traj,
        derive_seed(cfg.run.trajectory_seed, SeedDomain::kTrajectory, 0));
    const auto arm = run_arm(
        traj, cfg.noise.variance_floor_squeezed, tmpl, chain,
        derive_seed(cfg.run.noise_seed, SeedDomain::kNoiseSqueezed, 1),
        derive_seed(cfg.run.noise_seed, SeedDomain::kCalibSqueezed, 1));
    const size_t mech_seg = std::min<size_t>(8192, arm.displacement.size() / 4);
    auto mech = spectrum::welch_psd(arm.displacement, chain.achieved_rate,
                                    mech_seg, 0.5, spectrum::Window::kHann);
    {
        io::FileHeader hdr;
        hdr.config_hash = em.config_hash;
        hdr.meta = {{"units", "frequency Hz, psd m^2/Hz"}};
        hdr.columns = "frequency_hz psd_measured psd_theory";
        std::string out = hdr.render();
        const dynamics::TrapParams trap{cfg.trap.stiffness_n_per_m,
                                        cfg.trap.drag_kg_per_s,
                                        cfg.trap.temperature_k};
        for (size_t i = 0; i < mech.frequencies.size(); ++i) {
            out += io::format_double(mech.frequencies[i]);
            out += ' ';
            out += io::format_double(mech.psd[i]);
            out += ' ';
            out += io::format_double(
                dynamics::ou_psd_theory(trap, mech.frequencies[i]));
            out += '\n';
        }
        em.text("spectrum_mechanical.txt", out);
    }

    // Trap-power squeezing degradation sweep: model
    // curve plus a synthesized measurement at each power.
    const double v_det = quantum::db_to_variance(cfg.noise.measured_db_spectra);
    {
        io::FileHeader hdr;
        hdr.config_hash = em.config_hash;
        hdr.columns =
            "trap_power_w v_eff_model squeezing_db_model squeezing_db_measured";
        std::string out = hdr.render();
        size_t idx = 0;
        for (double p : cfg.spectra_trap_powers_w) {
            const double p_leak = p * cfg.noise.trap_leak_fraction;
            const double v_eff =
                (v_det * cfg.noise.lo_power_w + p_leak) /
                (cfg.noise.lo_power_w + p_leak);
            // Matched noise-only pair at this floor.
            lockin::NoiseConfig noise = tmpl;
            noise.variance_floor = v_eff;
            const auto rec = lockin::synthesize_record(
                zero, chain.gain, noise, chain.raw_rate,
                chain.demod.carrier_freq,
                derive_seed(cfg.run.noise_seed, SeedDomain::kNoiseSqueezed,
                            100 + idx));
            const auto dem = lockin::demodulate(rec, chain.demod);
            noise.variance_floor = cfg.noise.variance_floor_classical;
            const auto rec_cl = lockin::synthesize_record(
                zero, chain.gain, noise, chain.raw_rate,
                chain.demod.carrier_freq,
                derive_seed(cfg.run.noise_seed, SeedDomain::kNoiseClassical,
                            100 + idx));
            const auto dem_cl = lockin::demodulate(rec_cl, chain.demod);
            auto var = [](const std::vector<double> &v) {
                const double m = microrheology::pairwise_sum(v) /
                                 static_cast<double>(v.size());
                std::vector<double> sq(v.size());
                for (size_t i = 0; i < v.size(); ++i)
                    sq[i] = (v[i] - m) * (v[i] - m);
                return microrheology::pairwise_sum(sq) /
                       static_cast<double>(v.size() - 1);
            };
            const double measured_db =
                -10.0 * std::log10(var(dem.values) / var(dem_cl.values));
            out += io::format_double(p);
            out += ' ';
            out += io::format_double(v_eff);
            out += ' ';
            out += io::format_double(quantum::variance_to_db(v_eff));
            out += ' ';
            out += io::format_double(measured_db);
            out += '\n';
            ++idx;
        }
        em.text("trap_power_sweep.txt", out);
    }

    if (check) {
        const double target_db = quantum::variance_to_db(
            cfg.noise.variance_floor_squeezed /
            cfg.noise.variance_floor_classical);
        const double measured_db = -10.0 * std::log10(carrier_band_floor[1] /
                                                      carrier_band_floor[0]);
        if (std::fabs(measured_db - target_db) > 0.3)
            throw check_error(
                "spectra: carrier-band floor gap off the configured value");
    }
}

} // namespace

RunManifest run_scenario(const ScenarioConfig &cfg, const std::string &out_dir,
                         int workers, int64_t seed_override, bool check) {
    const auto t_start = std::chrono::steady_clock::now();
    ScenarioConfig run_cfg = cfg;
    if (seed_override >= 0) {
        run_cfg.run.trajectory_seed = static_cast<uint64_t>(seed_override);
        run_cfg.run.noise_seed = static_cast<uint64_t>(seed_override) + 1;
    }

    fs::create_directories(out_dir);
    Emitter em;
    em.dir = out_dir;
    em.config_hash = run_cfg.hash();

    em.text("resolved_config.txt", run_cfg.dump(true));

    ChainSetup chain;
    const bool needs_chain = run_cfg.scenario != config::Scenario::kBudget;
    if (needs_chain) chain = make_chain(run_cfg);

    switch (run_cfg.scenario) {
    case config::Scenario::kBudget:
        run_budget(run_cfg, em, check);
        break;
    case config::Scenario::kBeads:
        run_beads(run_cfg, chain, em, workers, check);
        break;
    case config::Scenario::kYeast:
        run_yeast(run_cfg, chain, em, workers, check);
        break;
    case config::Scenario::kSpectra:
        run_spectra(run_cfg, chain, em, workers, check);
        break;
    }

    RunManifest man;
    man.config_hash = em.config_hash;
    man.code_version = kVersion;
    man.scenario = config::scenario_name(run_cfg.scenario);
    man.requested_output_rate = run_cfg.chain.output_rate_hz;
    man.achieved_output_rate = needs_chain ? chain.achieved_rate : 0.0;
    man.files = em.files;
    man.file_sizes = em.sizes;

    std::string mtext = "# sqztrack manifest\n";
    mtext += "config_hash = " + man.config_hash + "\n";
    mtext += "code_version = " + man.code_version + "\n";
    mtext += "scenario = " + man.scenario + "\n";
    mtext += "rng = " + std::string(PhiloxRng::name()) + "\n";
    mtext += "normal_method = " + std::string(PhiloxRng::normal_method()) + "\n";
    mtext += "requested_output_rate_hz = " +
             io::format_double(man.requested_output_rate) + "\n";
    mtext += "achieved_output_rate_hz = " +
             io::format_double(man.achieved_output_rate) + "\n";
    for (size_t i = 0; i < man.files.size(); ++i)
        mtext += "file = " + man.files[i].first + " fnv1a64 " +
                 io::hex64(man.files[i].second) + " bytes " +
                 std::to_string(man.file_sizes[i]) + "\n";
    const auto mpath = join_path(out_dir, "manifest.txt");
    io::write_text_file(mpath, mtext);
    man.path = mpath;

    man.wall_clock_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                      t_start)
            .count();
    return man;
}

std::string report_manifest(const std::string &manifest_path) {
    const auto text = io::read_text_file(manifest_path);
    const auto dir = fs::path(manifest_path).parent_path().string();
    std::ostringstream out;
    std::stringstream ss(text);
    std::string line;
    size_t verified = 0;
    while (std::getline(ss, line)) {
        if (line.rfind("file = ", 0) == 0) {
            std::stringstream ls(line.substr(7));
            std::string name, tag, hash, btag, bytes;
            ls >> name >> tag >> hash >> btag >> bytes;
            const auto actual = io::hex64(io::fnv1a64_file(join_path(dir, name)));
            if (actual != hash)
                throw io_error("checksum mismatch for " + name + ": expected " +
                               hash + ", got " + actual);
            out << name << "  " << bytes << " bytes  fnv1a64 " << hash
                << "  ok\n";
            ++verified;
        } else if (!line.empty() && line[0] != '#') {
            out << line << "\n";
        }
    }
    out << "verified_files = " << verified << "\n";
    return out.str();
}

} // namespace sqz::scenario
