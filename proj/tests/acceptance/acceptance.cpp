// Acceptance suite: every criterion prints one PASS/FAIL line; the process
// exits nonzero if any criterion fails. Tolerances are fixed here, in code.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "core/config.hpp"
#include "core/dynamics.hpp"
#include "core/lockin.hpp"
#include "core/microrheology.hpp"
#include "core/quantum.hpp"
#include "core/rng.hpp"
#include "core/scenario.hpp"
#include "core/spectrum.hpp"
#include "core/textio.hpp"

namespace qn = sqz::quantum;
namespace dyn = sqz::dynamics;
namespace lk = sqz::lockin;
namespace mrh = sqz::microrheology;
namespace sp = sqz::spectrum;
namespace sc = sqz::scenario;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void report(int id, const char *title, bool pass, const std::string &detail) {
    std::printf("[%s] criterion %d: %s  (%s)\n", pass ? "PASS" : "FAIL", id,
                title, detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

std::string fmt(const char *format, ...) {
    char buf[512];
    va_list args;
    va_start(args, format);
    std::vsnprintf(buf, sizeof(buf), format, args);
    va_end(args);
    return buf;
}

double mean(const std::vector<double> &v) {
    return mrh::pairwise_sum(v) / static_cast<double>(v.size());
}

double sample_sd(const std::vector<double> &v) {
    const double m = mean(v);
    double acc = 0.0;
    for (double x : v) acc += (x - m) * (x - m);
    return std::sqrt(acc / static_cast<double>(v.size() - 1));
}

// ---- criterion 1: budget algebra ----------------------------------------

void criterion_1() {
    const double v_det = qn::db_to_variance(2.8);
    const double reduction = 1.0 - qn::db_to_variance(2.4);
    const double margin = 2.4 - 10.0 * std::log10(1.0 / 0.85);
    const double rate = qn::measurement_rate_gain(0.22);
    const bool pass = std::fabs(v_det - 0.525) <= 1e-3 &&
                      std::fabs(reduction - 0.425) <= 1e-3 &&
                      std::fabs(margin - 1.69) <= 5e-3 &&
                      std::fabs(rate - 0.643) <= 1e-3;
    report(1, "budget algebra reproduces the quoted numbers", pass,
           fmt("V_det=%.4f reduction=%.4f margin=%.3f dB rate=%.4f", v_det,
               reduction, margin, rate));
}

// ---- criterion 2: coherent limit ----------------------------------------

void criterion_2() {
    sqz::PhiloxRng rng(20260809, 0);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const double eta = 0.02 + 0.98 * rng.next_uniform();
        const double flux = std::pow(10.0, 4.0 + 12.0 * rng.next_uniform());
        const double overlap = std::pow(10.0, 2.0 + 7.0 * rng.next_uniform());
        const qn::DetectionModel m{eta, overlap, flux, 1.0};
        const double a = qn::measured_sensitivity(m);
        const double b = qn::qnl(m);
        worst = std::max(worst, std::fabs(a - b) / b);
    }
    report(2, "measured sensitivity equals the qnl at V=1", worst <= 1e-15,
           fmt("worst relative deviation %.2e over 1000 draws", worst));
}

// ---- criterion 3: fGn circulant vs dense oracle ---------------------------

void criterion_3() {
    const double alpha = 0.815, hurst = alpha / 2.0;
    const double dt = 1e-5, d_const = 5e-15;
    const double sigma2 = 2.0 * d_const * std::pow(dt, alpha);
    const size_t n_inc = 64, reps = 100000, k_max = 16;

    std::vector<std::vector<double>> samples(k_max + 1);
    for (auto &s : samples) s.reserve(reps);
    for (size_t r = 0; r < reps; ++r) {
        const auto t = dyn::simulate_fbm({d_const, alpha}, dt, n_inc + 1,
                                         31337 + r);
        std::vector<double> inc(n_inc);
        for (size_t i = 0; i < n_inc; ++i)
            inc[i] = t.positions[i + 1] - t.positions[i];
        for (size_t k = 0; k <= k_max; ++k) {
            double acc = 0.0;
            for (size_t i = 0; i + k < n_inc; ++i) acc += inc[i] * inc[i + k];
            samples[k].push_back(acc / static_cast<double>(n_inc - k));
        }
    }
    bool pass = true;
    double worst_z = 0.0;
    for (size_t k = 0; k <= k_max; ++k) {
        const double emp = mean(samples[k]);
        const double se =
            sample_sd(samples[k]) / std::sqrt(static_cast<double>(reps));
        const double expected = dyn::fgn_covariance(sigma2, hurst, k);
        const double z = std::fabs(emp - expected) / se;
        worst_z = std::max(worst_z, z);
        if (z > 3.0) pass = false;
    }
    report(3, "circulant fGn matches the dense-oracle covariance", pass,
           fmt("worst |z| = %.2f over k <= %zu, %zu trajectories", worst_z,
               k_max, reps));
}

// ---- criterion 4: OU equipartition and Lorentzian -------------------------

void criterion_4() {
    const dyn::TrapParams trap{1e-6, 1.885e-8, 295.0};
    const double tau_c = trap.relaxation_time();
    const double fc = trap.corner_frequency();
    const double dt = tau_c / 50.0;
    const size_t n = 1000000;
    const auto t = dyn::simulate_ou(trap, dt, n, 424242);

    const double sigma2 = trap.position_variance();
    const double a = std::exp(-dt / tau_c);
    double acc = 0.0, m = mean(t.positions);
    for (double x : t.positions) acc += (x - m) * (x - m);
    const double var = acc / static_cast<double>(n - 1);
    const double se_var = sigma2 * std::sqrt(2.0 / static_cast<double>(n) *
                                             (1.0 + a * a) / (1.0 - a * a));
    const bool equi_ok = std::fabs(var - sigma2) <= 3.0 * se_var;

    const auto psd = sp::welch_psd(t.positions, 1.0 / dt, 16384, 0.5,
                                   sp::Window::kHann);
    bool psd_ok = psd.averaging_count >= 100;
    double worst_dev = 0.0;
    for (double lo = 0.1; lo < 9.99; lo *= std::sqrt(10.0)) {
        const double f_lo = lo * fc, f_hi = lo * std::sqrt(10.0) * fc;
        const double est = sp::band_mean(psd, f_lo, f_hi);
        double theory = 0.0;
        size_t cnt = 0;
        for (size_t k = 0; k < psd.frequencies.size(); ++k)
            if (psd.frequencies[k] >= f_lo && psd.frequencies[k] < f_hi) {
                theory += dyn::ou_psd_theory(trap, psd.frequencies[k]);
                ++cnt;
            }
        theory /= static_cast<double>(cnt);
        const double dev = std::fabs(est / theory - 1.0);
        worst_dev = std::max(worst_dev, dev);
        if (dev > 0.10) psd_ok = false;
    }
    report(4, "OU equipartition and Lorentzian spectrum", equi_ok && psd_ok,
           fmt("variance z=%.2f, worst PSD deviation %.1f%% (%zu averages)",
               std::fabs(var - sigma2) / se_var, 100.0 * worst_dev,
               psd.averaging_count));
}

// ---- shared pipeline helpers for criteria 5 and 6 -------------------------

struct PipelineResult {
    mrh::AlphaFit fit;
    double floor_variance;
};

PipelineResult run_pipeline(const sc::ChainSetup &chain, double alpha,
                            double d_const, double v_eff, uint64_t tseed,
                            uint64_t nseed, uint64_t cseed, double lag_max) {
    const auto n_out = static_cast<size_t>(std::llround(0.1 * chain.achieved_rate));
    const auto traj = dyn::simulate_fbm({d_const, alpha}, chain.dt_out,
                                        chain.trajectory_length(n_out), tseed);
    lk::NoiseConfig tmpl; // quantum floor only; technical noise is criterion 8
    const auto arm = sc::run_arm(traj, v_eff, tmpl, chain, nseed, cseed);
    const double lag_min = 2.0 * chain.dt_out;
    const auto lags = mrh::log_lag_grid(arm.dt, lag_min, lag_max, 10);
    const auto curve = mrh::msd(arm.displacement, arm.dt, lags);
    PipelineResult out;
    out.fit = mrh::fit_alpha(curve, lag_min, lag_max, arm.noise_offset);
    out.floor_variance = arm.floor_variance;
    return out;
}

sc::ChainSetup chain_for(double ned_m) {
    auto r = sqz::config::parse("scenario = yeast\nchain.noise_equiv_disp_m = " +
                                sqz::io::format_double(ned_m) + "\n");
    if (!r.ok()) throw std::runtime_error("acceptance: chain config invalid");
    return sc::make_chain(r.config);
}

void criterion_5() {
    const auto chain = chain_for(1.2e-9);
    const double lag_max = 0.01;
    bool pass = true;
    std::string detail;
    for (const double alpha : {0.6, 0.815, 1.0}) {
        std::vector<double> fits;
        for (uint64_t s = 0; s < 20; ++s) {
            const auto res = run_pipeline(
                chain, alpha, 5e-15, 0.575,
                sc::derive_seed(1001, sc::SeedDomain::kTrajectory, s),
                sc::derive_seed(2002, sc::SeedDomain::kNoiseSqueezed, s),
                sc::derive_seed(2002, sc::SeedDomain::kCalibSqueezed, s),
                lag_max);
            fits.push_back(res.fit.alpha);
        }
        const double m = mean(fits);
        if (std::fabs(m - alpha) > 0.03) pass = false;
        detail += fmt("a*=%.3f -> %.4f; ", alpha, m);
    }
    report(5, "closed-loop alpha recovery within 0.03", pass, detail);
}

void criterion_6() {
    const auto chain = chain_for(3.0e-9);
    const double lag_max = 0.01;
    const size_t pairs = 50;
    std::vector<double> se_cl, se_sq, db;
    size_t violations = 0;
    for (uint64_t s = 0; s < pairs; ++s) {
        const uint64_t tseed =
            sc::derive_seed(7007, sc::SeedDomain::kTrajectory, s);
        const auto cl = run_pipeline(
            chain, 0.815, 5e-15, 1.0, tseed,
            sc::derive_seed(8008, sc::SeedDomain::kNoiseClassical, s),
            sc::derive_seed(8008, sc::SeedDomain::kCalibClassical, s), lag_max);
        const auto sq = run_pipeline(
            chain, 0.815, 5e-15, 0.575, tseed,
            sc::derive_seed(8008, sc::SeedDomain::kNoiseSqueezed, s),
            sc::derive_seed(8008, sc::SeedDomain::kCalibSqueezed, s), lag_max);
        se_cl.push_back(cl.fit.alpha_stderr);
        se_sq.push_back(sq.fit.alpha_stderr);
        db.push_back(-10.0 *
                     std::log10(sq.floor_variance / cl.floor_variance));
        if (sq.fit.alpha_stderr > cl.fit.alpha_stderr) ++violations;
    }
    const double gain = 1.0 - mean(se_sq) / mean(se_cl);
    const double mean_db = mean(db);
    const double target_db = -10.0 * std::log10(0.575);
    const bool db_ok = std::fabs(mean_db - target_db) <= 0.2;
    const bool gain_ok = gain >= 0.17 && gain <= 0.27;
    const bool mono_ok =
        static_cast<double>(violations) <= 0.05 * static_cast<double>(pairs);
    report(6, "end-to-end squeezing enhancement", db_ok && gain_ok && mono_ok,
           fmt("floor gap %.3f dB (target %.3f), precision gain %.3f, "
               "stderr violations %zu/%zu",
               mean_db, target_db, gain, violations, pairs));
}

// ---- criterion 7: trap-leak degradation -----------------------------------

void criterion_7() {
    // Preset point: V_det from the measured 2.8 dB floor, 170 mW trap,
    // leak fraction 7e-5, 100 uW local oscillator.
    const double v_det = std::pow(10.0, -2.8 / 10.0);
    const double p_lo = 100e-6;
    const double p_leak = 0.170 * 7e-5;
    const double oracle = (v_det * p_lo + p_leak) / (p_lo + p_leak);
    const double impl =
        qn::trap_leak_variance({2.8, 0.0, p_lo, p_leak}, 1.0);
    const bool point_ok = std::fabs(impl - oracle) <= 1e-6;

    bool monotone = true;
    double prev = -1.0;
    for (double p_mw = 0.0; p_mw <= 500.0; p_mw += 2.5) {
        const double v = qn::trap_leak_variance(
            {2.8, 0.0, p_lo, p_mw * 1e-3 * 7e-5}, 1.0);
        if (v < prev - 1e-15 || v > 1.0 + 1e-15) monotone = false;
        prev = v;
    }
    report(7, "trap-leak degradation matches the model and is monotone",
           point_ok && monotone,
           fmt("V_eff(170 mW)=%.6f (oracle %.6f, diff %.1e), 0-500 mW sweep %s",
               impl, oracle, std::fabs(impl - oracle),
               monotone ? "monotone" : "NOT monotone"));
}

// ---- criterion 8: stroboscopic immunity -----------------------------------

void criterion_8() {
    const auto chain = chain_for(1.2e-9);
    const auto n_out = static_cast<size_t>(std::llround(0.05 * chain.achieved_rate));
    dyn::Trajectory zero;
    zero.dt = chain.dt_out;
    zero.generator = "zero";
    zero.positions.assign(chain.trajectory_length(n_out), 0.0);

    auto floor_var = [&](double amplitude) {
        lk::NoiseConfig noise;
        noise.variance_floor = 1.0;
        noise.technical_corner = 1.5e6; // below f_mod/2 = 1.761 MHz
        noise.technical_amplitude = amplitude;
        const auto rec = lk::synthesize_record(zero, chain.gain, noise,
                                               chain.raw_rate,
                                               chain.demod.carrier_freq, 606);
        const auto out = lk::demodulate(rec, chain.demod);
        const double m = mean(out.values);
        double acc = 0.0;
        for (double v : out.values) acc += (v - m) * (v - m);
        return acc / static_cast<double>(out.values.size() - 1);
    };
    const double v1 = floor_var(1.0);
    const double v2 = floor_var(2.0);
    const double change = std::fabs(v2 - v1) / v1;
    report(8, "technical noise doubling moves the floor by < 1%",
           change < 0.01, fmt("relative change %.4f%%", 100.0 * change));
}

// ---- criterion 9: preset determinism --------------------------------------

void criterion_9() {
    const auto r = sqz::config::parse_file(std::string(SQZ_PRESET_DIR) +
                                           "/yeast.cfg");
    if (!r.ok()) {
        report(9, "yeast preset determinism", false, "preset failed to parse");
        return;
    }
    const auto dir1 = (fs::temp_directory_path() / "sqz_acc_det1").string();
    const auto dir2 = (fs::temp_directory_path() / "sqz_acc_det2").string();
    fs::remove_all(dir1);
    fs::remove_all(dir2);
    (void)sc::run_scenario(r.config, dir1, 2, -1, false);
    (void)sc::run_scenario(r.config, dir2, 2, -1, false);
    const auto m1 = sqz::io::read_text_file(dir1 + "/manifest.txt");
    const auto m2 = sqz::io::read_text_file(dir2 + "/manifest.txt");
    const bool pass = !m1.empty() && m1 == m2;
    report(9, "yeast preset runs are bit-identical", pass,
           fmt("manifest bytes %zu vs %zu, %s", m1.size(), m2.size(),
               pass ? "identical" : "DIFFER"));
    fs::remove_all(dir1);
    fs::remove_all(dir2);
}

} // namespace

int main() {
    const auto t0 = std::chrono::steady_clock::now();
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    criterion_9();
    const double dt = std::chrono::duration<double>(
                          std::chrono::steady_clock::now() - t0)
                          .count();
    std::printf("%d of 9 criteria passed in %.1f s\n", 9 - g_failures, dt);
    return g_failures == 0 ? 0 : 1;
}
