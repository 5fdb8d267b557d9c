#include <doctest.h>

#include <cmath>

#include "core/dynamics.hpp"
#include "core/errors.hpp"
#include "core/rng.hpp"
#include "core/spectrum.hpp"

namespace sp = sqz::spectrum;
namespace dyn = sqz::dynamics;

TEST_CASE("welch of white noise: flat at 2/fs, integral = variance") {
    const double fs = 1e5;
    sqz::PhiloxRng rng(51, 0);
    std::vector<double> x(1 << 18);
    for (auto &v : x) v = rng.next_normal();
    const auto s = sp::welch_psd(x, fs, 4096, 0.5, sp::Window::kHann);
    CHECK(s.averaging_count >= 100);
    // mid-band flatness
    const double level = sp::band_mean(s, fs * 0.1, fs * 0.4);
    CHECK(level == doctest::Approx(2.0 / fs).epsilon(0.02));
    CHECK(s.integral() == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("welch of a sinusoid: integrated peak power A^2/2") {
    const double fs = 1e5, f0 = 12345.0, amp = 3.0;
    std::vector<double> x(1 << 17);
    for (size_t i = 0; i < x.size(); ++i)
        x[i] = amp * std::sin(2.0 * M_PI * f0 * static_cast<double>(i) / fs);
    const auto s = sp::welch_psd(x, fs, 8192, 0.5, sp::Window::kHann);
    const double df = s.frequencies[1] - s.frequencies[0];
    double peak_power = 0.0;
    for (size_t k = 0; k < s.frequencies.size(); ++k)
        if (std::fabs(s.frequencies[k] - f0) < 20.0 * df)
            peak_power += s.psd[k] * df;
    CHECK(peak_power == doctest::Approx(amp * amp / 2.0).epsilon(0.05));
}

TEST_CASE("welch of an OU trajectory matches the Lorentzian") {
    const dyn::TrapParams trap{1e-6, 1.885e-8, 295.0};
    const double tau_c = trap.relaxation_time();
    const double fc = trap.corner_frequency();
    const double dt = tau_c / 50.0;
    const auto t = dyn::simulate_ou(trap, dt, 1 << 20, 99);
    const auto s =
        sp::welch_psd(t.positions, 1.0 / dt, 8192, 0.5, sp::Window::kHann);
    CHECK(s.averaging_count >= 100);
    // half-decade band means across [fc/10, 10 fc]
    for (double lo = 0.1; lo < 9.99; lo *= std::sqrt(10.0)) {
        const double f_lo = lo * fc, f_hi = lo * std::sqrt(10.0) * fc;
        const double est = sp::band_mean(s, f_lo, f_hi);
        double theory = 0.0;
        size_t count = 0;
        for (size_t k = 0; k < s.frequencies.size(); ++k)
            if (s.frequencies[k] >= f_lo && s.frequencies[k] < f_hi) {
                theory += dyn::ou_psd_theory(trap, s.frequencies[k]);
                ++count;
            }
        theory /= static_cast<double>(count);
        INFO("band ", f_lo, " .. ", f_hi);
        CHECK(est == doctest::Approx(theory).epsilon(0.10));
    }
}

TEST_CASE("welch input validation") {
    std::vector<double> x(100, 1.0);
    CHECK_THROWS_AS((void)sp::welch_psd({}, 1e3, 64, 0.5), sqz::domain_error);
    CHECK_THROWS_AS((void)sp::welch_psd(x, 1e3, 512, 0.5), sqz::domain_error);
    CHECK_THROWS_AS((void)sp::welch_psd(x, 1e3, 64, 1.5), sqz::domain_error);
    CHECK_THROWS_AS((void)sp::welch_psd(x, -1.0, 64, 0.5), sqz::domain_error);
    CHECK_THROWS_AS(sp::band_mean(sp::welch_psd(x, 1e3, 64, 0.5), 1e6, 2e6),
                    sqz::domain_error);
}
