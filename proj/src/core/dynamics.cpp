#include "core/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include "core/errors.hpp"
#include "core/fft.hpp"
#include "core/rng.hpp"

namespace sqz::dynamics {

namespace {

constexpr double kPi = 3.14159265358979323846;

void require(bool ok, const char *msg) {
    if (!ok) throw domain_error(msg);
}

// fGn increments by circulant embedding. Returns empty vector if the
// embedding has a significantly negative eigenvalue.
std::vector<double> fgn_circulant(size_t n, double hurst, double sigma2,
                                  PhiloxRng &rng) {
    // Power-of-two circulant of length m >= 2n embedding the n-term
    // Toeplitz covariance.
    size_t m = 2;
    while (m < 2 * n) m *= 2;
    const size_t half = m / 2;

    std::vector<double> c(m);
    for (size_t j = 0; j <= half; ++j) c[j] = fgn_covariance(sigma2, hurst, j);
    for (size_t j = half + 1; j < m; ++j) c[j] = c[m - j];

    const auto spec = fft::r2c(c);
    std::vector<double> lambda(half + 1);
    double lam_max = 0.0, lam_min = 0.0;
    for (size_t k = 0; k <= half; ++k) {
        lambda[k] = spec[k].real();
        lam_max = std::max(lam_max, lambda[k]);
        lam_min = std::min(lam_min, lambda[k]);
    }
    if (lam_min < -1e-9 * lam_max) return {};
    for (auto &l : lambda) l = std::max(l, 0.0);

    // Hermitian random half-spectrum: real N(0,1) at DC and Nyquist,
    // complex (U+iV)/sqrt(2) in between. Draw order is fixed.
    std::vector<std::complex<double>> a(half + 1);
    a[0] = std::sqrt(lambda[0] / static_cast<double>(m)) * rng.next_normal();
    a[half] =
        std::sqrt(lambda[half] / static_cast<double>(m)) * rng.next_normal();
    for (size_t k = 1; k < half; ++k) {
        const double scale = std::sqrt(lambda[k] / (2.0 * static_cast<double>(m)));
        const double u = rng.next_normal();
        const double v = rng.next_normal();
        a[k] = std::complex<double>(scale * u, scale * v);
    }

    auto x = fft::c2r(a, m); // unnormalized inverse; construction absorbs 1/m
    x.resize(n);
    return x;
}

std::vector<double> fgn_dense(size_t n, double hurst, double sigma2,
                              PhiloxRng &rng) {
    // Cholesky factor of the n x n Toeplitz covariance, lower triangular.
    std::vector<double> chol(n * n, 0.0);
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = 0; j <= i; ++j) {
            double s = fgn_covariance(sigma2, hurst, i - j);
            for (size_t k = 0; k < j; ++k) s -= chol[i * n + k] * chol[j * n + k];
            if (i == j) {
                require(s > 0.0, "fgn_dense: covariance not positive definite");
                chol[i * n + i] = std::sqrt(s);
            } else {
                chol[i * n + j] = s / chol[j * n + j];
            }
        }
    }
    std::vector<double> z(n);
    for (auto &v : z) v = rng.next_normal();
    std::vector<double> x(n, 0.0);
    for (size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (size_t k = 0; k <= i; ++k) s += chol[i * n + k] * z[k];
        x[i] = s;
    }
    return x;
}

Trajectory fbm_from_increments(std::vector<double> inc, double dt,
                               uint64_t seed, const char *generator) {
    Trajectory t;
    t.dt = dt;
    t.seed = seed;
    t.generator = generator;
    t.positions.resize(inc.size() + 1);
    t.positions[0] = 0.0;
    double pos = 0.0;
    for (size_t i = 0; i < inc.size(); ++i) {
        pos += inc[i];
        t.positions[i + 1] = pos;
    }
    return t;
}

} // namespace

void TrapParams::validate() const {
    require(stiffness > 0.0, "TrapParams: stiffness must be > 0");
    require(drag > 0.0, "TrapParams: drag must be > 0");
    require(temperature > 0.0, "TrapParams: temperature must be > 0");
}

double TrapParams::corner_frequency() const {
    return stiffness / (2.0 * kPi * drag);
}

double TrapParams::position_variance() const {
    return kBoltzmann * temperature / stiffness;
}

void DiffusionSpec::validate() const {
    require(diffusion_constant > 0.0,
            "DiffusionSpec: diffusion_constant must be > 0");
    require(alpha > 0.0 && alpha < 2.0, "DiffusionSpec: alpha must be in (0,2)");
}

void Trajectory::validate() const {
    require(dt > 0.0, "Trajectory: dt must be > 0");
    require(positions.size() >= 2, "Trajectory: need at least 2 samples");
    for (double x : positions)
        require(std::isfinite(x), "Trajectory: non-finite position");
}

double fgn_covariance(double sigma2, double hurst, uint64_t k) {
    const double twoH = 2.0 * hurst;
    const double kk = static_cast<double>(k);
    return 0.5 * sigma2 *
           (std::pow(kk + 1.0, twoH) - 2.0 * std::pow(kk, twoH) +
            std::pow(std::fabs(kk - 1.0), twoH));
}

Trajectory simulate_ou(const TrapParams &trap, double dt, size_t n,
                       uint64_t seed) {
    trap.validate();
    require(dt > 0.0, "simulate_ou: dt must be > 0");
    require(n >= 2, "simulate_ou: need n >= 2");

    const double tau_c = trap.relaxation_time();
    const double sigma_x = std::sqrt(trap.position_variance());
    const double a = std::exp(-dt / tau_c);
    const double innovation = sigma_x * std::sqrt(1.0 - a * a);

    PhiloxRng rng(seed, /*stream=*/0);
    Trajectory t;
    t.dt = dt;
    t.seed = seed;
    t.generator = "ou-exact";
    t.positions.resize(n);
    double x = sigma_x * rng.next_normal(); // stationary start
    t.positions[0] = x;
    for (size_t i = 1; i < n; ++i) {
        x = a * x + innovation * rng.next_normal();
        t.positions[i] = x;
    }
    return t;
}

Trajectory simulate_fbm(const DiffusionSpec &spec, double dt, size_t n,
                        uint64_t seed) {
    spec.validate();
    require(dt > 0.0, "simulate_fbm: dt must be > 0");
    require(n >= 2, "simulate_fbm: need n >= 2");

    const double hurst = spec.alpha / 2.0;
    const double sigma2 =
        2.0 * spec.diffusion_constant * std::pow(dt, spec.alpha);
    PhiloxRng rng(seed, /*stream=*/0);
    auto inc = fgn_circulant(n - 1, hurst, sigma2, rng);
    if (!inc.empty())
        return fbm_from_increments(std::move(inc), dt, seed, "fgn-circulant");
    // Embedding failed; exact dense factorization instead (slow for large n).
    PhiloxRng rng2(seed, /*stream=*/0);
    auto dense = fgn_dense(n - 1, hurst, sigma2, rng2);
    return fbm_from_increments(std::move(dense), dt, seed,
                               "fgn-dense-fallback");
}

Trajectory simulate_fbm_dense(const DiffusionSpec &spec, double dt, size_t n,
                              uint64_t seed) {
    spec.validate();
    require(dt > 0.0, "simulate_fbm_dense: dt must be > 0");
    require(n >= 2, "simulate_fbm_dense: need n >= 2");
    const double hurst = spec.alpha / 2.0;
    const double sigma2 =
        2.0 * spec.diffusion_constant * std::pow(dt, spec.alpha);
    PhiloxRng rng(seed, /*stream=*/0);
    auto inc = fgn_dense(n - 1, hurst, sigma2, rng);
    return fbm_from_increments(std::move(inc), dt, seed, "fgn-dense");
}

Trajectory simulate_piecewise_alpha(const std::vector<Segment> &segments,
                                    double dt, uint64_t seed) {
    require(!segments.empty(), "simulate_piecewise_alpha: empty segment list");
    require(dt > 0.0, "simulate_piecewise_alpha: dt must be > 0");

    Trajectory t;
    t.dt = dt;
    t.seed = seed;
    t.generator = "fgn-circulant-piecewise";
    t.positions.push_back(0.0);
    double pos = 0.0;
    uint64_t stream = 0;
    for (const auto &seg : segments) {
        seg.spec.validate();
        require(seg.duration >= 0.0,
                "simulate_piecewise_alpha: negative segment duration");
        const auto steps = static_cast<size_t>(std::llround(seg.duration / dt));
        ++stream; // one stream per segment, consumed even if it yields nothing
        if (steps == 0) continue;
        const double hurst = seg.spec.alpha / 2.0;
        const double sigma2 =
            2.0 * seg.spec.diffusion_constant * std::pow(dt, seg.spec.alpha);
        PhiloxRng rng(seed, stream - 1);
        auto inc = fgn_circulant(steps, hurst, sigma2, rng);
        if (inc.empty()) {
            PhiloxRng rng2(seed, stream - 1);
            inc = fgn_dense(steps, hurst, sigma2, rng2);
            t.generator = "fgn-dense-fallback-piecewise";
        }
        for (double d : inc) {
            pos += d;
            t.positions.push_back(pos);
        }
        t.segment_boundaries.push_back(
            dt * static_cast<double>(t.positions.size() - 1));
    }
    require(t.positions.size() >= 2,
            "simulate_piecewise_alpha: all segments shorter than one step");
    return t;
}

double ou_msd_theory(const TrapParams &trap, double tau) {
    trap.validate();
    require(tau >= 0.0, "ou_msd_theory: tau must be >= 0");
    const double s2 = trap.position_variance();
    return 2.0 * s2 * (1.0 - std::exp(-tau / trap.relaxation_time()));
}

double ou_psd_theory(const TrapParams &trap, double f) {
    trap.validate();
    require(f >= 0.0, "ou_psd_theory: frequency must be >= 0");
    const double fc = trap.corner_frequency();
    return kBoltzmann * trap.temperature /
           (kPi * kPi * trap.drag * (fc * fc + f * f));
}

} // namespace sqz::dynamics
