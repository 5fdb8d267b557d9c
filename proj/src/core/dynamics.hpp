#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace sqz::dynamics {

// Boltzmann constant, J/K (2019 SI definition).
inline constexpr double kBoltzmann = 1.380649e-23;

struct TrapParams {
    double stiffness;   // N/m
    double drag;        // kg/s
    double temperature; // K

    void validate() const;
    double relaxation_time() const { return drag / stiffness; }
    double corner_frequency() const;
    double position_variance() const; // k_B T / kappa
};

struct DiffusionSpec {
    double diffusion_constant; // m^2 / s^alpha
    double alpha;              // in (0,2); 1 = Brownian, <1 = subdiffusive

    void validate() const;
};

// Uniformly sampled particle positions in meters.
struct Trajectory {
    std::vector<double> positions;
    double dt = 0.0;
    uint64_t seed = 0;
    // Generator provenance, recorded for reproducibility.
    std::string generator;                   // e.g. "ou-exact", "fgn-circulant"
    std::string rng = "philox4x32-10";
    std::string normal_method = "inverse-cdf-as241";
    std::vector<double> segment_boundaries;  // piecewise runs only, seconds

    void validate() const;
    size_t size() const { return positions.size(); }
    double duration() const { return dt * static_cast<double>(positions.size()); }
};

// Trapped Brownian motion by the exact Ornstein-Uhlenbeck discretization,
// stationary start. Deterministic given (params, dt, n, seed).
Trajectory simulate_ou(const TrapParams &trap, double dt, size_t n,
                       uint64_t seed);

// Fractional Brownian motion with Hurst H = alpha/2: cumulative sum of
// fractional Gaussian noise scaled so the ensemble MSD is 2 D tau^alpha at
// every integer lag. Circulant embedding (Davies-Harte); falls back to the
// dense covariance factorization if the embedding is not nonnegative.
Trajectory simulate_fbm(const DiffusionSpec &spec, double dt, size_t n,
                        uint64_t seed);

// Dense exact-covariance construction (Cholesky). O(n^3): used as the
// fallback and as the distributional oracle for the circulant generator.
Trajectory simulate_fbm_dense(const DiffusionSpec &spec, double dt, size_t n,
                              uint64_t seed);

struct Segment {
    DiffusionSpec spec;
    double duration; // seconds
};

// Concatenated per-segment fBm, continuous in position. Segments too short
// for one step are skipped; boundaries recorded in the trajectory metadata.
Trajectory simulate_piecewise_alpha(const std::vector<Segment> &segments,
                                    double dt, uint64_t seed);

// fGn autocovariance gamma(k) for increments of variance sigma2 at Hurst H.
double fgn_covariance(double sigma2, double hurst, uint64_t k);

// 2 (k_B T / kappa) (1 - e^{-tau/tau_c}); free diffusion at small tau,
// plateau 2 k_B T / kappa at large tau.
double ou_msd_theory(const TrapParams &trap, double tau);

// One-sided Lorentzian k_B T / (pi^2 gamma (f_c^2 + f^2)); integrates to
// k_B T / kappa over [0, inf).
double ou_psd_theory(const TrapParams &trap, double f);

} // namespace sqz::dynamics
