#pragma once

namespace sqz::quantum {

// Everything that fixes the displacement sensitivity per photon.
struct DetectionModel {
    double efficiency;        // eta, in (0,1]
    double mode_overlap;      // 1/m, derivative of scattered mode vs detection mode
    double scattered_flux;    // photons/s
    double squeezed_variance; // V; 1 = coherent, <1 = squeezed

    void validate() const;
};

struct ScatteringGeometry {
    double cross_section; // m^2
    double incident_flux; // photons/s
    double beam_width;    // m

    void validate() const;
};

struct SqueezingBudget {
    double source_squeezing_db;    // >= 0
    double loss;                   // optical loss fraction, in [0,1)
    double local_oscillator_power; // W
    double trap_leak_power;        // W of trap light reaching the detector

    void validate() const;
};

// n_scat = sigma * n_incident / (4 pi w^2)
double scattered_flux(const ScatteringGeometry &geom);

// Quantum noise limit per detected photon, m/sqrt(Hz).
double qnl(const DetectionModel &model);

// [1 - eta (1 - V)]^(1/2) * qnl; equals qnl exactly at V = 1.
double measured_sensitivity(const DetectionModel &model);

// Quantum limit at unit efficiency, sqrt(eta) * qnl (eta cancels).
double stringent_qnl(const DetectionModel &model);

// Squeezing surviving optical loss: V_det = 1 - eta (1 - V).
double detected_variance(double efficiency, double variance);

// Effective variance once leaked trap light adds shot noise, power-weighted
// against the local oscillator: (V_det P_LO + P_leak) / (P_LO + P_leak).
double trap_leak_variance(const SqueezingBudget &budget, double efficiency);

// Noise-power decibels: dB = -10 log10(V).
double variance_to_db(double variance);
double db_to_variance(double db);

// Precision of an averaged estimate scales as count^(-1/2), so a fractional
// precision gain g buys a rate gain of (1-g)^-2 - 1 at equal precision.
double measurement_rate_gain(double precision_gain);

} // namespace sqz::quantum
