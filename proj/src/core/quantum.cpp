#include "core/quantum.hpp"

#include <cmath>

#include "core/errors.hpp"

namespace sqz::quantum {

namespace {
constexpr double kPi = 3.14159265358979323846;

void require(bool ok, const char *msg) {
    if (!ok) throw domain_error(msg);
}
} // namespace

void DetectionModel::validate() const {
    require(efficiency > 0.0 && efficiency <= 1.0,
            "DetectionModel: efficiency must be in (0,1]");
    require(mode_overlap > 0.0, "DetectionModel: mode_overlap must be > 0");
    require(scattered_flux > 0.0, "DetectionModel: scattered_flux must be > 0");
    require(squeezed_variance > 0.0,
            "DetectionModel: squeezed_variance must be > 0");
}

void ScatteringGeometry::validate() const {
    require(cross_section > 0.0, "ScatteringGeometry: cross_section must be > 0");
    require(incident_flux > 0.0, "ScatteringGeometry: incident_flux must be > 0");
    require(beam_width > 0.0, "ScatteringGeometry: beam_width must be > 0");
}

void SqueezingBudget::validate() const {
    require(source_squeezing_db >= 0.0,
            "SqueezingBudget: source_squeezing_db must be >= 0");
    require(loss >= 0.0 && loss < 1.0, "SqueezingBudget: loss must be in [0,1)");
    require(local_oscillator_power > 0.0,
            "SqueezingBudget: local_oscillator_power must be > 0");
    require(trap_leak_power >= 0.0,
            "SqueezingBudget: trap_leak_power must be >= 0");
}

double scattered_flux(const ScatteringGeometry &geom) {
    geom.validate();
    return geom.cross_section * geom.incident_flux /
           (4.0 * kPi * geom.beam_width * geom.beam_width);
}

double qnl(const DetectionModel &model) {
    model.validate();
    return 1.0 / (std::sqrt(model.efficiency) *
                  std::sqrt(model.scattered_flux) * model.mode_overlap);
}

double measured_sensitivity(const DetectionModel &model) {
    model.validate();
    const double bracket =
        1.0 - model.efficiency * (1.0 - model.squeezed_variance);
    require(bracket > 0.0,
            "measured_sensitivity: unphysical efficiency/variance combination");
    return std::sqrt(bracket) * qnl(model);
}

double stringent_qnl(const DetectionModel &model) {
    return std::sqrt(model.efficiency) * qnl(model);
}

double detected_variance(double efficiency, double variance) {
    require(efficiency > 0.0 && efficiency <= 1.0,
            "detected_variance: efficiency must be in (0,1]");
    require(variance > 0.0, "detected_variance: variance must be > 0");
    return 1.0 - efficiency * (1.0 - variance);
}

double trap_leak_variance(const SqueezingBudget &budget, double efficiency) {
    budget.validate();
    const double v_source = db_to_variance(budget.source_squeezing_db);
    const double v_det = detected_variance(efficiency, v_source);
    return (v_det * budget.local_oscillator_power + budget.trap_leak_power) /
           (budget.local_oscillator_power + budget.trap_leak_power);
}

double variance_to_db(double variance) {
    require(variance > 0.0, "variance_to_db: variance must be > 0");
    return -10.0 * std::log10(variance);
}

double db_to_variance(double db) { return std::pow(10.0, -db / 10.0); }

double measurement_rate_gain(double precision_gain) {
    require(precision_gain >= 0.0 && precision_gain < 1.0,
            "measurement_rate_gain: gain must be in [0,1)");
    const double keep = 1.0 - precision_gain;
    return 1.0 / (keep * keep) - 1.0;
}

} // namespace sqz::quantum
