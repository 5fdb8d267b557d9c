#include "core/config.hpp"

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <map>
#include <sstream>

#include "core/errors.hpp"
#include "core/textio.hpp"

namespace sqz::config {

namespace {

std::string trim(const std::string &s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

bool parse_double(const std::string &v, double &out) {
    char *end = nullptr;
    out = std::strtod(v.c_str(), &end);
    return end && *end == '\0' && !v.empty();
}

bool parse_u64(const std::string &v, uint64_t &out) {
    if (v.empty() || v[0] == '-') return false; // strtoull would wrap
    char *end = nullptr;
    out = std::strtoull(v.c_str(), &end, 10);
    return end && *end == '\0';
}

bool parse_i64(const std::string &v, int64_t &out) {
    char *end = nullptr;
    out = std::strtoll(v.c_str(), &end, 10);
    return end && *end == '\0' && !v.empty();
}

bool parse_bool(const std::string &v, bool &out) {
    if (v == "1" || v == "true" || v == "on") { out = true; return true; }
    if (v == "0" || v == "false" || v == "off") { out = false; return true; }
    return false;
}

bool parse_list(const std::string &v, std::vector<double> &out) {
    out.clear();
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        double d;
        if (!parse_double(trim(item), d)) return false;
        out.push_back(d);
    }
    return !out.empty();
}

struct Key {
    // Returns false (with no other effect) on a malformed value.
    std::function<bool(ScenarioConfig &, const std::string &)> set;
    std::function<std::string(const ScenarioConfig &)> get;
};

std::string list_to_string(const std::vector<double> &v) {
    std::string s;
    for (size_t i = 0; i < v.size(); ++i) {
        if (i) s += ",";
        s += io::format_double(v[i]);
    }
    return s;
}

const std::map<std::string, Key> &key_table() {
    static const std::map<std::string, Key> table = [] {
        std::map<std::string, Key> t;
        auto dbl = [&t](const char *name, auto member) {
            t[name] = Key{[member](ScenarioConfig &c, const std::string &v) {
                              return parse_double(v, c.*member);
                          },
                          [member](const ScenarioConfig &c) {
                              return io::format_double(c.*member);
                          }};
        };
        (void)dbl;
        // Nested members need explicit lambdas; a macro keeps the table flat.
#define SQZ_KEY_NUM(NAME, FIELD, PARSER, FORMAT)                               \
    t[NAME] = Key{[](ScenarioConfig &c, const std::string &v) {                \
                      return PARSER(v, c.FIELD);                               \
                  },                                                           \
                  [](const ScenarioConfig &c) { return FORMAT(c.FIELD); }}

#define SQZ_KEY_DBL(NAME, FIELD)                                              \
    SQZ_KEY_NUM(NAME, FIELD, parse_double, io::format_double)
#define SQZ_KEY_U64(NAME, FIELD)                                              \
    SQZ_KEY_NUM(NAME, FIELD, parse_u64, std::to_string)
#define SQZ_KEY_I64(NAME, FIELD)                                              \
    SQZ_KEY_NUM(NAME, FIELD, parse_i64, std::to_string)

        t["scenario"] = Key{
            [](ScenarioConfig &c, const std::string &v) {
                if (v == "budget") c.scenario = Scenario::kBudget;
                else if (v == "beads") c.scenario = Scenario::kBeads;
                else if (v == "yeast") c.scenario = Scenario::kYeast;
                else if (v == "spectra") c.scenario = Scenario::kSpectra;
                else return false;
                return true;
            },
            [](const ScenarioConfig &c) {
                return std::string(scenario_name(c.scenario));
            }};
        SQZ_KEY_U64("run.replicates", run.replicates);
        SQZ_KEY_DBL("run.record_seconds", run.record_seconds);
        SQZ_KEY_U64("run.trajectory_seed", run.trajectory_seed);
        SQZ_KEY_U64("run.noise_seed", run.noise_seed);
        SQZ_KEY_DBL("detection.efficiency", detection.efficiency);
        SQZ_KEY_DBL("detection.mode_overlap_per_m", detection.mode_overlap_per_m);
        SQZ_KEY_DBL("detection.scattered_flux_per_s",
                    detection.scattered_flux_per_s);
        SQZ_KEY_DBL("geometry.cross_section_m2", geometry.cross_section_m2);
        SQZ_KEY_DBL("geometry.incident_flux_per_s", geometry.incident_flux_per_s);
        SQZ_KEY_DBL("geometry.beam_width_m", geometry.beam_width_m);
        SQZ_KEY_DBL("noise.source_squeezing_db", noise.source_squeezing_db);
        SQZ_KEY_DBL("noise.loss", noise.loss);
        SQZ_KEY_DBL("noise.lo_power_w", noise.lo_power_w);
        SQZ_KEY_DBL("noise.trap_power_w", noise.trap_power_w);
        SQZ_KEY_DBL("noise.trap_leak_fraction", noise.trap_leak_fraction);
        SQZ_KEY_DBL("noise.measured_db_tracking", noise.measured_db_tracking);
        SQZ_KEY_DBL("noise.measured_db_spectra", noise.measured_db_spectra);
        SQZ_KEY_DBL("noise.quoted_precision_gain", noise.quoted_precision_gain);
        SQZ_KEY_DBL("noise.variance_floor_classical",
                    noise.variance_floor_classical);
        SQZ_KEY_DBL("noise.variance_floor_squeezed",
                    noise.variance_floor_squeezed);
        SQZ_KEY_DBL("noise.technical_corner_hz", noise.technical_corner_hz);
        SQZ_KEY_DBL("noise.technical_amplitude", noise.technical_amplitude);
        SQZ_KEY_DBL("noise.lock_tone_hz", noise.lock_tone_hz);
        SQZ_KEY_DBL("noise.lock_tone_amplitude", noise.lock_tone_amplitude);
        SQZ_KEY_DBL("chain.carrier_hz", chain.carrier_hz);
        SQZ_KEY_DBL("chain.raw_rate_hz", chain.raw_rate_hz);
        SQZ_KEY_DBL("chain.output_rate_hz", chain.output_rate_hz);
        SQZ_KEY_DBL("chain.lowpass_cutoff_hz", chain.lowpass_cutoff_hz);
        SQZ_KEY_I64("chain.filter_taps", chain.filter_taps);
        SQZ_KEY_DBL("chain.gain_units_per_m", chain.gain_units_per_m);
        SQZ_KEY_DBL("chain.noise_equiv_disp_m", chain.noise_equiv_disp_m);
        SQZ_KEY_DBL("trap.stiffness_n_per_m", trap.stiffness_n_per_m);
        SQZ_KEY_DBL("trap.drag_kg_per_s", trap.drag_kg_per_s);
        SQZ_KEY_DBL("trap.temperature_k", trap.temperature_k);
        SQZ_KEY_DBL("diffusion.constant", diffusion.constant);
        SQZ_KEY_DBL("diffusion.alpha", diffusion.alpha);
        SQZ_KEY_DBL("yeast.alpha_min", yeast.alpha_min);
        SQZ_KEY_DBL("yeast.alpha_max", yeast.alpha_max);
        SQZ_KEY_DBL("yeast.alpha_mean", yeast.alpha_mean);
        SQZ_KEY_DBL("yeast.alpha_sigma", yeast.alpha_sigma);
        SQZ_KEY_DBL("yeast.track_seconds", yeast.track_seconds);
        SQZ_KEY_DBL("yeast.segment_seconds", yeast.segment_seconds);
        SQZ_KEY_DBL("estimation.lag_min_s", estimation.lag_min_s);
        SQZ_KEY_DBL("estimation.lag_max_s", estimation.lag_max_s);
        SQZ_KEY_I64("estimation.lags_per_decade", estimation.lags_per_decade);
        SQZ_KEY_DBL("estimation.window_s", estimation.window_s);
        SQZ_KEY_DBL("estimation.hop_s", estimation.hop_s);
        t["estimation.subtract_noise"] =
            Key{[](ScenarioConfig &c, const std::string &v) {
                    return parse_bool(v, c.estimation.subtract_noise);
                },
                [](const ScenarioConfig &c) {
                    return std::string(c.estimation.subtract_noise ? "1" : "0");
                }};
        t["spectra.trap_powers_w"] =
            Key{[](ScenarioConfig &c, const std::string &v) {
                    return parse_list(v, c.spectra_trap_powers_w);
                },
                [](const ScenarioConfig &c) {
                    return list_to_string(c.spectra_trap_powers_w);
                }};
#undef SQZ_KEY_DBL
#undef SQZ_KEY_U64
#undef SQZ_KEY_I64
#undef SQZ_KEY_NUM
        return t;
    }();
    return table;
}

void validate(const ScenarioConfig &c, std::vector<std::string> &errors) {
    auto check = [&errors](bool ok, const std::string &msg) {
        if (!ok) errors.push_back(msg);
    };
    check(c.run.replicates >= 1, "run.replicates: must be >= 1");
    check(c.run.record_seconds > 0.0, "run.record_seconds: must be > 0");
    check(c.detection.efficiency > 0.0 && c.detection.efficiency <= 1.0,
          "detection.efficiency: must be in (0,1]");
    check(c.detection.mode_overlap_per_m > 0.0,
          "detection.mode_overlap_per_m: must be > 0");
    check(c.detection.scattered_flux_per_s > 0.0,
          "detection.scattered_flux_per_s: must be > 0");
    check(c.geometry.cross_section_m2 > 0.0,
          "geometry.cross_section_m2: must be > 0");
    check(c.geometry.incident_flux_per_s > 0.0,
          "geometry.incident_flux_per_s: must be > 0");
    check(c.geometry.beam_width_m > 0.0, "geometry.beam_width_m: must be > 0");
    check(c.noise.source_squeezing_db >= 0.0,
          "noise.source_squeezing_db: must be >= 0");
    check(c.noise.loss >= 0.0 && c.noise.loss < 1.0,
          "noise.loss: must be in [0,1)");
    check(c.noise.lo_power_w > 0.0, "noise.lo_power_w: must be > 0");
    check(c.noise.trap_power_w >= 0.0, "noise.trap_power_w: must be >= 0");
    check(c.noise.trap_leak_fraction >= 0.0 && c.noise.trap_leak_fraction <= 1.0,
          "noise.trap_leak_fraction: must be in [0,1]");
    check(c.noise.measured_db_tracking >= 0.0,
          "noise.measured_db_tracking: must be >= 0");
    check(c.noise.measured_db_spectra >= 0.0,
          "noise.measured_db_spectra: must be >= 0");
    check(c.noise.quoted_precision_gain >= 0.0 &&
              c.noise.quoted_precision_gain < 1.0,
          "noise.quoted_precision_gain: must be in [0,1)");
    check(c.noise.variance_floor_classical > 0.0,
          "noise.variance_floor_classical: must be > 0");
    check(c.noise.variance_floor_squeezed > 0.0,
          "noise.variance_floor_squeezed: must be > 0");
    check(c.noise.technical_corner_hz >= 0.0,
          "noise.technical_corner_hz: must be >= 0");
    check(c.noise.technical_amplitude >= 0.0,
          "noise.technical_amplitude: must be >= 0");
    check(c.noise.lock_tone_amplitude >= 0.0,
          "noise.lock_tone_amplitude: must be >= 0");
    check(c.chain.carrier_hz > 0.0, "chain.carrier_hz: must be > 0");
    check(c.chain.raw_rate_hz > 2.0 * c.chain.carrier_hz,
          "chain.raw_rate_hz: must exceed twice the carrier");
    check(c.chain.output_rate_hz > 0.0 &&
              c.chain.output_rate_hz <= c.chain.raw_rate_hz,
          "chain.output_rate_hz: must be in (0, raw_rate]");
    check(c.chain.filter_taps >= 3 && c.chain.filter_taps % 2 == 1,
          "chain.filter_taps: must be odd and >= 3");
    check(c.chain.output_rate_hz <= 2.0 * c.chain.lowpass_cutoff_hz,
          "chain.lowpass_cutoff_hz: below half the output rate");
    check(2.0 * c.chain.lowpass_cutoff_hz <= c.chain.raw_rate_hz,
          "chain.lowpass_cutoff_hz: above the raw Nyquist");
    const bool has_gain = c.chain.gain_units_per_m > 0.0;
    const bool has_ned = c.chain.noise_equiv_disp_m > 0.0;
    check(has_gain != has_ned,
          "chain: set exactly one of gain_units_per_m and noise_equiv_disp_m");
    check(c.trap.stiffness_n_per_m > 0.0, "trap.stiffness_n_per_m: must be > 0");
    check(c.trap.drag_kg_per_s > 0.0, "trap.drag_kg_per_s: must be > 0");
    check(c.trap.temperature_k > 0.0, "trap.temperature_k: must be > 0");
    check(c.diffusion.constant > 0.0, "diffusion.constant: must be > 0");
    check(c.diffusion.alpha > 0.0 && c.diffusion.alpha < 2.0,
          "diffusion.alpha: must be in (0,2)");
    check(c.yeast.alpha_min > 0.0 && c.yeast.alpha_max < 2.0 &&
              c.yeast.alpha_min < c.yeast.alpha_max,
          "yeast.alpha_min/alpha_max: need 0 < min < max < 2");
    check(c.yeast.alpha_mean >= c.yeast.alpha_min &&
              c.yeast.alpha_mean <= c.yeast.alpha_max,
          "yeast.alpha_mean: must lie inside [alpha_min, alpha_max]");
    check(c.yeast.alpha_sigma > 0.0, "yeast.alpha_sigma: must be > 0");
    check(c.yeast.segment_seconds > 0.0 &&
              c.yeast.track_seconds >= c.yeast.segment_seconds,
          "yeast.track_seconds: must cover at least one segment");
    check(c.estimation.lag_min_s >= 0.0, "estimation.lag_min_s: must be >= 0");
    check(c.estimation.lag_max_s > 0.0 &&
              (c.estimation.lag_min_s == 0.0 ||
               c.estimation.lag_max_s > c.estimation.lag_min_s),
          "estimation.lag_max_s: must exceed lag_min_s");
    check(c.estimation.lags_per_decade >= 1,
          "estimation.lags_per_decade: must be >= 1");
    // Window lags are clamped to window_s/10 by the track scenario, so only
    // positivity is a config-level requirement here.
    check(c.estimation.window_s > 0.0, "estimation.window_s: must be > 0");
    check(c.estimation.hop_s > 0.0, "estimation.hop_s: must be > 0");
    check(!c.spectra_trap_powers_w.empty(),
          "spectra.trap_powers_w: must be nonempty");
    for (double p : c.spectra_trap_powers_w)
        if (p < 0.0) {
            errors.push_back("spectra.trap_powers_w: negative power");
            break;
        }
}

} // namespace

const char *scenario_name(Scenario s) {
    switch (s) {
    case Scenario::kBudget: return "budget";
    case Scenario::kBeads: return "beads";
    case Scenario::kYeast: return "yeast";
    case Scenario::kSpectra: return "spectra";
    }
    return "?";
}

std::string ScenarioConfig::dump(bool mark_defaults) const {
    std::string out;
    for (const auto &[name, key] : key_table()) {
        out += name + " = " + key.get(*this);
        if (mark_defaults &&
            std::find(defaulted_keys.begin(), defaulted_keys.end(), name) !=
                defaulted_keys.end())
            out += "  # default";
        out += "\n";
    }
    return out;
}

std::string ScenarioConfig::hash() const {
    return io::hex64(io::fnv1a64(dump(false)));
}

ParseResult parse(const std::string &text) {
    ParseResult result;
    std::vector<std::string> seen;
    std::stringstream ss(text);
    std::string line;
    size_t lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        const auto hash_pos = line.find('#');
        if (hash_pos != std::string::npos) line.erase(hash_pos);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            result.errors.push_back("line " + std::to_string(lineno) +
                                    ": expected 'key = value'");
            continue;
        }
        const std::string keyname = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        const auto it = key_table().find(keyname);
        if (it == key_table().end()) {
            result.errors.push_back("line " + std::to_string(lineno) +
                                    ": unknown key '" + keyname + "'");
            continue;
        }
        if (std::find(seen.begin(), seen.end(), keyname) != seen.end()) {
            result.errors.push_back("line " + std::to_string(lineno) +
                                    ": duplicate key '" + keyname + "'");
            continue;
        }
        if (!it->second.set(result.config, value)) {
            result.errors.push_back("line " + std::to_string(lineno) + ": key '" +
                                    keyname + "': malformed value '" + value +
                                    "'");
            continue;
        }
        seen.push_back(keyname);
    }
    if (std::find(seen.begin(), seen.end(), "scenario") == seen.end())
        result.errors.push_back(
            "scenario: required key missing (budget|beads|yeast|spectra)");
    for (const auto &[name, key] : key_table())
        if (std::find(seen.begin(), seen.end(), name) == seen.end())
            result.config.defaulted_keys.push_back(name);
    validate(result.config, result.errors);
    return result;
}

ParseResult parse_file(const std::string &path) {
    return parse(io::read_text_file(path));
}

} // namespace sqz::config
