#pragma once

#include <cstddef>
#include <vector>

namespace sqz::spectrum {

enum class Window { kHann, kHamming, kBlackman, kRect };

struct Spectrum {
    std::vector<double> frequencies;    // Hz, ascending
    std::vector<double> psd;            // units^2/Hz, one-sided
    double resolution_bandwidth = 0.0;  // Hz (window ENBW)
    size_t averaging_count = 0;

    // Sum of psd * df; approximates the series variance (plus mean^2 at DC).
    double integral() const;
};

// Averaged-periodogram estimate, one-sided, normalized so the integral over
// frequency matches the series variance up to windowing bias.
Spectrum welch_psd(const std::vector<double> &series, double sample_rate,
                   size_t segment_length, double overlap_fraction,
                   Window window = Window::kHann);

// Mean of psd bins with frequencies in [f_lo, f_hi). Throws if empty.
double band_mean(const Spectrum &s, double f_lo, double f_hi);

} // namespace sqz::spectrum
